//! Reference filters and coefficient lists used by tests, the
//! acceptance suite and the CLI examples.

use std::f64::consts::PI;

use crate::poly::TransferFunction;
use crate::sharpen::{Band, BandSpec};

/// Fourth-order elliptic bandpass (second-order prototype), passband
/// `[0.45π, 0.63π]`, 1 dB ripple, 40 dB attenuation. Generated by
/// `fixtures/elliptic_bandpass.py`.
#[allow(clippy::excessive_precision)]
pub const ELLIPTIC_BANDPASS_NUM: [f64; 5] = [
    0.066180044651600628,
    0.0037008888272184858,
    -0.10352113765753869,
    0.0037008888272185079,
    0.066180044651600642,
];

#[allow(clippy::excessive_precision)]
pub const ELLIPTIC_BANDPASS_DEN: [f64; 5] = [
    1.0,
    0.42876880123806532,
    1.3334962290616517,
    0.31140896420563141,
    0.55039893550460861,
];

pub fn elliptic_bandpass() -> TransferFunction {
    TransferFunction::new(
        ELLIPTIC_BANDPASS_NUM.to_vec(),
        ELLIPTIC_BANDPASS_DEN.to_vec(),
    )
    .expect("fixture coefficients are valid")
}

/// Magnitude targets for sharpening the elliptic bandpass.
pub fn bandpass_spec() -> BandSpec {
    BandSpec::new(vec![
        Band::new(0.0, 0.38 * PI, 0.0),
        Band::new(0.45 * PI, 0.63 * PI, 1.0),
        Band::new(0.70 * PI, PI, 0.0),
    ])
    .expect("valid bands")
}

/// Lowpass with passband `[0, 0.36π]` and stopband `[0.42π, π]`.
pub fn lowpass_10_spec() -> BandSpec {
    BandSpec::lowpass(0.36 * PI, 0.42 * PI).expect("valid bands")
}

/// Lowpass with passband `[0, 0.20π]` and stopband `[0.24π, π]`.
pub fn lowpass_30_spec() -> BandSpec {
    BandSpec::lowpass(0.20 * PI, 0.24 * PI).expect("valid bands")
}

/// Reference direct decomposition of the 30th-order lowpass: `F` of degree 6
/// and `G` of degree 5, ascending powers.
pub const REFERENCE_DIRECT_F: [f64; 7] =
    [-0.0526, 0.0649, -0.0359, -0.0021, 0.1160, -0.0226, 0.0049];
pub const REFERENCE_DIRECT_G: [f64; 6] = [-0.1037, 0.1759, 0.2667, 0.3432, 0.4321, 0.7834];

/// Reference causal half `C(z)` of the 30th-order lowpass.
pub const REFERENCE_C: [f64; 16] = [
    0.1105, 0.2039, 0.1572, 0.0939, 0.0307, -0.0173, -0.0412, -0.0402, -0.0215, 0.0042, 0.0260,
    0.0370, 0.0364, 0.0281, 0.0192, -0.0597,
];

/// Reference decomposition of `C(z)`: `F` of degree 5 and `G` of degree 3.
pub const REFERENCE_SYMMETRIC_F: [f64; 6] = [0.1862, 0.2261, 0.0020, -0.0068, -0.0132, 0.0097];
pub const REFERENCE_SYMMETRIC_G: [f64; 4] = [-0.3359, 0.8847, 0.7099, 0.4192];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_fixture_meets_its_spec() {
        let g = elliptic_bandpass();
        let db = |w: f64| 20.0 * g.response(w * PI).unwrap().norm().log10();
        assert!((db(0.45) + 1.0).abs() < 1e-6);
        assert!((db(0.63) + 1.0).abs() < 1e-6);
        for i in 0..=100 {
            let w = 0.45 + 0.18 * i as f64 / 100.0;
            assert!(db(w) > -1.0 - 1e-6 && db(w) < 1e-6);
        }
        for w in [0.0, 0.05, 0.1, 0.15, 0.95, 1.0] {
            assert!(db(w) < -40.0 + 1e-6, "{w}: {}", db(w));
        }
        assert!(db(0.38) < -10.0 && db(0.70) < -11.0);
    }
}
