//! Minimax Type-I linear-phase FIR design on the cosine basis.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{zero_phase_response, TransferFunction};
use crate::remez::{extremal_points, remez_first, CosineBasis, RemezOptions, RemezTrace};
use crate::sharpen::BandSpec;

/// Design grid density for half-order `l`: 16 points per basis function per π.
pub fn design_grid_density(l: usize) -> f64 {
    16.0 * (l + 1) as f64 / PI
}

#[derive(Debug, Clone)]
pub struct FirDesign {
    /// Impulse response of length `2L + 1`, even-symmetric about `L`.
    pub h: Vec<f64>,
    /// Maximum deviation of the zero-phase response over the bands.
    pub achieved_delta: f64,
    pub spec: BandSpec,
    pub trace: RemezTrace,
}

impl FirDesign {
    pub fn half_order(&self) -> usize {
        (self.h.len() - 1) / 2
    }

    pub fn zero_phase(&self, w: f64) -> f64 {
        zero_phase_response(&self.h, w)
    }

    pub fn error(&self, w: f64) -> f64 {
        self.spec.desired(w).re - self.zero_phase(w)
    }

    /// Maximum deviation on the design grid only.
    pub fn grid_delta(&self) -> f64 {
        self.spec
            .compact_set(design_grid_density(self.half_order()))
            .grid()
            .into_iter()
            .map(|w| self.error(w).abs())
            .fold(0.0, f64::max)
    }

    pub fn transfer_function(&self) -> TransferFunction {
        TransferFunction::fir(self.h.clone())
    }

    /// Cosine coefficients `b_k` of the zero-phase response.
    pub fn cosine_coeffs(&self) -> Vec<f64> {
        let l = self.half_order();
        (0..=l)
            .map(|k| {
                if k == 0 {
                    self.h[l]
                } else {
                    2.0 * self.h[l + k]
                }
            })
            .collect()
    }

    /// Number of alternating extrema of the error whose magnitude is within
    /// `rel_tol·Δ` of `Δ`.
    pub fn alternations(&self, rel_tol: f64) -> usize {
        let basis = CosineBasis::new(self.half_order());
        let target = |w: f64| self.spec.desired(w);
        let set = self.spec.compact_set(4096.0 / PI);
        let threshold = self.achieved_delta * (1.0 - rel_tol);
        let ext = extremal_points(&self.cosine_coeffs(), &basis, &target, &set, threshold);
        count_alternations(ext.iter().map(|(_, r)| r.re))
    }
}

/// Length of the longest sign-alternating subsequence.
pub fn count_alternations(values: impl IntoIterator<Item = f64>) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if count == 0 || v.signum() != last.signum() {
            count += 1;
            last = v;
        }
    }
    count
}

/// Minimax Type-I filter of order `2l` for real band targets in `[0, π]`.
pub fn design_type1(l: usize, spec: &BandSpec) -> Result<FirDesign> {
    design_type1_with(l, spec, &RemezOptions::default())
}

pub fn design_type1_with(l: usize, spec: &BandSpec, opts: &RemezOptions) -> Result<FirDesign> {
    if !spec.is_real() {
        return Err(Error::InvalidInput(
            "FIR design needs real band targets".into(),
        ));
    }
    if spec.bands().iter().any(|b| b.lo < 0.0 || b.hi > PI) {
        return Err(Error::InvalidInput(
            "FIR design bands must lie in [0, pi]".into(),
        ));
    }
    let basis = CosineBasis::new(l);
    let target = |w: f64| Complex64::new(spec.desired(w).re, 0.0);
    let set = spec.compact_set(design_grid_density(l));
    let out = remez_first(&basis, &target, &set, opts)?;
    let b = &out.solution.f;
    let mut h = vec![0.0; 2 * l + 1];
    h[l] = b[0];
    for k in 1..=l {
        h[l + k] = b[k] / 2.0;
        h[l - k] = b[k] / 2.0;
    }
    Ok(FirDesign {
        h,
        achieved_delta: out.continuum_delta,
        spec: spec.clone(),
        trace: out.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sharpen::Band;

    #[test]
    fn constant_design() {
        let spec = BandSpec::new(vec![Band::new(0.0, PI, 0.7)]).unwrap();
        let d = design_type1(0, &spec).unwrap();
        assert_eq!(d.h, vec![0.7]);
        assert_eq!(d.achieved_delta, 0.0);
    }

    #[test]
    fn lowpass_is_symmetric_and_equiripple() {
        let spec = BandSpec::lowpass(0.36 * PI, 0.42 * PI).unwrap();
        let d = design_type1(5, &spec).unwrap();
        for n in 0..d.h.len() {
            assert_eq!(d.h[n], d.h[10 - n]);
        }
        assert!(d.trace.converged);
        assert!(d.alternations(1e-6) >= 7);
        assert!(d.grid_delta() <= d.achieved_delta);
        assert!(d.achieved_delta - d.grid_delta() < 1e-2 * d.achieved_delta);
    }

    #[test]
    fn rejects_complex_targets() {
        let spec = BandSpec::lowpass(0.3, 0.5).unwrap().with_group_delay(2.0);
        assert!(design_type1(3, &spec).is_err());
    }

    #[test]
    fn alternation_counter() {
        assert_eq!(count_alternations([1.0, -1.0, 1.0]), 3);
        assert_eq!(count_alternations([1.0, 1.0, -1.0, 0.0, -1.0, 1.0]), 3);
        assert_eq!(count_alternations([]), 0);
    }
}
