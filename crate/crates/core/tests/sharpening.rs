use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use sharpkit::fir::design_type1;
use sharpkit::fixtures::lowpass_10_spec;
use sharpkit::poly::{RealPolynomial, TransferFunction};
use sharpkit::sharpen::{
    image_intervals, sharpen, sharpen_via_q, sharpening_deviation, twicing, Band, BandSpec,
    SharpenOptions, ZeroPhase,
};

fn lowpass_subfilter() -> (ZeroPhase, BandSpec, f64) {
    let spec = lowpass_10_spec();
    let d = design_type1(5, &spec).unwrap();
    (ZeroPhase::new(d.h).unwrap(), spec, d.achieved_delta)
}

#[test]
fn both_paths_agree_on_lowpass_subfilter() {
    let (g, spec, _) = lowpass_subfilter();
    let opts = SharpenOptions::default();
    let a = sharpen(&g, &spec, 7, &opts).unwrap();
    let b = sharpen_via_q(&g, &spec, 7, &opts).unwrap();
    assert_eq!(a.f.degree(), 7);
    assert!((a.delta - b.delta).abs() < 1e-6);
    for (x, y) in a.f.coeffs().iter().zip(b.f.coeffs()) {
        assert!((x - y).abs() < 1e-4);
    }
}

#[test]
fn sharpening_dominates_baselines() {
    let (g, spec, sub_delta) = lowpass_subfilter();
    let opts = SharpenOptions::default();
    let density = opts.grid_density;
    let mut prev = f64::INFINITY;
    for k in 1..=7 {
        let r = sharpen(&g, &spec, k, &opts).unwrap();
        assert!(r.delta <= prev + 1e-8, "K={k}: {} > {prev}", r.delta);
        prev = r.delta;
        if k == 1 {
            assert!(r.delta <= sub_delta + 1e-8);
        }
        if k >= 2 {
            let tw = sharpening_deviation(
                &g,
                &RealPolynomial::new(vec![0.0, 2.0, -1.0]),
                &spec,
                density,
            )
            .unwrap();
            assert!(r.delta <= tw + 1e-8);
        }
    }
    let tw = twicing(&g);
    assert_eq!(tw.num().len(), 21);
}

#[test]
fn reported_delta_matches_grid_deviation() {
    let (g, spec, _) = lowpass_subfilter();
    let opts = SharpenOptions::default();
    let r = sharpen(&g, &spec, 5, &opts).unwrap();
    let grid = sharpening_deviation(&g, &r.f, &spec, opts.grid_density).unwrap();
    assert!((r.delta - grid).abs() < 1e-7);
}

#[test]
fn delay_subfilter_reduces_to_fir_design() {
    let spec = lowpass_10_spec();
    let fir = design_type1(5, &spec).unwrap();
    let g = TransferFunction::delay(1);
    let complex_spec = spec.clone().with_group_delay(5.0);
    let r = sharpen(&g, &complex_spec, 10, &SharpenOptions::default()).unwrap();
    assert!(
        (r.delta - fir.achieved_delta).abs() < 1e-6,
        "{} vs {}",
        r.delta,
        fir.achieved_delta
    );
    for (a, b) in r.composed.num().iter().zip(&fir.h) {
        assert!((a - b).abs() < 1e-4);
    }
}

#[test]
fn iir_composition_keeps_poles() {
    let g = TransferFunction::new(vec![0.1, 0.2, 0.1], vec![1.0, -0.6, 0.25]).unwrap();
    let spec = BandSpec::lowpass(0.2 * PI, 0.5 * PI)
        .unwrap()
        .with_group_delay(3.0);
    let r = sharpen(&g, &spec, 4, &SharpenOptions::default()).unwrap();
    let expect = RealPolynomial::new(g.den().to_vec()).pow(r.f.degree());
    assert_eq!(r.composed.den().len(), expect.coeffs().len());
    for (a, b) in r.composed.den().iter().zip(expect.coeffs()) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
    }
    for i in 0..50 {
        let w = i as f64 * 0.06;
        let lhs = r.composed.response(w).unwrap();
        let rhs = r.f.eval(g.response(w).unwrap());
        assert!((lhs - rhs).norm() < 1e-9);
    }
}

#[test]
fn fixture_images_follow_design_ripple() {
    let (g, spec, delta) = lowpass_subfilter();
    let resp = |w: f64| g.zero_phase(w);
    let im = image_intervals(&resp, &spec, 4096.0 / PI);
    let (p, s) = (im.intervals[0], im.intervals[1]);
    assert!(p.0 > 1.0 - delta - 1e-9 && p.1 < 1.0 + delta + 1e-9);
    assert!(s.0 > -delta - 1e-9 && s.1 < delta + 1e-9);
    assert!((p.0 - (1.0 - delta)).abs() < 1e-6);
    assert!(p.1 > s.1);
}

#[test]
fn overlapping_images_are_rejected() {
    // cos 2ω takes the same values on both bands
    let g = ZeroPhase::new(vec![0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
    let spec = BandSpec::new(vec![
        Band::new(0.0, 0.2 * PI, 1.0),
        Band::new(0.8 * PI, PI, 0.0),
    ])
    .unwrap();
    let r = sharpen_via_q(&g, &spec, 3, &SharpenOptions::default());
    assert!(matches!(
        r,
        Err(sharpkit::error::Error::QPathUnavailable(_))
    ));
    let delay = TransferFunction::delay(1);
    let r = sharpen_via_q(&delay, &lowpass_10_spec(), 3, &SharpenOptions::default());
    assert!(matches!(
        r,
        Err(sharpkit::error::Error::QPathUnavailable(_))
    ));
}

#[test]
fn composed_zero_phase_filter_realizes_f_of_g() {
    let (g, spec, _) = lowpass_subfilter();
    let r = sharpen(&g, &spec, 7, &SharpenOptions::default()).unwrap();
    let h = r.composed.num();
    assert_eq!(h.len(), 71);
    for i in 0..40 {
        let w = i as f64 * PI / 39.0;
        let lhs = r.composed.response(w).unwrap() * Complex64::from_polar(1.0, 35.0 * w);
        let rhs = r.f.eval_real(g.zero_phase(w));
        assert!((lhs.re - rhs).abs() < 1e-9 && lhs.im.abs() < 1e-9);
    }
}

fn lowpass_type1() -> impl Strategy<Value = (usize, f64, f64)> {
    (2usize..=5, 0.2f64..0.4, 0.08f64..0.2).prop_map(|(l, wp, gap)| (l, wp, wp + gap))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn direct_and_q_paths_agree((l, wp, ws) in lowpass_type1(), k in 2usize..=5) {
        let spec = BandSpec::lowpass(wp * PI, ws * PI).unwrap();
        let g = ZeroPhase::new(design_type1(l, &spec).unwrap().h).unwrap();
        let opts = SharpenOptions::default();
        let a = sharpen(&g, &spec, k, &opts).unwrap();
        let b = match sharpen_via_q(&g, &spec, k, &opts) {
            Ok(b) => b,
            Err(sharpkit::error::Error::QPathUnavailable(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!((a.delta - b.delta).abs() < 1e-6, "{} vs {}", a.delta, b.delta);
        for (x, y) in a.f.coeffs().iter().zip(b.f.coeffs()) {
            prop_assert!((x - y).abs() < 1e-4 * (1.0 + x.abs()));
        }
    }
}
