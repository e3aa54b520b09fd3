//! Minimax filter sharpening: choose `F` so that `F(G(e^{jω}))` is as close
//! as possible to a desired response on a set of bands.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{
    check_even_symmetry, compose_tf, convolve, zero_phase_response, RealPolynomial,
    TransferFunction,
};
use crate::remez::{
    monomial_basis, remez_first, CompactSet, PowerBasis, RemezOptions, RemezTrace,
    DEFAULT_GRID_DENSITY,
};

const GOLDEN_STEPS: usize = 40;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// A closed frequency interval with a constant desired value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub desired: Complex64,
}

impl Band {
    pub fn new(lo: f64, hi: f64, desired: f64) -> Self {
        Self {
            lo,
            hi,
            desired: Complex64::new(desired, 0.0),
        }
    }

    pub fn complex(lo: f64, hi: f64, desired: Complex64) -> Self {
        Self { lo, hi, desired }
    }

    pub fn contains(&self, w: f64) -> bool {
        self.lo <= w && w <= self.hi
    }
}

/// Disjoint bands forming the approximation set, plus an optional linear
/// phase `e^{-jωτ}` applied to every desired value.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpec {
    bands: Vec<Band>,
    group_delay: f64,
}

impl BandSpec {
    pub fn new(mut bands: Vec<Band>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::InvalidInput(
                "band spec needs at least one band".into(),
            ));
        }
        for b in &bands {
            let finite = b.lo.is_finite()
                && b.hi.is_finite()
                && b.desired.re.is_finite()
                && b.desired.im.is_finite();
            if !finite || b.lo > b.hi || b.lo < -PI - 1e-12 || b.hi > PI + 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "band [{}, {}] must be a finite interval inside [-pi, pi]",
                    b.lo, b.hi
                )));
            }
        }
        bands.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in bands.windows(2) {
            if w[1].lo <= w[0].hi {
                return Err(Error::InvalidInput(format!(
                    "bands [{}, {}] and [{}, {}] overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(Self {
            bands,
            group_delay: 0.0,
        })
    }

    /// Passband `[0, wp]` with target 1 and stopband `[ws, π]` with target 0.
    pub fn lowpass(wp: f64, ws: f64) -> Result<Self> {
        Self::new(vec![Band::new(0.0, wp, 1.0), Band::new(ws, PI, 0.0)])
    }

    pub fn with_group_delay(mut self, tau: f64) -> Self {
        self.group_delay = tau;
        self
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn group_delay(&self) -> f64 {
        self.group_delay
    }

    pub fn compact_set(&self, grid_density: f64) -> CompactSet {
        CompactSet::new(self.bands.iter().map(|b| (b.lo, b.hi)))
            .expect("bands validated on construction")
            .with_grid_density(grid_density)
    }

    fn band_at(&self, w: f64) -> Option<&Band> {
        self.bands.iter().find(|b| b.contains(w))
    }

    /// Desired response at `w`; zero outside every band.
    pub fn desired(&self, w: f64) -> Complex64 {
        let d = self
            .band_at(w)
            .map_or(Complex64::new(0.0, 0.0), |b| b.desired);
        if self.group_delay == 0.0 {
            d
        } else {
            d * Complex64::from_polar(1.0, -w * self.group_delay)
        }
    }

    /// Desired magnitude at `w`.
    pub fn magnitude(&self, w: f64) -> f64 {
        self.band_at(w).map_or(0.0, |b| b.desired.norm())
    }

    /// True when every desired value is real and no phase term is applied.
    pub fn is_real(&self) -> bool {
        self.group_delay == 0.0 && self.bands.iter().all(|b| b.desired.im == 0.0)
    }
}

/// A filter that can be used as the inner function of a composition.
pub trait Subfilter: Sync {
    fn response(&self, w: f64) -> Result<Complex64>;

    /// Transfer function of the composed structure `F(G)`.
    fn compose(&self, f: &RealPolynomial) -> TransferFunction;
}

impl Subfilter for TransferFunction {
    fn response(&self, w: f64) -> Result<Complex64> {
        TransferFunction::response(self, w)
    }

    fn compose(&self, f: &RealPolynomial) -> TransferFunction {
        compose_tf(f, self)
    }
}

/// Type-I linear-phase FIR filter viewed through its real zero-phase
/// response. Composition delay-balances the powers of `G` so the result is
/// again a causal Type-I filter, `Σ f_k G^k z^{-L(K-k)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPhase {
    h: Vec<f64>,
}

impl ZeroPhase {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.len().is_multiple_of(2) {
            return Err(Error::DegreeMismatch(format!(
                "type-I filter needs odd length, got {}",
                h.len()
            )));
        }
        check_even_symmetry(&h)?;
        Ok(Self { h })
    }

    pub fn taps(&self) -> &[f64] {
        &self.h
    }

    pub fn half_order(&self) -> usize {
        (self.h.len() - 1) / 2
    }

    pub fn zero_phase(&self, w: f64) -> f64 {
        zero_phase_response(&self.h, w)
    }

    pub fn transfer_function(&self) -> TransferFunction {
        TransferFunction::fir(self.h.clone())
    }
}

impl Subfilter for ZeroPhase {
    fn response(&self, w: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.zero_phase(w), 0.0))
    }

    fn compose(&self, f: &RealPolynomial) -> TransferFunction {
        let l = self.half_order();
        let k_max = f.degree();
        let mut out = vec![0.0; 2 * l * k_max + 1];
        let mut power = vec![1.0];
        for (k, &fk) in f.coeffs().iter().enumerate() {
            let shift = l * (k_max - k);
            for (i, &p) in power.iter().enumerate() {
                out[shift + i] += fk * p;
            }
            if k < k_max {
                power = convolve(&power, &self.h);
            }
        }
        TransferFunction::fir(out)
    }
}

/// Rational function of `s` with real coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl ContinuousTransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if num.is_empty() || den.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidInput(
                "empty numerator or zero denominator".into(),
            ));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { num, den })
    }

    /// Response at `s = jΩ`.
    pub fn response(&self, big_omega: f64) -> Result<Complex64> {
        let s = Complex64::new(0.0, big_omega);
        let den = crate::poly::horner(&self.den, s);
        if den.norm() < crate::poly::POLE_TOL {
            return Err(Error::PoleOnUnitCircle { omega: big_omega });
        }
        Ok(crate::poly::horner(&self.num, s) / den)
    }

    /// Discrete equivalent under `s = c(1 − z⁻¹)/(1 + z⁻¹)`, so that the
    /// discrete response at `ω` equals the analog response at `c·tan(ω/2)`.
    pub fn to_discrete(&self, c: f64) -> Result<TransferFunction> {
        let n = self.num.len().max(self.den.len()) - 1;
        let map = |coeffs: &[f64]| {
            let mut out = vec![0.0; n + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let mut term = vec![a * c.powi(i as i32)];
                for _ in 0..i {
                    term = convolve(&term, &[1.0, -1.0]);
                }
                for _ in i..n {
                    term = convolve(&term, &[1.0, 1.0]);
                }
                for (o, t) in out.iter_mut().zip(term) {
                    *o += t;
                }
            }
            out
        };
        TransferFunction::new(map(&self.num), map(&self.den))
    }
}

/// Digital frequency for analog frequency `Ω`: `ω = 2·atan(Ω/c)`; `±∞` maps
/// to `±π`.
pub fn warp_frequency(big_omega: f64, c: f64) -> f64 {
    2.0 * (big_omega / c).atan()
}

/// Inverse of [`warp_frequency`].
pub fn unwarp_frequency(w: f64, c: f64) -> f64 {
    c * (w / 2.0).tan()
}

/// Maps an analog subfilter and analog bands to the digital frequency axis.
/// Band intervals are given in `Ω` and may use infinite endpoints.
pub fn bilinear_warp(
    g: &ContinuousTransferFunction,
    bands: &[Band],
    group_delay: f64,
    c: f64,
) -> Result<(TransferFunction, BandSpec)> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput("warp constant must be positive".into()));
    }
    let digital = g.to_discrete(c)?;
    let warped = bands
        .iter()
        .map(|b| Band::complex(warp_frequency(b.lo, c), warp_frequency(b.hi, c), b.desired))
        .collect();
    Ok((
        digital,
        BandSpec::new(warped)?.with_group_delay(group_delay),
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct SharpenOptions {
    pub remez: RemezOptions,
    pub grid_density: f64,
}

impl Default for SharpenOptions {
    fn default() -> Self {
        Self {
            remez: RemezOptions::default(),
            grid_density: DEFAULT_GRID_DENSITY,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SharpenResult {
    pub f: RealPolynomial,
    /// Maximum of `|H − F(G)|` over the bands.
    pub delta: f64,
    pub composed: TransferFunction,
    pub trace: RemezTrace,
}

fn check_poles(g: &dyn Subfilter, set: &CompactSet) -> Result<()> {
    for w in set.grid() {
        g.response(w)?;
    }
    Ok(())
}

fn response_or_nan(g: &dyn Subfilter, w: f64) -> Complex64 {
    g.response(w).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

/// Minimax sharpening polynomial of degree `k` for subfilter `g`.
pub fn sharpen(
    g: &dyn Subfilter,
    spec: &BandSpec,
    k: usize,
    opts: &SharpenOptions,
) -> Result<SharpenResult> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "sharpening order must be at least 1".into(),
        ));
    }
    let set = spec.compact_set(opts.grid_density);
    check_poles(g, &set)?;
    let basis = PowerBasis::new(k, |w| response_or_nan(g, w));
    let target = |w: f64| spec.desired(w);
    let out = remez_first(&basis, &target, &set, &opts.remez)?;
    let f = RealPolynomial::new(out.solution.f.clone());
    Ok(SharpenResult {
        composed: g.compose(&f),
        f,
        delta: out.continuum_delta,
        trace: out.trace,
    })
}

/// Maximum of `|H − F(G)|` over the band grid.
pub fn sharpening_deviation(
    g: &dyn Subfilter,
    f: &RealPolynomial,
    spec: &BandSpec,
    grid_density: f64,
) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for w in spec.compact_set(grid_density).grid() {
        let r = spec.desired(w) - f.eval(g.response(w)?);
        dev = dev.max(r.norm());
    }
    Ok(dev)
}

/// Maximum of `||H| − |F(G)||` over the band grid.
pub fn magnitude_deviation(
    g: &dyn Subfilter,
    f: &RealPolynomial,
    spec: &BandSpec,
    grid_density: f64,
) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for w in spec.compact_set(grid_density).grid() {
        let r = spec.magnitude(w) - f.eval(g.response(w)?).norm();
        dev = dev.max(r.abs());
    }
    Ok(dev)
}

/// Range `[min, max]` of a real response over each band, in band order.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageIntervals {
    pub intervals: Vec<(f64, f64)>,
}

fn golden(mut a: f64, mut b: f64, eval: impl Fn(f64) -> f64) -> f64 {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1);
        }
    }
    f1.max(f2)
}

fn band_range(resp: &dyn Fn(f64) -> f64, lo: f64, hi: f64, density: f64) -> (f64, f64) {
    if lo == hi {
        let v = resp(lo);
        return (v, v);
    }
    let n = (((hi - lo) * density).ceil() as usize).max(1) + 1;
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| resp(x)).collect();
    let mut vmin = vs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut vmax = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for i in 1..n - 1 {
        let (a, b) = (xs[i - 1], xs[i + 1]);
        if vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1] {
            vmax = vmax.max(golden(a, b, resp));
        }
        if vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1] {
            vmin = vmin.min(-golden(a, b, |x| -resp(x)));
        }
    }
    (vmin, vmax)
}

/// Per-band image of a real response, from a dense grid with golden-section
/// refinement of interior extrema.
pub fn image_intervals(
    response: &dyn Fn(f64) -> f64,
    spec: &BandSpec,
    grid_density: f64,
) -> ImageIntervals {
    ImageIntervals {
        intervals: spec
            .bands()
            .iter()
            .map(|b| band_range(response, b.lo, b.hi, grid_density))
            .collect(),
    }
}

/// A polynomial minimax fit of a piecewise-constant function of `x`.
#[derive(Debug, Clone)]
pub struct QFit {
    pub f: RealPolynomial,
    pub delta: f64,
    pub trace: RemezTrace,
}

/// Degree-`k` minimax approximation of the function equal to `target` on
/// each interval `[lo, hi]`. Intervals with different targets must not
/// intersect.
pub fn sharpen_q_polynomial(
    images: &[(f64, f64, f64)],
    k: usize,
    opts: &RemezOptions,
) -> Result<QFit> {
    if images.is_empty() {
        return Err(Error::InvalidInput("no image intervals".into()));
    }
    for (i, a) in images.iter().enumerate() {
        for b in &images[i + 1..] {
            if a.2 != b.2 && a.0 <= b.1 && b.0 <= a.1 {
                return Err(Error::QPathUnavailable(format!(
                    "images [{}, {}] and [{}, {}] intersect",
                    a.0, a.1, b.0, b.1
                )));
            }
        }
    }
    let total: f64 = images.iter().map(|i| i.1 - i.0).sum();
    let density = if total > 0.0 {
        DEFAULT_GRID_DENSITY.max(4096.0 / total)
    } else {
        DEFAULT_GRID_DENSITY
    };
    let set = CompactSet::new(images.iter().map(|i| (i.0, i.1)))?.with_grid_density(density);
    let q = |x: f64| {
        let t = images
            .iter()
            .find(|i| i.0 <= x && x <= i.1)
            .map_or(0.0, |i| i.2);
        Complex64::new(t, 0.0)
    };
    let out = remez_first(&monomial_basis(k), &q, &set, opts)?;
    Ok(QFit {
        f: RealPolynomial::new(out.solution.f.clone()),
        delta: out.continuum_delta,
        trace: out.trace,
    })
}

/// Sharpening of a subfilter with real response through the equivalent
/// polynomial approximation of `Q(x)` on the band images.
pub fn sharpen_via_q(
    g: &dyn Subfilter,
    spec: &BandSpec,
    k: usize,
    opts: &SharpenOptions,
) -> Result<SharpenResult> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "sharpening order must be at least 1".into(),
        ));
    }
    if !spec.is_real() {
        return Err(Error::QPathUnavailable(
            "desired response is not real".into(),
        ));
    }
    let set = spec.compact_set(opts.grid_density);
    for w in set.grid() {
        if g.response(w)?.im != 0.0 {
            return Err(Error::QPathUnavailable(format!(
                "subfilter response is not real at {w}"
            )));
        }
    }
    let resp = |w: f64| response_or_nan(g, w).re;
    let images = image_intervals(&resp, spec, opts.grid_density);
    let labelled: Vec<(f64, f64, f64)> = images
        .intervals
        .iter()
        .zip(spec.bands())
        .map(|(&(lo, hi), b)| (lo, hi, b.desired.re))
        .collect();
    let fit = sharpen_q_polynomial(&labelled, k, &opts.remez)?;
    Ok(SharpenResult {
        composed: g.compose(&fit.f),
        f: fit.f,
        delta: fit.delta,
        trace: fit.trace,
    })
}

/// `2G − G²`.
pub fn twicing(g: &dyn Subfilter) -> TransferFunction {
    g.compose(&RealPolynomial::new(vec![0.0, 2.0, -1.0]))
}

/// `Gⁿ`.
pub fn cascade(g: &dyn Subfilter, n: usize) -> TransferFunction {
    g.compose(&RealPolynomial::monomial(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn band_spec_validation() {
        assert!(BandSpec::new(vec![]).is_err());
        assert!(BandSpec::new(vec![Band::new(0.0, 1.0, 1.0), Band::new(0.5, 2.0, 0.0)]).is_err());
        assert!(BandSpec::new(vec![Band::new(0.0, 4.0, 1.0)]).is_err());
        let s = BandSpec::new(vec![Band::new(2.0, 3.0, 0.0), Band::new(0.0, 1.0, 1.0)]).unwrap();
        assert_eq!(s.bands()[0].lo, 0.0);
        assert_eq!(s.desired(0.5), c(1.0, 0.0));
        let d = s.clone().with_group_delay(2.0).desired(0.5);
        assert!((d - Complex64::from_polar(1.0, -1.0)).norm() < 1e-15);
        assert!(s.is_real());
    }

    #[test]
    fn warp_examples() {
        assert_eq!(warp_frequency(0.0, 1.0), 0.0);
        assert!((warp_frequency(f64::INFINITY, 1.0) - PI).abs() < 1e-15);
        assert!((warp_frequency(2.5, 2.5) - PI / 2.0).abs() < 1e-15);
        assert!((unwarp_frequency(warp_frequency(0.7, 1.3), 1.3) - 0.7).abs() < 1e-14);
    }

    #[test]
    fn bilinear_discretization_matches_analog_response() {
        let g =
            ContinuousTransferFunction::new(vec![1.0], vec![1.0, std::f64::consts::SQRT_2, 1.0])
                .unwrap();
        let cw = 0.8;
        let bands = [Band::new(0.0, 0.5, 1.0), Band::new(2.0, f64::INFINITY, 0.0)];
        let (gd, spec) = bilinear_warp(&g, &bands, 0.0, cw).unwrap();
        assert!((spec.bands()[1].hi - PI).abs() < 1e-15);
        for i in 0..50 {
            let w = -3.0 + 6.0 * i as f64 / 49.0;
            let a = g.response(unwarp_frequency(w, cw)).unwrap();
            let d = gd.response(w).unwrap();
            assert!((a - d).norm() < 1e-12, "{w}: {a} vs {d}");
        }
    }

    #[test]
    fn twicing_and_cascade() {
        let g = TransferFunction::fir(vec![0.3, 0.4, 0.3]);
        assert_eq!(cascade(&g, 1), g);
        let zp = ZeroPhase::new(vec![0.45, 0.1, 0.45]).unwrap();
        // zero-phase response at 0 is 1: a fixed point of twicing
        let t = twicing(&zp);
        let v = zero_phase_response(t.num(), 0.0);
        assert!((v - 1.0).abs() < 1e-14);
        let zp = ZeroPhase::new(vec![0.0, 0.9, 0.0]).unwrap();
        let v = twicing(&zp).response(0.3).unwrap().norm();
        assert!((v - 0.99).abs() < 1e-14);
    }

    #[test]
    fn zero_phase_compose_is_delay_balanced() {
        let zp = ZeroPhase::new(vec![0.2, 0.5, 0.2]).unwrap();
        let f = RealPolynomial::new(vec![0.1, -0.4, 0.7, 0.3]);
        let h = zp.compose(&f);
        assert_eq!(h.num().len(), 7);
        check_even_symmetry(h.num()).unwrap();
        for i in 0..20 {
            let w = i as f64 * 0.15;
            let expect = f.eval_real(zp.zero_phase(w));
            assert!((zero_phase_response(h.num(), w) - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn ideal_subfilter_needs_identity() {
        let g = TransferFunction::identity();
        let spec = BandSpec::new(vec![Band::new(0.0, PI, 1.0)]).unwrap();
        let r = sharpen(&g, &spec, 1, &SharpenOptions::default());
        // the response is constant so G and 1 are dependent
        assert!(matches!(r, Err(Error::RankDeficient { .. })));

        let zp = ZeroPhase::new(vec![0.5, 0.0, 0.5]).unwrap();
        let spec = BandSpec::new(vec![Band::new(0.0, 0.0, 1.0), Band::new(PI, PI, -1.0)]).unwrap();
        let r = sharpen(&zp, &spec, 1, &SharpenOptions::default()).unwrap();
        assert!(r.delta < 1e-14);
        assert!(r.f.coeffs()[0].abs() < 1e-14);
        assert!((r.f.coeffs()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pole_on_band_is_reported() {
        let g = TransferFunction::new(vec![1.0], vec![1.0, -1.0]).unwrap();
        let spec = BandSpec::lowpass(0.2, 0.5).unwrap();
        let r = sharpen(&g, &spec, 2, &SharpenOptions::default());
        assert!(matches!(r, Err(Error::PoleOnUnitCircle { .. })));
    }

    #[test]
    fn image_interval_examples() {
        let spec = BandSpec::new(vec![Band::new(0.0, 1.0, 1.0)]).unwrap();
        let im = image_intervals(&|_| 0.5, &spec, 100.0);
        assert_eq!(im.intervals, vec![(0.5, 0.5)]);
        let spec = BandSpec::new(vec![Band::new(0.0, PI / 2.0, 1.0)]).unwrap();
        let im = image_intervals(&|w: f64| w.cos(), &spec, 100.0);
        assert!(im.intervals[0].0.abs() < 1e-15);
        assert_eq!(im.intervals[0].1, 1.0);
        let spec = BandSpec::new(vec![Band::new(0.0, PI, 1.0)]).unwrap();
        let im = image_intervals(&|w: f64| (w - 1.0).powi(2), &spec, 10.0);
        assert!(im.intervals[0].0 < 1e-12);
    }

    #[test]
    fn q_polynomial_interpolates_points() {
        let fit = sharpen_q_polynomial(
            &[(0.0, 0.0, 0.0), (1.0, 1.0, 1.0)],
            1,
            &RemezOptions::default(),
        )
        .unwrap();
        assert!(fit.delta < 1e-15);
        assert!(fit.f.coeffs()[0].abs() < 1e-15);
        assert!((fit.f.coeffs()[1] - 1.0).abs() < 1e-15);
        let err = sharpen_q_polynomial(
            &[(0.0, 0.6, 0.0), (0.5, 1.0, 1.0)],
            3,
            &RemezOptions::default(),
        );
        assert!(matches!(err, Err(Error::QPathUnavailable(_))));
    }

    #[test]
    fn q_path_affine_separator() {
        let fit = sharpen_q_polynomial(
            &[(0.9, 1.1, 1.0), (-0.1, 0.1, 0.0)],
            1,
            &RemezOptions::default(),
        )
        .unwrap();
        // symmetric images: the line through (0, 0.5-…) balancing both gaps
        let mut best = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                let f0 = -0.2 + 0.4 * i as f64 / 400.0;
                let f1 = 0.6 + 0.8 * j as f64 / 400.0;
                let e = [(-0.1, 0.0), (0.1, 0.0), (0.9, 1.0), (1.1, 1.0)]
                    .iter()
                    .map(|&(x, t): &(f64, f64)| (t - f0 - f1 * x).abs())
                    .fold(0.0, f64::max);
                best = best.min(e);
            }
        }
        assert!(fit.delta <= best + 1e-12);
        assert!(best - fit.delta < 2e-3);
    }
}
