//! Approximate functional decomposition `h ≈ F(G)` in the least-squares
//! sense on coefficient vectors.
//!
//! `G` is kept monic with zero constant term; the affine freedom
//! `F(G) = F̂(aG + b)` is absorbed into `F`. Each iteration solves for `F`
//! exactly by linear least squares and takes one Levenberg–Marquardt step on
//! the free coefficients of `G` using the variable-projection Jacobian.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{check_even_symmetry, convolve, cos_power_expansion, RealPolynomial};

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub starts: usize,
    pub seed: u64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            starts: 8,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub f: RealPolynomial,
    pub g: RealPolynomial,
    pub reconstruction: RealPolynomial,
    pub l2_error: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `F` is constant, so `G` does not influence the result.
    pub degenerate: bool,
    /// Norm of the gradient of the squared error with respect to `G`'s free
    /// coefficients, at the returned point.
    pub gradient_norm: f64,
    /// Error after every accepted step, starting with the initial point.
    pub history: Vec<f64>,
}

fn powers(g: &[f64], k: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for _ in 0..k {
        let next = convolve(out.last().expect("non-empty"), g);
        out.push(next);
    }
    out
}

/// Columns are the coefficient vectors of `G^0..G^K`, padded to `n` rows.
fn composition_matrix(pows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, pows.len(), |i, k| pows[k].get(i).copied().unwrap_or(0.0))
}

struct Fit {
    f: Vec<f64>,
    residual: DVector<f64>,
    err: f64,
    q: DMatrix<f64>,
    pows: Vec<Vec<f64>>,
}

fn fit_outer(h: &DVector<f64>, g: &[f64], k: usize) -> Result<Fit> {
    let n = h.len();
    let pows = powers(g, k);
    let a = composition_matrix(&pows, n);
    let qr = a.clone().qr();
    let r = qr.r();
    if (0..r.ncols()).any(|i| r[(i, i)].abs() < 1e-14 * r[(0, 0)].abs().max(1.0)) {
        return Err(Error::SingularStep { retries: 0 });
    }
    let q = qr.q();
    let qtb = q.transpose() * h;
    let f = r
        .solve_upper_triangular(&qtb)
        .ok_or(Error::SingularStep { retries: 0 })?;
    let residual = h - &a * &f;
    let err = residual.norm();
    Ok(Fit {
        f: f.iter().copied().collect(),
        residual,
        err,
        q,
        pows,
    })
}

/// Projected Jacobian columns `P⊥ · coeffs(F'(G) · x^i)` for the free
/// coefficients `g_1..g_{M-1}`.
fn projected_jacobian(fit: &Fit, n: usize, m: usize) -> DMatrix<f64> {
    let k = fit.f.len() - 1;
    // F'(G) = Σ k f_k G^{k-1}
    let mut dfg = vec![0.0; n];
    for j in 1..=k {
        for (i, &p) in fit.pows[j - 1].iter().enumerate() {
            dfg[i] += j as f64 * fit.f[j] * p;
        }
    }
    let mut jac = DMatrix::zeros(n, m.saturating_sub(1));
    for col in 0..m.saturating_sub(1) {
        let shift = col + 1;
        for i in 0..n - shift {
            jac[(i + shift, col)] = dfg[i];
        }
    }
    let proj = &fit.q * (fit.q.transpose() * &jac);
    jac - proj
}

fn assemble_g(free: &[f64], m: usize) -> Vec<f64> {
    let mut g = vec![0.0; m + 1];
    g[1..m].copy_from_slice(free);
    g[m] = 1.0;
    g
}

fn normalize_init(g0: &RealPolynomial, m: usize) -> Result<Vec<f64>> {
    if g0.degree() != m || g0.leading() == 0.0 {
        return Err(Error::DegreeMismatch(format!(
            "initial G must have degree {m}, got {}",
            g0.degree()
        )));
    }
    let lead = g0.leading();
    Ok((1..m).map(|i| g0.coeffs()[i] / lead).collect())
}

fn check_degrees(h: &RealPolynomial, k: usize, m: usize) -> Result<()> {
    if k == 0 || m == 0 {
        return Err(Error::DegreeMismatch("K and M must be at least 1".into()));
    }
    if h.degree() > k * m {
        return Err(Error::DegreeMismatch(format!(
            "degree {} exceeds K·M = {}",
            h.degree(),
            k * m
        )));
    }
    Ok(())
}

/// Alternating least squares from the initial inner polynomial `g0` of
/// degree `m`; only its shape matters since it is normalized to be monic
/// with zero constant term.
pub fn als_decompose(
    h: &RealPolynomial,
    k: usize,
    m: usize,
    g0: &RealPolynomial,
    opts: &DecomposeOptions,
) -> Result<DecompositionResult> {
    check_degrees(h, k, m)?;
    let free = normalize_init(g0, m)?;
    run_als(h, k, m, free, opts)
}

fn run_als(
    h: &RealPolynomial,
    k: usize,
    m: usize,
    mut free: Vec<f64>,
    opts: &DecomposeOptions,
) -> Result<DecompositionResult> {
    let n = k * m + 1;
    let hv = DVector::from_vec(h.padded(n));
    let hnorm = hv.norm();
    let mut fit = fit_outer(&hv, &assemble_g(&free, m), k)?;
    let mut history = vec![fit.err];
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let mut grad_norm = 0.0;
    for _ in 0..opts.max_iter {
        if m == 1 || fit.err <= 1e-15 * hnorm.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        iterations += 1;
        let jac = projected_jacobian(&fit, n, m);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &fit.residual;
        grad_norm = grad.norm();
        let mut accepted = None;
        let mut retries = 0;
        while retries < 10 {
            let mut lhs = jtj.clone();
            for i in 0..lhs.nrows() {
                lhs[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(step) = lhs.lu().solve(&grad) else {
                lambda *= 10.0;
                retries += 1;
                continue;
            };
            // r(g + δ) ≈ r − J δ, so the Gauss–Newton step is δ = (JᵀJ)⁻¹Jᵀr.
            let trial: Vec<f64> = free.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            if trial.iter().all(|v| v.is_finite()) {
                if let Ok(tf) = fit_outer(&hv, &assemble_g(&trial, m), k) {
                    if tf.err < fit.err {
                        accepted = Some((trial, tf));
                        lambda = (lambda / 3.0).max(1e-12);
                        break;
                    }
                }
            }
            lambda *= 10.0;
            retries += 1;
        }
        let Some((trial, tf)) = accepted else {
            // No damped step decreases the error: a stationary point.
            converged = grad_norm < 1e-6 * hnorm.max(f64::MIN_POSITIVE);
            break;
        };
        let prev = fit.err;
        free = trial;
        fit = tf;
        history.push(fit.err);
        if prev - fit.err <= opts.tol * prev {
            converged = true;
            break;
        }
    }
    if m > 1 {
        let jac = projected_jacobian(&fit, n, m);
        grad_norm = (jac.transpose() * &fit.residual).norm();
    }
    let f = RealPolynomial::new(fit.f.clone());
    let g = RealPolynomial::new(assemble_g(&free, m));
    let reconstruction = f.compose(&g);
    let degenerate = fit.f[1..]
        .iter()
        .all(|c| c.abs() <= 1e-14 * hnorm.max(f64::MIN_POSITIVE));
    let l2_error = {
        let rc = reconstruction.padded(n);
        hv.iter()
            .zip(rc)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    Ok(DecompositionResult {
        f,
        g,
        reconstruction,
        l2_error,
        iterations,
        converged,
        degenerate,
        gradient_norm: grad_norm,
        history,
    })
}

/// Power series `a^α` to `n_terms` terms for `a[0] = 1`.
pub fn power_series_pow(a: &[f64], alpha: f64, n_terms: usize) -> Vec<f64> {
    let mut b = vec![0.0; n_terms];
    if n_terms == 0 {
        return b;
    }
    b[0] = 1.0;
    for n in 1..n_terms {
        let mut s = 0.0;
        for k in 1..=n.min(a.len() - 1) {
            s += ((alpha + 1.0) * k as f64 - n as f64) * a[k] * b[n - k];
        }
        b[n] = s / n as f64;
    }
    b
}

/// Free coefficients of `G` from the top `M` coefficients of `h`: with
/// `h ≈ f_K G^K`, the reversed and normalized `h` is a `K`-th power up to
/// order `M − 1`. Exact when `h` is decomposable with `deg h = K·M`.
pub fn leading_root_init(h: &RealPolynomial, k: usize, m: usize) -> Vec<f64> {
    let n = k * m;
    let c = h.padded(n + 1);
    if c[n] == 0.0 || m == 1 {
        return vec![0.0; m - 1];
    }
    let a: Vec<f64> = (0..m).map(|i| c[n - i] / c[n]).collect();
    let b = power_series_pow(&a, 1.0 / k as f64, m);
    // b_i multiplies x^{M-i} in G.
    (1..m).map(|j| b[m - j]).collect()
}

/// Multi-start decomposition: the leading-root initialization plus seeded
/// random perturbations of it, run in parallel; the best result is returned.
pub fn decompose_direct(
    h: &RealPolynomial,
    k: usize,
    m: usize,
    opts: &DecomposeOptions,
) -> Result<DecompositionResult> {
    check_degrees(h, k, m)?;
    let base = leading_root_init(h, k, m);
    let scale = base.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    let starts: Vec<Vec<f64>> = (0..opts.starts.max(1))
        .map(|s| {
            if s == 0 {
                return base.clone();
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(s as u64);
            let sigma = 0.3 * scale * s as f64 / opts.starts as f64;
            base.iter()
                .map(|&v| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    v + sigma * z
                })
                .collect()
        })
        .collect();
    let results: Vec<Result<DecompositionResult>> = starts
        .into_par_iter()
        .map(|free| run_als(h, k, m, free, opts))
        .collect();
    let mut best: Option<DecompositionResult> = None;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.l2_error < b.l2_error) {
                    best = Some(r);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one start"))
}

#[derive(Debug, Clone)]
pub struct ChebyshevDecomposition {
    /// Decomposition of the polynomial in `cos ω`.
    pub result: DecompositionResult,
    /// Maximum over `ω ∈ [0, π]` of the zero-phase response error.
    pub response_error: f64,
}

fn response_grid() -> impl Iterator<Item = f64> {
    (0..1024).map(|i| PI * i as f64 / 1023.0)
}

/// Decomposition of the zero-phase response written as a polynomial in
/// `cos ω`.
pub fn decompose_chebyshev(
    h_shifted: &[f64],
    k: usize,
    m: usize,
    opts: &DecomposeOptions,
) -> Result<ChebyshevDecomposition> {
    if h_shifted.len().is_multiple_of(2) {
        return Err(Error::NotSymmetric {
            index: 0,
            mismatch: f64::NAN,
        });
    }
    let l = (h_shifted.len() - 1) / 2;
    let b = cos_power_expansion(h_shifted, l)?.as_polynomial();
    let result = decompose_direct(&b, k, m, opts)?;
    let response_error = response_grid()
        .map(|w| (b.eval_real(w.cos()) - result.reconstruction.eval_real(w.cos())).abs())
        .fold(0.0, f64::max);
    Ok(ChebyshevDecomposition {
        result,
        response_error,
    })
}

/// `H_shifted(z) = C(z) + C(z⁻¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSplit {
    /// `C[0] = h[L]/2`, `C[n] = h[L+n]`; always `L + 1` entries.
    pub c: Vec<f64>,
    pub half_order: usize,
}

impl SymmetricSplit {
    pub fn polynomial(&self) -> RealPolynomial {
        RealPolynomial::new(self.c.clone())
    }

    /// The symmetric sequence `C(z) + C(z⁻¹)`, centered at `L`.
    pub fn reassemble(&self) -> Vec<f64> {
        symmetric_from_half(&self.c)
    }
}

/// Symmetric sequence of length `2n − 1` with `out[n−1] = 2p[0]` and
/// `out[n−1 ± i] = p[i]`.
pub fn symmetric_from_half(p: &[f64]) -> Vec<f64> {
    let l = p.len() - 1;
    let mut out = vec![0.0; 2 * l + 1];
    out[l] = 2.0 * p[0];
    for i in 1..=l {
        out[l + i] = p[i];
        out[l - i] = p[i];
    }
    out
}

pub fn split_symmetric(h_shifted: &[f64]) -> Result<SymmetricSplit> {
    if h_shifted.len().is_multiple_of(2) {
        return Err(Error::NotSymmetric {
            index: 0,
            mismatch: f64::NAN,
        });
    }
    check_even_symmetry(h_shifted)?;
    let l = (h_shifted.len() - 1) / 2;
    let mut c = h_shifted[l..].to_vec();
    c[0] /= 2.0;
    Ok(SymmetricSplit { c, half_order: l })
}

#[derive(Debug, Clone)]
pub struct SymmetricDecomposition {
    pub split: SymmetricSplit,
    /// Decomposition of `C`.
    pub result: DecompositionResult,
    /// `F(G(z)) + F(G(z⁻¹))`, length `2KM + 1`, exactly symmetric.
    pub reconstruction: Vec<f64>,
    /// Maximum over `ω ∈ [0, π]` of the zero-phase response error.
    pub response_error: f64,
}

pub fn decompose_symmetric(
    h_shifted: &[f64],
    k: usize,
    m: usize,
    opts: &DecomposeOptions,
) -> Result<SymmetricDecomposition> {
    let split = split_symmetric(h_shifted)?;
    let result = decompose_direct(&split.polynomial(), k, m, opts)?;
    let p = result.reconstruction.padded(k * m + 1);
    let reconstruction = symmetric_from_half(&p);
    let response_error = response_grid()
        .map(|w| {
            let a = crate::poly::zero_phase_response(h_shifted, w);
            let b = crate::poly::zero_phase_response(&reconstruction, w);
            (a - b).abs()
        })
        .fold(0.0, f64::max);
    Ok(SymmetricDecomposition {
        split,
        result,
        reconstruction,
        response_error,
    })
}

/// `‖h − F(G)‖₂` on coefficient vectors.
pub fn composition_error(h: &RealPolynomial, f: &RealPolynomial, g: &RealPolynomial) -> f64 {
    let r = f.compose(g);
    let n = h.coeffs().len().max(r.coeffs().len());
    h.padded(n)
        .iter()
        .zip(r.padded(n))
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> RealPolynomial {
        RealPolynomial::new(c.to_vec())
    }

    #[test]
    fn power_series_root() {
        // (1 + x)^2 = 1 + 2x + x^2, square root recovers 1 + x
        let b = power_series_pow(&[1.0, 2.0, 1.0], 0.5, 4);
        assert!((b[0] - 1.0).abs() < 1e-15);
        assert!((b[1] - 1.0).abs() < 1e-15);
        assert!(b[2].abs() < 1e-15);
        assert!(b[3].abs() < 1e-15);
    }

    #[test]
    fn x4_is_x2_of_x2() {
        let r = decompose_direct(
            &p(&[0.0, 0.0, 0.0, 0.0, 1.0]),
            2,
            2,
            &DecomposeOptions::default(),
        )
        .unwrap();
        assert!(r.l2_error < 1e-12);
        assert_eq!(r.g.coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn exact_composition_recovered() {
        let f = p(&[0.3, -1.2, 0.7, 2.0]);
        let g = p(&[0.5, 1.1, -0.4, 0.9, -1.3]);
        let h = f.compose(&g);
        let r = decompose_direct(&h, 3, 4, &DecomposeOptions::default()).unwrap();
        assert!(r.l2_error < 1e-8, "{}", r.l2_error);
        let near = p(&[0.0, 1.0, -0.4, 0.8, -1.2]);
        let r = als_decompose(&h, 3, 4, &near, &DecomposeOptions::default()).unwrap();
        assert!(r.l2_error < 1e-8, "{}", r.l2_error);
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn constant_target_is_degenerate() {
        let r = decompose_direct(&p(&[1.0]), 1, 1, &DecomposeOptions::default()).unwrap();
        assert_eq!(r.l2_error, 0.0);
        assert!(r.degenerate);
        assert_eq!(r.f.coeffs(), &[1.0]);
    }

    #[test]
    fn degree_errors() {
        let h = p(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(matches!(
            decompose_direct(&h, 1, 3, &DecomposeOptions::default()),
            Err(Error::DegreeMismatch(_))
        ));
        assert!(matches!(
            als_decompose(&h, 2, 2, &p(&[0.0, 1.0]), &DecomposeOptions::default()),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_symmetric(&[1.0]).unwrap().c, vec![0.5]);
        let s = split_symmetric(&[2.0, 6.0, 2.0]).unwrap();
        assert_eq!(s.c, vec![3.0, 2.0]);
        assert_eq!(s.reassemble(), vec![2.0, 6.0, 2.0]);
        assert!(matches!(
            split_symmetric(&[1.0, 2.0, 3.0]),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn chebyshev_trivial_case() {
        // h = [0.25, 0.5, 0.25] → 0.5 + 0.5 cos ω, degree 1 in cos ω
        let r =
            decompose_chebyshev(&[0.25, 0.5, 0.25], 1, 1, &DecomposeOptions::default()).unwrap();
        assert!(r.result.l2_error < 1e-15);
        assert!(r.response_error < 1e-15);
    }

    #[test]
    fn symmetric_exact_case() {
        let f = p(&[0.1, 0.4, -0.2]);
        let g = p(&[0.3, -0.5, 0.8]);
        let c = f.compose(&g).padded(5);
        let h = symmetric_from_half(&c);
        let r = decompose_symmetric(&h, 2, 2, &DecomposeOptions::default()).unwrap();
        assert!(r.result.l2_error < 1e-10);
        assert!(r.response_error < 1e-9);
        let n = r.reconstruction.len();
        for i in 0..n {
            assert_eq!(r.reconstruction[i], r.reconstruction[n - 1 - i]);
        }
    }
}
