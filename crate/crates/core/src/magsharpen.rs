//! Magnitude-only sharpening by alternating projections: fit `Σ f_k G^k` to
//! `M e^{jΘ}` in the minimax sense, then replace `Θ` by the phase of the fit.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::RealPolynomial;
use crate::remez::{remez_first_sampled, RemezOptions, RemezTrace, SampledProblem};
use crate::sharpen::{BandSpec, SharpenOptions, SharpenResult, Subfilter};

/// Phase values on the working grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
}

impl PhaseFunction {
    pub fn zeros(omegas: Vec<f64>) -> Self {
        let values = vec![0.0; omegas.len()];
        Self { omegas, values }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MagSharpenOptions {
    pub sharpen: SharpenOptions,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MagSharpenOptions {
    fn default() -> Self {
        Self {
            sharpen: SharpenOptions::default(),
            tol: 1e-7,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MagSharpenTrace {
    /// Complex error `max |M e^{jΘ^{[i-1]}} − Σ f^{[i]}_k G^k|` per iteration.
    pub deltas: Vec<f64>,
    /// Magnitude error `max |M − |Σ f^{[i]}_k G^k||` per iteration.
    pub magnitude_errors: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
    pub converged: bool,
    /// The error did not decrease from its first value.
    pub no_descent: bool,
}

/// Working grid of a band spec.
pub fn working_grid(spec: &BandSpec, grid_density: f64) -> Vec<f64> {
    spec.compact_set(grid_density).grid()
}

/// Pointwise phase of `Σ f_k G^k`; where the sum vanishes the previous phase
/// is kept (0 without a previous phase).
pub fn phase_projection(
    f: &[f64],
    g: &dyn Subfilter,
    grid: &[f64],
    previous: Option<&PhaseFunction>,
) -> Result<PhaseFunction> {
    let p = RealPolynomial::new(f.to_vec());
    let mut values = Vec::with_capacity(grid.len());
    for (i, &w) in grid.iter().enumerate() {
        let a = p.eval(g.response(w)?);
        values.push(if a.norm() == 0.0 {
            previous.map_or(0.0, |prev| prev.values[i])
        } else {
            a.arg()
        });
    }
    Ok(PhaseFunction {
        omegas: grid.to_vec(),
        values,
    })
}

/// Phase of `G^k` on the grid.
pub fn cascade_phase(g: &dyn Subfilter, k: usize, grid: &[f64]) -> Result<PhaseFunction> {
    let mut f = vec![0.0; k + 1];
    f[k] = 1.0;
    phase_projection(&f, g, grid, None)
}

/// Phase of `Σ f̃_k G^k` with standard normal `f̃`.
pub fn random_phase(
    g: &dyn Subfilter,
    k: usize,
    grid: &[f64],
    rng: &mut impl rand::Rng,
) -> Result<PhaseFunction> {
    let f: Vec<f64> = (0..=k).map(|_| StandardNormal.sample(rng)).collect();
    phase_projection(&f, g, grid, None)
}

fn targets(spec: &BandSpec, theta: &PhaseFunction) -> Vec<Complex64> {
    theta
        .omegas
        .iter()
        .zip(&theta.values)
        .map(|(&w, &t)| Complex64::from_polar(spec.magnitude(w), t))
        .collect()
}

/// Alternating-projection magnitude sharpening starting from `theta0`, which
/// must be sampled on [`working_grid`] of `spec`.
pub fn sharpen_magnitude(
    g: &dyn Subfilter,
    spec: &BandSpec,
    k: usize,
    theta0: &PhaseFunction,
    opts: &MagSharpenOptions,
) -> Result<(SharpenResult, MagSharpenTrace)> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "sharpening order must be at least 1".into(),
        ));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be positive".into()));
    }
    if spec
        .bands()
        .iter()
        .any(|b| b.desired.re < 0.0 || b.desired.im != 0.0)
    {
        return Err(Error::InvalidInput(
            "magnitude targets must be real and nonnegative".into(),
        ));
    }
    let grid = working_grid(spec, opts.sharpen.grid_density);
    if theta0.omegas != grid || theta0.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "initial phase must be finite and sampled on the working grid".into(),
        ));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &w in &grid {
        let gw = g.response(w)?;
        let mut row = Vec::with_capacity(k + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..=k {
            row.push(acc);
            acc *= gw;
        }
        rows.push(row);
    }
    let mags: Vec<f64> = grid.iter().map(|&w| spec.magnitude(w)).collect();
    let base = SampledProblem::new(grid.clone(), rows, targets(spec, theta0))?;
    let remez: RemezOptions = opts.sharpen.remez;

    let mut theta = theta0.clone();
    let mut trace = MagSharpenTrace::default();
    let mut f_prev: Option<Vec<f64>> = None;
    let mut last_remez = RemezTrace::default();
    let mut small_changes = 0;
    for _ in 0..opts.max_iter {
        let problem = base.with_target(targets(spec, &theta))?;
        let out = remez_first_sampled(&problem, &remez)?;
        let mut f = out.solution.f;
        let mut delta = out.continuum_delta;
        if let Some(prev) = &f_prev {
            let d_prev = problem.deviation(prev);
            if d_prev <= delta {
                f = prev.clone();
                delta = d_prev;
            }
        }
        last_remez = out.trace;
        let mag_err = (0..grid.len())
            .map(|i| (mags[i] - problem.approximant(&f, i).norm()).abs())
            .fold(0.0, f64::max);
        let next = phase_projection(&f, g, &grid, Some(&theta))?;
        let prev_delta = trace.deltas.last().copied();
        trace.deltas.push(delta);
        trace.magnitude_errors.push(mag_err);
        trace.coeffs.push(f.clone());
        f_prev = Some(f);
        if next == theta {
            trace.converged = true;
            break;
        }
        theta = next;
        if let Some(p) = prev_delta {
            if (p - delta).abs() < opts.tol * delta.max(f64::MIN_POSITIVE) {
                small_changes += 1;
            } else {
                small_changes = 0;
            }
        }
        if small_changes >= 3 {
            trace.converged = true;
            break;
        }
    }
    let first = trace.deltas[0];
    let last = *trace.deltas.last().expect("at least one iteration");
    trace.no_descent = first - last <= opts.tol * first;

    let f = RealPolynomial::new(f_prev.expect("at least one iteration"));
    let result = SharpenResult {
        delta: *trace
            .magnitude_errors
            .last()
            .expect("at least one iteration"),
        composed: g.compose(&f),
        f,
        trace: last_remez,
    };
    Ok((result, trace))
}

/// Runs `restarts` independent random initial phases in parallel. Restart `i`
/// draws its phase from a ChaCha stream keyed by `(seed, i)`.
pub fn sharpen_magnitude_restarts(
    g: &dyn Subfilter,
    spec: &BandSpec,
    k: usize,
    restarts: usize,
    seed: u64,
    opts: &MagSharpenOptions,
) -> Result<Vec<(SharpenResult, MagSharpenTrace)>> {
    let grid = working_grid(spec, opts.sharpen.grid_density);
    (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let theta0 = random_phase(g, k, &grid, &mut rng)?;
            sharpen_magnitude(g, spec, k, &theta0, opts)
        })
        .collect()
}

/// Index of the run with the smallest final magnitude error.
pub fn best_run(runs: &[(SharpenResult, MagSharpenTrace)]) -> Option<usize> {
    runs.iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.delta.total_cmp(&b.1 .0.delta))
        .map(|(i, _)| i)
}
