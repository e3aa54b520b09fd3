//! Discrete minimax fits with real coefficients:
//!
//! ```text
//! minimize_f  max_n | d_n - Σ_k f_k U_k(x_n) |
//! ```
//!
//! The epigraph program `min Δ` is solved through its LP dual, which has one
//! row per unknown plus one and one column per linear constraint. Real data
//! gives two constraints per point. Complex data is handled by an outer
//! polygon of `P` facets around every modulus constraint, followed by cuts at
//! the actual residual phases until the polygon is tight at the optimum.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lp::RevisedSimplex;

/// Default number of polygon facets per complex modulus constraint.
pub const DEFAULT_FACETS: usize = 64;

const RANK_TOL: f64 = 1e-10;
const MAX_CUT_ROUNDS: usize = 60;
const CUT_REL_TOL: f64 = 1e-11;

/// Finite minimax instance: one row of basis values per point.
#[derive(Debug, Clone)]
pub struct DiscreteInstance {
    u: Vec<Vec<Complex64>>,
    d: Vec<Complex64>,
}

impl DiscreteInstance {
    pub fn new(u: Vec<Vec<Complex64>>, d: Vec<Complex64>) -> Result<Self> {
        if u.len() != d.len() {
            return Err(Error::InvalidInput(format!(
                "{} basis rows but {} targets",
                u.len(),
                d.len()
            )));
        }
        let k1 = u.first().map_or(0, Vec::len);
        if k1 == 0 || u.iter().any(|row| row.len() != k1) {
            return Err(Error::InvalidInput(
                "basis rows must be non-empty and of equal length".into(),
            ));
        }
        if u.iter().flatten().chain(&d).any(|z| !z.is_finite()) {
            return Err(Error::InvalidInput("non-finite instance entry".into()));
        }
        Ok(Self { u, d })
    }

    /// Real-valued instance from real basis rows and targets.
    pub fn from_real(u: Vec<Vec<f64>>, d: Vec<f64>) -> Result<Self> {
        Self::new(
            u.into_iter()
                .map(|row| row.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
                .collect(),
            d.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.u
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.d
    }

    pub fn num_points(&self) -> usize {
        self.d.len()
    }

    pub fn num_unknowns(&self) -> usize {
        self.u[0].len()
    }

    pub fn is_real(&self) -> bool {
        self.u.iter().flatten().chain(&self.d).all(|z| z.im == 0.0)
    }

    pub fn residual(&self, f: &[f64], n: usize) -> Complex64 {
        residual(&self.u[n], self.d[n], f)
    }

    /// `max_n |d_n - Σ f_k U_{k,n}|`.
    pub fn deviation(&self, f: &[f64]) -> f64 {
        (0..self.num_points())
            .map(|n| self.residual(f, n).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn residual(u: &[Complex64], d: Complex64, f: &[f64]) -> Complex64 {
    d - u.iter().zip(f).map(|(uk, fk)| uk * fk).sum::<Complex64>()
}

/// Optimal coefficients of a discrete minimax fit.
#[derive(Debug, Clone)]
pub struct MinimaxSolution {
    pub f: Vec<f64>,
    /// Recomputed maximum residual modulus of `f` over the points.
    pub delta: f64,
    /// Optimal value of the linearized program; `lower_bound ≤ optimum ≤ delta`.
    pub lower_bound: f64,
    /// Points whose residual modulus is within `1e-8·delta` of `delta`.
    pub active_indices: Vec<usize>,
}

/// Incremental orthogonalization of real row vectors, used for the column
/// rank condition on a reference set.
#[derive(Debug, Clone)]
pub(crate) struct RankTracker {
    dim: usize,
    basis: Vec<Vec<f64>>,
}

impl RankTracker {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.basis.len()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.basis.len() == self.dim
    }

    fn add_real(&mut self, row: &[f64]) -> bool {
        if self.is_full() {
            return false;
        }
        let norm0 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            return false;
        }
        let mut v: Vec<f64> = row.iter().map(|x| x / norm0).collect();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for b in &self.basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > RANK_TOL {
            v.iter_mut().for_each(|x| *x /= norm);
            self.basis.push(v);
            true
        } else {
            false
        }
    }

    /// Adds the real and imaginary parts of a basis row. Returns whether the
    /// rank grew.
    pub(crate) fn add(&mut self, row: &[Complex64]) -> bool {
        let re: Vec<f64> = row.iter().map(|z| z.re).collect();
        let mut grew = self.add_real(&re);
        if row.iter().any(|z| z.im != 0.0) {
            let im: Vec<f64> = row.iter().map(|z| z.im).collect();
            grew |= self.add_real(&im);
        }
        grew
    }
}

/// Discrete minimax solver that accepts new points between solves.
#[derive(Debug, Clone)]
pub(crate) struct IncrementalMinimax {
    k1: usize,
    real: bool,
    facets: usize,
    lp: RevisedSimplex,
    u: Vec<Vec<Complex64>>,
    d: Vec<Complex64>,
}

impl IncrementalMinimax {
    pub(crate) fn new(num_unknowns: usize, real: bool, facets: usize) -> Self {
        let mut rhs = vec![0.0; num_unknowns + 1];
        rhs[num_unknowns] = 1.0;
        Self {
            k1: num_unknowns,
            real,
            facets,
            lp: RevisedSimplex::new(rhs),
            u: Vec::new(),
            d: Vec::new(),
        }
    }

    pub(crate) fn num_points(&self) -> usize {
        self.d.len()
    }

    /// Adds the constraint `Re{e^{jθ} (d - u·f)} ≤ Δ`, i.e. the dual column
    /// `[-Re(e^{jθ} u); 1]` with cost `-Re(e^{jθ} d)`.
    fn add_facet(&mut self, n: usize, theta: f64) {
        let rot = Complex64::from_polar(1.0, theta);
        let mut col: Vec<f64> = self.u[n].iter().map(|uk| -(rot * uk).re).collect();
        col.push(1.0);
        let cost = -(rot * self.d[n]).re;
        self.lp.add_column(&col, cost);
    }

    pub(crate) fn add_point(&mut self, u: Vec<Complex64>, d: Complex64) {
        debug_assert_eq!(u.len(), self.k1);
        self.u.push(u);
        self.d.push(d);
        let n = self.d.len() - 1;
        if self.real {
            self.add_facet(n, 0.0);
            self.add_facet(n, PI);
        } else {
            for p in 0..self.facets {
                self.add_facet(n, 2.0 * PI * p as f64 / self.facets as f64);
            }
        }
    }

    fn lp_solution(&self) -> (Vec<f64>, f64) {
        let pi = self.lp.duals();
        (pi[..self.k1].to_vec(), -pi[self.k1])
    }

    pub(crate) fn solve(&mut self) -> Result<MinimaxSolution> {
        self.lp.solve().map_err(|e| match e {
            Error::Infeasible | Error::Unbounded => Error::RankDeficient {
                rank: 0,
                needed: self.k1,
            },
            other => other,
        })?;
        let (mut f, mut bound) = self.lp_solution();
        if !self.real {
            for _ in 0..MAX_CUT_ROUNDS {
                let scale = bound.abs().max(1e-300);
                let mut added = false;
                for n in 0..self.num_points() {
                    let r = residual(&self.u[n], self.d[n], &f);
                    if r.norm() > bound + CUT_REL_TOL * scale + 1e-15 {
                        self.add_facet(n, -r.arg());
                        added = true;
                    }
                }
                if !added {
                    break;
                }
                self.lp.solve()?;
                (f, bound) = self.lp_solution();
            }
        }
        let residuals: Vec<f64> = (0..self.num_points())
            .map(|n| residual(&self.u[n], self.d[n], &f).norm())
            .collect();
        let delta = residuals.iter().copied().fold(0.0, f64::max);
        let active_indices = residuals
            .iter()
            .enumerate()
            .filter(|(_, &r)| r >= delta - 1e-8 * delta)
            .map(|(n, _)| n)
            .collect();
        Ok(MinimaxSolution {
            f,
            delta,
            lower_bound: bound.min(delta),
            active_indices,
        })
    }
}

fn check_instance(inst: &DiscreteInstance) -> Result<()> {
    let k1 = inst.num_unknowns();
    if inst.num_points() < k1 {
        return Err(Error::RankDeficient {
            rank: inst.num_points(),
            needed: k1,
        });
    }
    let mut tracker = RankTracker::new(k1);
    for row in &inst.u {
        tracker.add(row);
        if tracker.is_full() {
            return Ok(());
        }
    }
    Err(Error::RankDeficient {
        rank: tracker.rank(),
        needed: k1,
    })
}

fn solve_with(inst: &DiscreteInstance, real: bool, facets: usize) -> Result<MinimaxSolution> {
    check_instance(inst)?;
    let mut solver = IncrementalMinimax::new(inst.num_unknowns(), real, facets);
    for (u, &d) in inst.u.iter().zip(&inst.d) {
        solver.add_point(u.clone(), d);
    }
    solver.solve()
}

/// Minimax fit of real data; exact linear program.
pub fn solve_real(inst: &DiscreteInstance) -> Result<MinimaxSolution> {
    if !inst.is_real() {
        return Err(Error::InvalidInput(
            "solve_real called on an instance with imaginary parts".into(),
        ));
    }
    solve_with(inst, true, 2)
}

/// Minimax fit of complex data with real coefficients, starting from a
/// `facets`-sided outer polygon of every modulus constraint.
pub fn solve_complex(inst: &DiscreteInstance, facets: usize) -> Result<MinimaxSolution> {
    if facets < 8 {
        return Err(Error::InvalidInput(format!(
            "at least 8 facets required, got {facets}"
        )));
    }
    solve_with(inst, false, facets)
}

/// Dispatches to [`solve_real`] when every entry is real.
pub fn solve(inst: &DiscreteInstance) -> Result<MinimaxSolution> {
    if inst.is_real() {
        solve_real(inst)
    } else {
        solve_complex(inst, DEFAULT_FACETS)
    }
}

/// Relative slack `sec(π/P) - 1` of a `P`-facet outer polygon.
pub fn polygon_slack(facets: usize) -> f64 {
    1.0 / (PI / facets as f64).cos() - 1.0
}
