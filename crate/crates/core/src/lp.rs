//! Dense revised simplex for small standard-form linear programs
//!
//! ```text
//! minimize c·x  subject to  A x = b,  x ≥ 0
//! ```
//!
//! The problems solved here have few rows (one per unknown of a minimax fit,
//! plus one) and many columns (one per linearized constraint of the minimax
//! primal), so the basis inverse is kept as an explicit dense `m×m` matrix and
//! columns can be appended between solves. Appending columns keeps the current
//! basis primal feasible, which makes the next solve a warm start.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const OPT_TOL: f64 = 1e-11;

/// Reduced cost `c − π·a` and the magnitude of its terms, so that round-off
/// in large multipliers is not mistaken for an improving direction.
fn reduced_cost(c: f64, pi: &[f64], col: &[f64]) -> (f64, f64) {
    let mut dot = 0.0;
    let mut scale = 1.0 + c.abs();
    for (p, a) in pi.iter().zip(col) {
        dot += p * a;
        scale += (p * a).abs();
    }
    (c - dot, scale)
}
const REFACTOR_EVERY: usize = 50;
const DEGENERATE_RUN_FOR_BLAND: usize = 30;

/// Optimal basic solution of a standard-form LP.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Simplex multipliers `π` with `c_j - π·A_j ≥ 0` at optimum.
    pub duals: Vec<f64>,
}

/// Solves `min c·x` s.t. `A x = b`, `x ≥ 0` with `A` given by rows.
pub fn lp_simplex(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::InvalidInput(format!(
            "{} constraint rows but {} right-hand sides",
            m,
            b.len()
        )));
    }
    let n = c.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("ragged constraint matrix".into()));
    }
    let mut lp = RevisedSimplex::new(b.to_vec());
    let mut col = vec![0.0; m];
    for j in 0..n {
        for (i, row) in a.iter().enumerate() {
            col[i] = row[j];
        }
        lp.add_column(&col, c[j]);
    }
    lp.solve()?;
    Ok(LpSolution {
        x: lp.primal(),
        objective: lp.objective(),
        duals: lp.duals(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Structural(usize),
    Artificial(usize),
}

/// Revised simplex state that survives column additions.
#[derive(Debug, Clone)]
pub(crate) struct RevisedSimplex {
    m: usize,
    row_sign: Vec<f64>,
    rhs: Vec<f64>,
    /// Column-major structural columns, already multiplied by `row_sign`.
    cols: Vec<f64>,
    cost: Vec<f64>,
    is_basic: Vec<bool>,
    basis: Vec<Var>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots_since_refactor: usize,
}

impl RevisedSimplex {
    pub(crate) fn new(rhs: Vec<f64>) -> Self {
        let m = rhs.len();
        let row_sign: Vec<f64> = rhs
            .iter()
            .map(|&r| if r < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let rhs: Vec<f64> = rhs.iter().zip(&row_sign).map(|(r, s)| r * s).collect();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        Self {
            m,
            row_sign,
            xb: rhs.clone(),
            rhs,
            cols: Vec::new(),
            cost: Vec::new(),
            is_basic: Vec::new(),
            basis: (0..m).map(Var::Artificial).collect(),
            binv,
            pivots_since_refactor: 0,
        }
    }

    pub(crate) fn num_columns(&self) -> usize {
        self.cost.len()
    }

    pub(crate) fn add_column(&mut self, col: &[f64], cost: f64) -> usize {
        debug_assert_eq!(col.len(), self.m);
        self.cols
            .extend(col.iter().zip(&self.row_sign).map(|(a, s)| a * s));
        self.cost.push(cost);
        self.is_basic.push(false);
        self.cost.len() - 1
    }

    fn column(&self, j: usize) -> &[f64] {
        &self.cols[j * self.m..(j + 1) * self.m]
    }

    fn var_cost(&self, v: Var, phase_one: bool) -> f64 {
        match (v, phase_one) {
            (Var::Artificial(_), true) => 1.0,
            (Var::Artificial(_), false) => 0.0,
            (Var::Structural(_), true) => 0.0,
            (Var::Structural(j), false) => self.cost[j],
        }
    }

    fn multipliers(&self, phase_one: bool) -> Vec<f64> {
        let m = self.m;
        let mut pi = vec![0.0; m];
        for (r, &v) in self.basis.iter().enumerate() {
            let cb = self.var_cost(v, phase_one);
            if cb != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (p, b) in pi.iter_mut().zip(row) {
                    *p += cb * b;
                }
            }
        }
        pi
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|r| {
                self.binv[r * m..(r + 1) * m]
                    .iter()
                    .zip(col)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(v, _)| matches!(v, Var::Artificial(_)))
            .map(|(_, x)| x.max(0.0))
            .sum()
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        // Gauss-Jordan on [B | I].
        let mut b = vec![0.0; m * m];
        for (r, &v) in self.basis.iter().enumerate() {
            match v {
                Var::Artificial(i) => b[i * m + r] = 1.0,
                Var::Structural(j) => {
                    let col = &self.cols[j * m..(j + 1) * m];
                    for i in 0..m {
                        b[i * m + r] = col[i];
                    }
                }
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let (p, pval) = (k..m)
                .map(|i| (i, b[i * m + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pval < 1e-14 {
                return Err(Error::InvalidInput("singular simplex basis".into()));
            }
            if p != k {
                for c in 0..m {
                    b.swap(k * m + c, p * m + c);
                    inv.swap(k * m + c, p * m + c);
                }
            }
            let d = b[k * m + k];
            for c in 0..m {
                b[k * m + c] /= d;
                inv[k * m + c] /= d;
            }
            for i in 0..m {
                if i != k {
                    let f = b[i * m + k];
                    if f != 0.0 {
                        for c in 0..m {
                            b[i * m + c] -= f * b[k * m + c];
                            inv[i * m + c] -= f * inv[k * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.xb = self.ftran(&self.rhs.clone());
        self.pivots_since_refactor = 0;
        Ok(())
    }

    #[allow(clippy::needless_range_loop)]
    fn pivot(&mut self, r: usize, q: usize, w: &[f64]) {
        let m = self.m;
        let theta = self.xb[r].max(0.0) / w[r];
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * w[i];
            }
        }
        self.xb[r] = theta;
        let wr = w[r];
        for c in 0..m {
            self.binv[r * m + c] /= wr;
        }
        for i in 0..m {
            if i != r && w[i] != 0.0 {
                let f = w[i];
                for c in 0..m {
                    self.binv[i * m + c] -= f * self.binv[r * m + c];
                }
            }
        }
        if let Var::Structural(j) = self.basis[r] {
            self.is_basic[j] = false;
        }
        self.basis[r] = Var::Structural(q);
        self.is_basic[q] = true;
        self.pivots_since_refactor += 1;
    }

    fn run_phase(&mut self, phase_one: bool) -> Result<()> {
        let max_pivots = 50 * (self.m + self.num_columns()) + 1000;
        let mut degenerate_run = 0usize;
        for _ in 0..max_pivots {
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let bland = degenerate_run >= DEGENERATE_RUN_FOR_BLAND;
            let pi = self.multipliers(phase_one);
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.num_columns() {
                if self.is_basic[j] {
                    continue;
                }
                let cj = if phase_one { 0.0 } else { self.cost[j] };
                let (d, scale) = reduced_cost(cj, &pi, self.column(j));
                if d < -OPT_TOL * scale {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d < best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };
            let w = self.ftran(self.column(q));

            // Artificials sitting at zero in phase two must leave before they
            // could be driven positive or negative.
            let mut leaving: Option<(usize, f64)> = None;
            if !phase_one {
                for (r, &v) in self.basis.iter().enumerate() {
                    if matches!(v, Var::Artificial(_)) && w[r].abs() > PIVOT_TOL {
                        leaving = Some((r, 0.0));
                        break;
                    }
                }
            }
            if leaving.is_none() {
                let mut best_ratio = f64::INFINITY;
                for r in 0..self.m {
                    if w[r] > PIVOT_TOL {
                        let ratio = self.xb[r].max(0.0) / w[r];
                        let better = match leaving {
                            None => true,
                            Some((lr, _)) => {
                                if ratio < best_ratio - 1e-14 {
                                    true
                                } else if ratio <= best_ratio + 1e-14 {
                                    if bland {
                                        self.var_order(self.basis[r])
                                            < self.var_order(self.basis[lr])
                                    } else {
                                        w[r] > w[lr]
                                    }
                                } else {
                                    false
                                }
                            }
                        };
                        if better {
                            best_ratio = best_ratio.min(ratio);
                            leaving = Some((r, ratio));
                        }
                    }
                }
            }
            let Some((r, theta)) = leaving else {
                return Err(Error::Unbounded);
            };
            if theta <= 1e-13 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, &w);
        }
        Err(Error::NoConvergence {
            iterations: max_pivots,
        })
    }

    fn var_order(&self, v: Var) -> usize {
        match v {
            Var::Artificial(i) => i,
            Var::Structural(j) => self.m + j,
        }
    }

    fn drive_out_artificials(&mut self) -> Result<()> {
        for r in 0..self.m {
            if !matches!(self.basis[r], Var::Artificial(_)) {
                continue;
            }
            let m = self.m;
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.num_columns() {
                if self.is_basic[j] {
                    continue;
                }
                let v: f64 = row.iter().zip(self.column(j)).map(|(a, b)| a * b).sum();
                if v.abs() > 1e-9 && best.is_none_or(|(_, b)| v.abs() > b.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((q, _)) = best {
                let w = self.ftran(self.column(q));
                self.pivot(r, q, &w);
            }
        }
        self.refactor()
    }

    /// Continues from the current basis to an optimum of the current column set.
    pub(crate) fn solve(&mut self) -> Result<()> {
        let feas_tol = 1e-9 * self.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        if self.infeasibility() > feas_tol {
            self.run_phase(true)?;
            self.refactor()?;
            if self.infeasibility() > feas_tol {
                return Err(Error::Infeasible);
            }
            self.drive_out_artificials()?;
        }
        // Re-verify optimality against a freshly factored basis.
        for _ in 0..5 {
            self.run_phase(false)?;
            self.refactor()?;
            if self.is_optimal() {
                return Ok(());
            }
        }
        Ok(())
    }

    fn is_optimal(&self) -> bool {
        let pi = self.multipliers(false);
        (0..self.num_columns()).all(|j| {
            let (d, scale) = reduced_cost(self.cost[j], &pi, self.column(j));
            self.is_basic[j] || d >= -OPT_TOL * scale
        })
    }

    pub(crate) fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.num_columns()];
        for (r, &v) in self.basis.iter().enumerate() {
            if let Var::Structural(j) = v {
                x[j] = self.xb[r].max(0.0);
            }
        }
        x
    }

    pub(crate) fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .map(|(&v, &x)| self.var_cost(v, false) * x)
            .sum()
    }

    /// Multipliers for the rows as originally given (before sign flips).
    pub(crate) fn duals(&self) -> Vec<f64> {
        self.multipliers(false)
            .iter()
            .zip(&self.row_sign)
            .map(|(p, s)| p * s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        // min x s.t. x - s = 3, x, s ≥ 0
        let sol = lp_simplex(&[vec![1.0, -1.0]], &[3.0], &[1.0, 0.0]).unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
        assert!((sol.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_rows_give_same_optimum() {
        // min -x - y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]];
        let b = vec![4.0, 6.0];
        let c = vec![-1.0, -1.0, 0.0, 0.0];
        let base = lp_simplex(&a, &b, &c).unwrap();
        let mut a2 = a.clone();
        a2.push(a[0].clone());
        a2.push(a[1].clone());
        let mut b2 = b.clone();
        b2.extend_from_slice(&b);
        let dup = lp_simplex(&a2, &b2, &c).unwrap();
        assert!((base.objective - dup.objective).abs() < 1e-12);
        assert!((base.objective + 2.8).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x + y = -1 with x, y ≥ 0
        assert_eq!(
            lp_simplex(&[vec![1.0, 1.0]], &[-1.0], &[0.0, 0.0]).unwrap_err(),
            Error::Infeasible
        );
        // min -x s.t. x - y = 0
        assert_eq!(
            lp_simplex(&[vec![1.0, -1.0]], &[0.0], &[-1.0, 0.0]).unwrap_err(),
            Error::Unbounded
        );
    }

    #[test]
    fn warm_start_after_adding_columns() {
        let mut lp = RevisedSimplex::new(vec![1.0]);
        lp.add_column(&[1.0], 5.0);
        lp.solve().unwrap();
        assert!((lp.objective() - 5.0).abs() < 1e-12);
        lp.add_column(&[2.0], 4.0);
        lp.solve().unwrap();
        assert!((lp.objective() - 2.0).abs() < 1e-12);
        assert!((lp.duals()[0] - 2.0).abs() < 1e-12);
    }
}
