//! First Algorithm of Remez: minimax approximation on a compact set by
//! repeatedly solving the discrete problem on a reference set and adding the
//! point of largest deviation.
//!
//! Unlike the classical exchange algorithm this needs neither the Haar
//! condition nor real-valued data: the discrete subproblem is handled by
//! [`crate::minimax`], which accepts complex basis values with real
//! coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::minimax::{IncrementalMinimax, MinimaxSolution, RankTracker, DEFAULT_FACETS};

/// Default grid density: 4096 points per π of frequency.
pub const DEFAULT_GRID_DENSITY: f64 = 4096.0 / PI;

const GOLDEN_STEPS: usize = 20;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Union of closed intervals with a sampling density for the search grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSet {
    intervals: Vec<(f64, f64)>,
    grid_density: f64,
}

impl CompactSet {
    /// Sorts the intervals and merges overlapping ones.
    pub fn new(intervals: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut iv: Vec<(f64, f64)> = intervals.into_iter().collect();
        if iv.is_empty() {
            return Err(Error::InvalidInput(
                "compact set needs at least one interval".into(),
            ));
        }
        for &(lo, hi) in &iv {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
            }
        }
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for (lo, hi) in iv {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self {
            intervals: merged,
            grid_density: DEFAULT_GRID_DENSITY,
        })
    }

    pub fn with_grid_density(mut self, density: f64) -> Self {
        self.grid_density = density;
        self
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn grid_density(&self) -> f64 {
        self.grid_density
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Uniform samples of every interval, endpoints included. A degenerate
    /// interval contributes a single point.
    pub fn grid(&self) -> Vec<f64> {
        self.grid_with_segments().0
    }

    fn grid_with_segments(&self) -> (Vec<f64>, Vec<usize>) {
        let mut xs = Vec::new();
        let mut seg = Vec::new();
        for (s, &(lo, hi)) in self.intervals.iter().enumerate() {
            if hi == lo {
                xs.push(lo);
                seg.push(s);
                continue;
            }
            let n = (((hi - lo) * self.grid_density).ceil() as usize).max(1) + 1;
            for i in 0..n {
                let x = if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                };
                xs.push(x);
                seg.push(s);
            }
        }
        (xs, seg)
    }
}

/// A finite family of basis functions `U_0..U_K` of one real variable.
pub trait Basis: Sync {
    /// Number of functions, `K + 1`.
    fn len(&self) -> usize;

    fn eval_into(&self, x: f64, out: &mut [Complex64]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn eval(&self, x: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        self.eval_into(x, &mut out);
        out
    }
}

type BoxedFn = Box<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Basis given as an explicit list of functions.
pub struct BasisFamily {
    evaluators: Vec<BoxedFn>,
}

impl BasisFamily {
    pub fn new(evaluators: Vec<BoxedFn>) -> Self {
        Self { evaluators }
    }

    /// Number of the highest-indexed function, `K`.
    pub fn order(&self) -> usize {
        self.evaluators.len().saturating_sub(1)
    }
}

impl Basis for BasisFamily {
    fn len(&self) -> usize {
        self.evaluators.len()
    }

    fn eval_into(&self, x: f64, out: &mut [Complex64]) {
        for (o, e) in out.iter_mut().zip(&self.evaluators) {
            *o = e(x);
        }
    }
}

/// `U_k(x) = g(x)^k` for `k = 0..=order`.
pub struct PowerBasis<G> {
    order: usize,
    g: G,
}

impl<G: Fn(f64) -> Complex64 + Sync> PowerBasis<G> {
    pub fn new(order: usize, g: G) -> Self {
        Self { order, g }
    }
}

impl<G: Fn(f64) -> Complex64 + Sync> Basis for PowerBasis<G> {
    fn len(&self) -> usize {
        self.order + 1
    }

    fn eval_into(&self, x: f64, out: &mut [Complex64]) {
        let gx = (self.g)(x);
        let mut acc = Complex64::new(1.0, 0.0);
        for o in out.iter_mut() {
            *o = acc;
            acc *= gx;
        }
    }
}

/// Monomials `1, x, …, x^order`.
pub fn monomial_basis(order: usize) -> PowerBasis<fn(f64) -> Complex64> {
    fn id(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }
    PowerBasis::new(order, id)
}

/// `cos(kx)` for `k = 0..=order`.
pub struct CosineBasis {
    order: usize,
}

impl CosineBasis {
    pub fn new(order: usize) -> Self {
        Self { order }
    }
}

impl Basis for CosineBasis {
    fn len(&self) -> usize {
        self.order + 1
    }

    fn eval_into(&self, x: f64, out: &mut [Complex64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = Complex64::new((k as f64 * x).cos(), 0.0);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RemezOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Polygon facets for complex discrete subproblems.
    pub facets: usize,
}

impl Default for RemezOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            facets: DEFAULT_FACETS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemezIteration {
    pub reference_size: usize,
    pub discrete_delta: f64,
    pub continuum_delta: f64,
    pub new_point: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RemezTrace {
    pub iterations: Vec<RemezIteration>,
    pub converged: bool,
}

impl RemezTrace {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct RemezOutcome {
    /// Coefficients of the iterate with the smallest continuum deviation.
    /// `solution.delta` is that iterate's maximum deviation on its reference set.
    pub solution: MinimaxSolution,
    /// Maximum deviation of `solution.f` over the whole set.
    pub continuum_delta: f64,
    pub reference: Vec<f64>,
    pub trace: RemezTrace,
}

impl RemezOutcome {
    /// Turns a run that hit `max_iter` into [`Error::NoConvergence`].
    pub fn require_converged(self) -> Result<Self> {
        if self.trace.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.trace.len(),
            })
        }
    }
}

/// Basis and target values sampled on a finite point set.
#[derive(Debug, Clone)]
pub struct SampledProblem {
    xs: Vec<f64>,
    segments: Vec<usize>,
    k1: usize,
    u: Vec<Complex64>,
    d: Vec<Complex64>,
}

impl SampledProblem {
    /// Rows of `basis` values, one per point in `xs`.
    pub fn new(xs: Vec<f64>, rows: Vec<Vec<Complex64>>, d: Vec<Complex64>) -> Result<Self> {
        if xs.len() != rows.len() || xs.len() != d.len() || xs.is_empty() {
            return Err(Error::InvalidInput("sampled problem shape mismatch".into()));
        }
        let k1 = rows[0].len();
        if k1 == 0 || rows.iter().any(|r| r.len() != k1) {
            return Err(Error::InvalidInput("ragged basis rows".into()));
        }
        let segments = vec![0; xs.len()];
        Ok(Self {
            xs,
            segments,
            k1,
            u: rows.into_iter().flatten().collect(),
            d,
        })
    }

    pub fn from_basis(
        basis: &dyn Basis,
        target: &(dyn Fn(f64) -> Complex64 + Sync),
        set: &CompactSet,
    ) -> Self {
        let (xs, segments) = set.grid_with_segments();
        let k1 = basis.len();
        let rows: Vec<(Vec<Complex64>, Complex64)> =
            xs.par_iter().map(|&x| (basis.eval(x), target(x))).collect();
        let mut u = Vec::with_capacity(xs.len() * k1);
        let mut d = Vec::with_capacity(xs.len());
        for (row, t) in rows {
            u.extend(row);
            d.push(t);
        }
        Self {
            xs,
            segments,
            k1,
            u,
            d,
        }
    }

    /// Same points and basis, new target values.
    pub fn with_target(&self, d: Vec<Complex64>) -> Result<Self> {
        if d.len() != self.xs.len() {
            return Err(Error::InvalidInput("target length mismatch".into()));
        }
        Ok(Self { d, ..self.clone() })
    }

    pub fn points(&self) -> &[f64] {
        &self.xs
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.d
    }

    pub fn num_unknowns(&self) -> usize {
        self.k1
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.u[i * self.k1..(i + 1) * self.k1]
    }

    pub fn is_real(&self) -> bool {
        self.u.iter().chain(&self.d).all(|z| z.im == 0.0)
    }

    pub fn approximant(&self, f: &[f64], i: usize) -> Complex64 {
        self.row(i).iter().zip(f).map(|(u, c)| u * c).sum()
    }

    pub fn residual(&self, f: &[f64], i: usize) -> Complex64 {
        self.d[i] - self.approximant(f, i)
    }

    pub fn residual_moduli(&self, f: &[f64]) -> Vec<f64> {
        (0..self.xs.len())
            .map(|i| self.residual(f, i).norm())
            .collect()
    }

    /// Maximum residual modulus over the sampled points.
    pub fn deviation(&self, f: &[f64]) -> f64 {
        self.residual_moduli(f).into_iter().fold(0.0, f64::max)
    }

    fn scale(&self) -> f64 {
        self.d
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(self.u.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}

/// Continuous evaluators used to polish grid maxima.
#[derive(Clone, Copy)]
struct Polisher<'a> {
    basis: &'a dyn Basis,
    target: &'a (dyn Fn(f64) -> Complex64 + Sync),
}

impl Polisher<'_> {
    fn deviation_at(&self, f: &[f64], x: f64) -> (f64, Vec<Complex64>, Complex64) {
        let row = self.basis.eval(x);
        let t = (self.target)(x);
        let r = t - row.iter().zip(f).map(|(u, c)| u * c).sum::<Complex64>();
        let v = r.norm();
        (if v.is_finite() { v } else { -1.0 }, row, t)
    }
}

fn golden_max(mut a: f64, mut b: f64, eval: impl Fn(f64) -> f64) -> (f64, f64) {
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
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

struct WorstPoint {
    x: f64,
    dev: f64,
    row: Vec<Complex64>,
    target: Complex64,
}

fn worst_point(problem: &SampledProblem, f: &[f64], polish: Option<Polisher<'_>>) -> WorstPoint {
    let dev = problem.residual_moduli(f);
    let (imax, &gmax) =
        dev.iter().enumerate().fold(
            (0, &f64::NEG_INFINITY),
            |a, b| if *b.1 > *a.1 { b } else { a },
        );
    let mut best = WorstPoint {
        x: problem.xs[imax],
        dev: gmax,
        row: problem.row(imax).to_vec(),
        target: problem.d[imax],
    };
    let Some(pol) = polish else {
        return best;
    };
    let n = dev.len();
    let same_seg = |i: usize, j: usize| problem.segments[i] == problem.segments[j];
    for i in 0..n {
        let left = i > 0 && same_seg(i - 1, i);
        let right = i + 1 < n && same_seg(i, i + 1);
        if !(left || right) {
            continue;
        }
        let is_local_max = (!left || dev[i] >= dev[i - 1]) && (!right || dev[i] >= dev[i + 1]);
        if !is_local_max || dev[i] < 0.5 * gmax {
            continue;
        }
        let a = if left {
            problem.xs[i - 1]
        } else {
            problem.xs[i]
        };
        let b = if right {
            problem.xs[i + 1]
        } else {
            problem.xs[i]
        };
        let (x, v) = golden_max(a, b, |x| pol.deviation_at(f, x).0);
        if v > best.dev {
            let (v, row, t) = pol.deviation_at(f, x);
            best = WorstPoint {
                x,
                dev: v,
                row,
                target: t,
            };
        }
    }
    best
}

/// Location and value of the largest deviation of `Σ f_k U_k` from `target`
/// over `set`: a grid scan followed by golden-section refinement around each
/// significant grid maximum.
pub fn argmax_deviation(
    f: &[f64],
    basis: &dyn Basis,
    target: &(dyn Fn(f64) -> Complex64 + Sync),
    set: &CompactSet,
) -> (f64, f64) {
    let problem = SampledProblem::from_basis(basis, target, set);
    let w = worst_point(&problem, f, Some(Polisher { basis, target }));
    (w.x, w.dev)
}

/// Residuals at the local maxima of `|D − Σ f_k U_k|` over `set` whose modulus
/// is at least `threshold`, in increasing order of `x`. Each grid maximum is
/// refined by golden-section search.
pub fn extremal_points(
    f: &[f64],
    basis: &dyn Basis,
    target: &(dyn Fn(f64) -> Complex64 + Sync),
    set: &CompactSet,
    threshold: f64,
) -> Vec<(f64, Complex64)> {
    let problem = SampledProblem::from_basis(basis, target, set);
    let pol = Polisher { basis, target };
    let dev = problem.residual_moduli(f);
    let n = dev.len();
    let mut out = Vec::new();
    for i in 0..n {
        let left = i > 0 && problem.segments[i - 1] == problem.segments[i];
        let right = i + 1 < n && problem.segments[i + 1] == problem.segments[i];
        let is_local_max = (!left || dev[i] >= dev[i - 1]) && (!right || dev[i] > dev[i + 1]);
        if !is_local_max {
            continue;
        }
        let mut x = problem.xs[i];
        let mut v = dev[i];
        if left || right {
            let a = if left { problem.xs[i - 1] } else { x };
            let b = if right { problem.xs[i + 1] } else { x };
            let (xp, vp) = golden_max(a, b, |x| pol.deviation_at(f, x).0);
            if vp > v {
                x = xp;
                v = vp;
            }
        }
        if v >= threshold {
            let row = basis.eval(x);
            let r = target(x) - row.iter().zip(f).map(|(u, c)| u * c).sum::<Complex64>();
            out.push((x, r));
        }
    }
    out
}

/// Initial reference set: `K + 2` grid points spread over the intervals in
/// proportion to their lengths, then augmented until the basis rows have full
/// column rank.
fn initial_reference(problem: &SampledProblem) -> Result<Vec<usize>> {
    let n = problem.xs.len();
    let k1 = problem.k1;
    let want = (k1 + 1).min(n);

    let mut segs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        match segs.last_mut() {
            Some(s) if problem.segments[s.0] == problem.segments[i] => s.1 = i + 1,
            _ => segs.push((i, i + 1)),
        }
    }
    let lengths: Vec<f64> = segs
        .iter()
        .map(|&(a, b)| problem.xs[b - 1] - problem.xs[a])
        .collect();
    let total: f64 = lengths.iter().sum();
    let weights: Vec<f64> = if total > 0.0 {
        lengths.iter().map(|l| l / total).collect()
    } else {
        segs.iter()
            .map(|&(a, b)| (b - a) as f64 / n as f64)
            .collect()
    };
    let quotas: Vec<f64> = weights.iter().map(|w| w * want as f64).collect();
    let mut counts: Vec<usize> = segs
        .iter()
        .zip(&quotas)
        .map(|(&(a, b), q)| (q.floor() as usize).min(b - a))
        .collect();
    let mut remaining = want - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = quotas[i] - quotas[i].floor();
        let rj = quotas[j] - quotas[j].floor();
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    while remaining > 0 {
        let mut progressed = false;
        for &s in &order {
            if remaining == 0 {
                break;
            }
            if counts[s] < segs[s].1 - segs[s].0 {
                counts[s] += 1;
                remaining -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }

    let mut chosen: Vec<usize> = Vec::with_capacity(want);
    for (&(a, b), &c) in segs.iter().zip(&counts) {
        let len = b - a;
        match c {
            0 => {}
            1 => chosen.push(a + (len - 1) / 2),
            _ => {
                for j in 0..c {
                    let off = ((j * (len - 1)) as f64 / (c - 1) as f64).round() as usize;
                    chosen.push(a + off);
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen.dedup();

    let mut tracker = RankTracker::new(k1);
    for &i in &chosen {
        tracker.add(problem.row(i));
    }
    if !tracker.is_full() {
        // Greedy augmentation in a low-discrepancy order over the grid.
        let mut taken = vec![false; n];
        chosen.iter().for_each(|&i| taken[i] = true);
        for j in 0..n {
            if tracker.is_full() {
                break;
            }
            let i = ((j as f64 * INV_PHI).fract() * n as f64) as usize % n;
            if !taken[i] && tracker.add(problem.row(i)) {
                taken[i] = true;
                chosen.push(i);
            }
        }
        for (i, t) in taken.iter_mut().enumerate() {
            if tracker.is_full() {
                break;
            }
            if !*t && tracker.add(problem.row(i)) {
                *t = true;
                chosen.push(i);
            }
        }
    }
    if !tracker.is_full() {
        return Err(Error::RankDeficient {
            rank: tracker.rank(),
            needed: k1,
        });
    }
    Ok(chosen)
}

fn run(
    problem: &SampledProblem,
    polish: Option<Polisher<'_>>,
    opts: &RemezOptions,
) -> Result<RemezOutcome> {
    let real = problem.is_real();
    let reference_idx = initial_reference(problem)?;
    let mut solver = IncrementalMinimax::new(problem.k1, real, opts.facets);
    let mut reference: Vec<f64> = Vec::new();
    for &i in &reference_idx {
        solver.add_point(problem.row(i).to_vec(), problem.d[i]);
        reference.push(problem.xs[i]);
    }
    let abs_floor = 1e-13 * problem.scale().max(f64::MIN_POSITIVE);

    let mut trace = RemezTrace::default();
    let mut best: Option<(MinimaxSolution, f64, Vec<f64>)> = None;
    let mut prev_delta: Option<f64> = None;
    for _ in 0..opts.max_iter {
        let sol = solver.solve()?;
        let worst = worst_point(problem, &sol.f, polish);
        trace.iterations.push(RemezIteration {
            reference_size: solver.num_points(),
            discrete_delta: sol.delta,
            continuum_delta: worst.dev,
            new_point: worst.x,
        });
        let gap = worst.dev - sol.delta;
        let gap_ok = gap <= opts.tol * sol.delta + abs_floor;
        let change_ok =
            prev_delta.is_none_or(|p| (sol.delta - p).abs() <= opts.tol * sol.delta + abs_floor);
        let duplicate = reference.contains(&worst.x);
        prev_delta = Some(sol.delta);
        if best.as_ref().is_none_or(|b| worst.dev < b.1) {
            best = Some((sol, worst.dev, reference.clone()));
        }
        if gap_ok && change_ok {
            trace.converged = true;
            break;
        }
        if duplicate {
            // The worst point is already a reference point, so the discrete
            // solution is optimal on the sampled set up to round-off.
            trace.converged = gap <= 10.0 * opts.tol * worst.dev + abs_floor;
            break;
        }
        solver.add_point(worst.row, worst.target);
        reference.push(worst.x);
    }
    let (solution, continuum_delta, reference) = best.expect("max_iter must be at least one");
    Ok(RemezOutcome {
        solution,
        continuum_delta,
        reference,
        trace,
    })
}

/// Minimax fit of `target` by `Σ f_k U_k` with real `f` over the compact set.
pub fn remez_first(
    basis: &dyn Basis,
    target: &(dyn Fn(f64) -> Complex64 + Sync),
    set: &CompactSet,
    opts: &RemezOptions,
) -> Result<RemezOutcome> {
    if opts.max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be positive".into()));
    }
    let problem = SampledProblem::from_basis(basis, target, set);
    run(&problem, Some(Polisher { basis, target }), opts)
}

/// Same algorithm with the compact set replaced by a finite point set; the
/// worst point is searched over the samples only.
pub fn remez_first_sampled(problem: &SampledProblem, opts: &RemezOptions) -> Result<RemezOutcome> {
    if opts.max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be positive".into()));
    }
    run(problem, None, opts)
}
