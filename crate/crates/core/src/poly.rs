//! Real polynomials, rational transfer functions in z⁻¹, and the composition
//! operations between them.
//!
//! Every coefficient vector in this crate is stored in ascending powers: for a
//! [`RealPolynomial`] `coeffs[k]` multiplies `x^k`, and for a
//! [`TransferFunction`] `num[k]`/`den[k]` multiply `z^-k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

/// Absolute per-coefficient tolerance for even-symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Modulus below which a denominator is treated as vanishing.
pub const POLE_TOL: f64 = 1e-12;

fn trim(mut coeffs: Vec<f64>) -> Vec<f64> {
    while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        coeffs.push(0.0);
    }
    coeffs
}

/// Coefficient-wise product of two ascending coefficient vectors.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![0.0];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn add_into(acc: &mut Vec<f64>, other: &[f64], scale: f64) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0.0);
    }
    for (a, &b) in acc.iter_mut().zip(other) {
        *a += scale * b;
    }
}

/// Horner evaluation of an ascending coefficient slice.
pub fn horner(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn horner_real(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// A polynomial with real coefficients in ascending powers.
#[derive(Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Builds a polynomial, trimming exact trailing zeros. An empty vector is
    /// the zero polynomial.
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs: trim(coeffs),
        }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn identity() -> Self {
        Self::monomial(1)
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        horner(&self.coeffs, x)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        horner_real(&self.coeffs, x)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::constant(1.0);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// `self ∘ inner`, i.e. `self(inner(x))`.
    pub fn compose(&self, inner: &RealPolynomial) -> RealPolynomial {
        // Horner in the polynomial ring.
        let mut acc = vec![self.leading()];
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = convolve(&acc, &inner.coeffs);
            acc[0] += c;
        }
        Self::new(acc)
    }

    /// Coefficients zero-padded (or truncated) to exactly `len` entries.
    pub fn padded(&self, len: usize) -> Vec<f64> {
        let mut v = self.coeffs.clone();
        v.resize(len, 0.0);
        v
    }
}

impl fmt::Debug for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealPolynomial{:?}", self.coeffs)
    }
}

impl From<Vec<f64>> for RealPolynomial {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl From<&[f64]> for RealPolynomial {
    fn from(v: &[f64]) -> Self {
        Self::new(v.to_vec())
    }
}

impl Add for &RealPolynomial {
    type Output = RealPolynomial;
    fn add(self, rhs: Self) -> RealPolynomial {
        let mut out = self.coeffs.clone();
        add_into(&mut out, &rhs.coeffs, 1.0);
        RealPolynomial::new(out)
    }
}

impl Sub for &RealPolynomial {
    type Output = RealPolynomial;
    fn sub(self, rhs: Self) -> RealPolynomial {
        let mut out = self.coeffs.clone();
        add_into(&mut out, &rhs.coeffs, -1.0);
        RealPolynomial::new(out)
    }
}

impl Mul for &RealPolynomial {
    type Output = RealPolynomial;
    fn mul(self, rhs: Self) -> RealPolynomial {
        RealPolynomial::new(convolve(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &RealPolynomial {
    type Output = RealPolynomial;
    fn neg(self) -> RealPolynomial {
        self.scale(-1.0)
    }
}

pub fn eval_poly(p: &RealPolynomial, x: ComplexValue) -> ComplexValue {
    p.eval(x)
}

pub fn compose_poly(f: &RealPolynomial, g: &RealPolynomial) -> RealPolynomial {
    f.compose(g)
}

/// Rational transfer function `num(z⁻¹) / den(z⁻¹)` with `den[0] = 1`.
#[derive(Clone, PartialEq)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl TransferFunction {
    /// Normalizes so that `den[0] == 1`. Exact trailing zeros are trimmed from
    /// both vectors.
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        let den = trim(den);
        let d0 = den[0];
        if d0 == 0.0 || !d0.is_finite() {
            return Err(Error::InvalidInput(
                "leading denominator coefficient must be nonzero".into(),
            ));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self {
            num: trim(num).into_iter().map(|c| c / d0).collect(),
            den: den.into_iter().map(|c| c / d0).collect(),
        })
    }

    pub fn fir(h: Vec<f64>) -> Self {
        Self {
            num: trim(h),
            den: vec![1.0],
        }
    }

    pub fn identity() -> Self {
        Self::fir(vec![1.0])
    }

    /// `z^-n`.
    pub fn delay(n: usize) -> Self {
        let mut h = vec![0.0; n + 1];
        h[n] = 1.0;
        Self::fir(h)
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn is_fir(&self) -> bool {
        self.den.len() == 1
    }

    /// `G(e^{jω})`.
    pub fn response(&self, omega: f64) -> Result<Complex64> {
        let z_inv = Complex64::from_polar(1.0, -omega);
        let d = horner(&self.den, z_inv);
        if d.norm() < POLE_TOL {
            return Err(Error::PoleOnUnitCircle { omega });
        }
        Ok(horner(&self.num, z_inv) / d)
    }

    /// Series connection.
    pub fn cascade(&self, other: &TransferFunction) -> TransferFunction {
        TransferFunction {
            num: trim(convolve(&self.num, &other.num)),
            den: trim(convolve(&self.den, &other.den)),
        }
    }
}

impl fmt::Debug for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransferFunction")
            .field("num", &self.num)
            .field("den", &self.den)
            .finish()
    }
}

pub fn freq_response(g: &TransferFunction, omega: f64) -> Result<ComplexValue> {
    g.response(omega)
}

/// `F(G(z)) = Σ f_k num^k den^{K-k} / den^K` with `K = deg f`.
///
/// The denominator is exactly `den^K`; common factors are never cancelled, so
/// the pole set of the result is the pole set of `g` with multiplicity scaled
/// by `K`.
pub fn compose_tf(f: &RealPolynomial, g: &TransferFunction) -> TransferFunction {
    let k_max = f.degree();
    let mut num_pows = vec![vec![1.0]];
    let mut den_pows = vec![vec![1.0]];
    for k in 1..=k_max {
        num_pows.push(convolve(&num_pows[k - 1], &g.num));
        den_pows.push(convolve(&den_pows[k - 1], &g.den));
    }
    let mut num = vec![0.0];
    for (k, &fk) in f.coeffs().iter().enumerate() {
        if fk == 0.0 {
            continue;
        }
        add_into(&mut num, &convolve(&num_pows[k], &den_pows[k_max - k]), fk);
    }
    TransferFunction {
        num: trim(num),
        den: trim(den_pows.pop().unwrap_or_else(|| vec![1.0])),
    }
}

/// Polynomial in `cos ω`, ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevExpansion {
    coeffs: Vec<f64>,
}

impl ChebyshevExpansion {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs: trim(coeffs),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_polynomial(&self) -> RealPolynomial {
        RealPolynomial::new(self.coeffs.clone())
    }

    /// Evaluates `B(cos ω)`.
    pub fn eval_at_frequency(&self, omega: f64) -> f64 {
        horner_real(&self.coeffs, omega.cos())
    }
}

/// Returns the first index `n` where `h[n]` and `h[len-1-n]` differ by more
/// than [`SYMMETRY_TOL`].
pub fn check_even_symmetry(h: &[f64]) -> Result<()> {
    let n = h.len();
    for i in 0..n / 2 {
        let mismatch = (h[i] - h[n - 1 - i]).abs();
        if mismatch.is_nan() || mismatch > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { index: i, mismatch });
        }
    }
    Ok(())
}

/// Rewrites the zero-phase response of a length `2L+1` even-symmetric impulse
/// response as a polynomial in `cos ω`.
pub fn cos_power_expansion(h_shifted: &[f64], half_order: usize) -> Result<ChebyshevExpansion> {
    if h_shifted.len() != 2 * half_order + 1 {
        return Err(Error::DegreeMismatch(format!(
            "expected {} coefficients for half-order {}, got {}",
            2 * half_order + 1,
            half_order,
            h_shifted.len()
        )));
    }
    check_even_symmetry(h_shifted)?;
    let l = half_order;
    let two_x = RealPolynomial::new(vec![0.0, 2.0]);
    let mut t_prev = RealPolynomial::constant(1.0);
    let mut t_cur = RealPolynomial::identity();
    let mut acc = RealPolynomial::constant(h_shifted[l]);
    for n in 1..=l {
        if n > 1 {
            let next = &(&two_x * &t_cur) - &t_prev;
            t_prev = std::mem::replace(&mut t_cur, next);
        }
        acc = &acc + &t_cur.scale(2.0 * h_shifted[l + n]);
    }
    Ok(ChebyshevExpansion::new(acc.into_coeffs()))
}

/// Real zero-phase response `h[L] + Σ 2 h[L+n] cos nω` of an even-symmetric
/// impulse response of length `2L+1`.
pub fn zero_phase_response(h_shifted: &[f64], omega: f64) -> f64 {
    let l = h_shifted.len() / 2;
    let mut acc = h_shifted[l];
    for n in 1..=l {
        acc += 2.0 * h_shifted[l + n] * (n as f64 * omega).cos();
    }
    acc
}
