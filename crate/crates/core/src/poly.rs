//! Dense univariate polynomials over the rationals and the two parametric
//! polynomials `Q_m(t)` and `Q̂_m(t)` whose zeros become the new parameter
//! pairs of the transformed series.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use dashu_ratio::RBig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    c_coefficients, convolve, format_rational, int, pochhammer, serde_rational_vec, ParamPairs,
    Rational,
};
use crate::real::{self, Real};

/// Polynomial with exact rational coefficients in ascending degree order.
/// Trailing zeros are always stripped, so the zero polynomial has no
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalPolynomial {
    #[serde(with = "serde_rational_vec")]
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == RBig::ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(RBig::ONE)
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Self::new(vec![RBig::ZERO, RBig::ONE])
    }

    /// `(offset + sign·t)_n` expanded in powers of `t`.
    pub fn rising(offset: &Rational, sign: i64, n: usize) -> Self {
        let mut acc = vec![RBig::ONE];
        for i in 0..n {
            acc = convolve(&acc, &[offset + int(i as i64), int(sign)]);
        }
        Self::new(acc)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or(RBig::ZERO)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(RBig::ZERO, |acc, c| acc * t + c)
    }

    pub fn eval_real(&self, t: &Real, precision: usize) -> Real {
        let mut acc = real::zero(precision);
        for c in self.coeffs.iter().rev() {
            acc = acc * t + real::from_rational(c, precision);
        }
        acc
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().value()).collect()
    }

    /// Divides by `(1 - t/z)`, returning `None` unless `z ≠ 0` is an exact zero.
    pub fn divide_out_zero(&self, z: &Rational) -> Option<Self> {
        if *z == RBig::ZERO || self.is_zero() || self.eval(z) != RBig::ZERO {
            return None;
        }
        // synthetic division by (t - z), then rescale by -z
        let n = self.coeffs.len() - 1;
        let mut q = vec![RBig::ZERO; n];
        let mut carry = RBig::ZERO;
        for i in (1..=n).rev() {
            carry = &self.coeffs[i] + carry * z;
            q[i - 1] = carry.clone();
        }
        let scale = -z.clone();
        Some(Self::new(q).scale(&scale))
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == RBig::ZERO {
                continue;
            }
            let negative = *c < RBig::ZERO;
            let mag = if negative { -c.clone() } else { c.clone() };
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag == RBig::ONE;
            match i {
                0 => f.write_str(&format_rational(&mag))?,
                _ => {
                    if !unit {
                        write!(f, "{}*", format_rational(&mag))?;
                    }
                    f.write_str("t")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn add(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn sub(self, rhs: Self) -> RationalPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn mul(self, rhs: Self) -> RationalPolynomial {
        RationalPolynomial::new(convolve(&self.coeffs, &rhs.coeffs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("b equals f_j for pair {index}")]
    BEqualsF { index: usize },
    #[error("(c-b-m)_m vanishes")]
    CMinusBMinusMVanishes,
    #[error("(c-a-m)_m vanishes")]
    CMinusAMinusMVanishes,
    #[error("G_(m,k) requires 0 <= k <= m, got m={m}, k={k}")]
    IndexOutOfRange { m: usize, k: usize },
    #[error("a denominator Pochhammer factor of G_(m,k) vanishes")]
    GDenominatorVanishes,
}

/// `G_{m,k}(t)`: the terminating unit-argument series with numerators
/// `-m+k, t+k, c-a-b-m` and denominators `c-a-m+k, c-b-m+k`, as a polynomial
/// of degree `m-k` in `t`.
pub fn build_g(
    m: usize,
    k: usize,
    a: &Rational,
    b: &Rational,
    c: &Rational,
) -> Result<RationalPolynomial, PolyError> {
    if k > m {
        return Err(PolyError::IndexOutOfRange { m, k });
    }
    let mm = int(m as i64);
    let kk = int(k as i64);
    let top = &kk - &mm;
    let excess = c - a - b - &mm;
    let lower_a = c - a - &mm + &kk;
    let lower_b = c - b - &mm + &kk;
    let len = m - k;
    if pochhammer(&lower_a, len) == RBig::ZERO || pochhammer(&lower_b, len) == RBig::ZERO {
        return Err(PolyError::GDenominatorVanishes);
    }
    let mut acc = RationalPolynomial::zero();
    for i in 0..=len {
        let coef = pochhammer(&top, i) * pochhammer(&excess, i)
            / (pochhammer(&lower_a, i) * pochhammer(&lower_b, i) * pochhammer(&RBig::ONE, i));
        acc = &acc + &RationalPolynomial::rising(&kk, 1, i).scale(&coef);
    }
    Ok(acc)
}

fn check_b_not_f(pp: &ParamPairs, b: &Rational) -> Result<(), PolyError> {
    match pp.pairs().iter().position(|p| p.f == *b) {
        Some(index) => Err(PolyError::BEqualsF { index }),
        None => Ok(()),
    }
}

/// `Q_m(t) = (1/(λ)_m) Σ_k (b)_k C_k (t)_k (λ - t)_{m-k}` with `λ = c - b - m`.
///
/// The result satisfies `Q_m(0) = 1`. Its zeros are the `ξ` parameters of
/// the first Euler-type transformation and of the terminating Thomae-type
/// transformation. Independent of `a`.
pub fn build_q(pp: &ParamPairs, b: &Rational, c: &Rational) -> Result<RationalPolynomial, PolyError> {
    check_b_not_f(pp, b)?;
    let m = pp.total_offset();
    let lambda = c - b - int(m as i64);
    let norm = pochhammer(&lambda, m);
    if norm == RBig::ZERO {
        return Err(PolyError::CMinusBMinusMVanishes);
    }
    let cs = c_coefficients(pp);
    let mut acc = RationalPolynomial::zero();
    for (k, ck) in cs.iter().enumerate() {
        let coef = pochhammer(b, k) * ck;
        let term = &RationalPolynomial::rising(&RBig::ZERO, 1, k)
            * &RationalPolynomial::rising(&lambda, -1, m - k);
        acc = &acc + &term.scale(&coef);
    }
    Ok(acc.scale(&(RBig::ONE / norm)))
}

/// `Q̂_m(t) = Σ_k (-1)^k C_k (a)_k (b)_k (t)_k / ((c-a-m)_k (c-b-m)_k) · G_{m,k}(t)`.
///
/// Normalized so that `Q̂_m(0) = 1`; its zeros are the `η` parameters.
pub fn build_qhat(
    pp: &ParamPairs,
    a: &Rational,
    b: &Rational,
    c: &Rational,
) -> Result<RationalPolynomial, PolyError> {
    let m = pp.total_offset();
    let mm = int(m as i64);
    let ca = c - a - &mm;
    let cb = c - b - &mm;
    if pochhammer(&ca, m) == RBig::ZERO {
        return Err(PolyError::CMinusAMinusMVanishes);
    }
    if pochhammer(&cb, m) == RBig::ZERO {
        return Err(PolyError::CMinusBMinusMVanishes);
    }
    let cs = c_coefficients(pp);
    let mut acc = RationalPolynomial::zero();
    for (k, ck) in cs.iter().enumerate() {
        let sign = if k.is_multiple_of(2) { RBig::ONE } else { -RBig::ONE };
        let coef = sign * ck * pochhammer(a, k) * pochhammer(b, k)
            / (pochhammer(&ca, k) * pochhammer(&cb, k));
        let g = build_g(m, k, a, b, c)?;
        let term = &RationalPolynomial::rising(&RBig::ZERO, 1, k) * &g;
        acc = &acc + &term.scale(&coef);
    }
    Ok(acc)
}
