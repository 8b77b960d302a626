//! Extended-precision reals and the gamma function.
//!
//! `Real` is a binary arbitrary-precision float; precision is carried by each
//! value and arithmetic between values uses the larger of the two.
//! `ln Γ` is evaluated by the Stirling asymptotic series after shifting the
//! argument upward with an exact rational Pochhammer product, which also
//! yields the sign of `Γ` for negative non-integer arguments.

use std::sync::{Mutex, OnceLock};

use dashu_base::Abs;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use dashu_ratio::RBig;
use thiserror::Error;

use crate::exact::{binomial, format_rational, int, nonpositive_integer, pochhammer, Rational};

pub type Real = FBig<HalfEven, 2>;

/// Default working precision for numeric evaluation, in decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;

const GUARD_BITS: usize = 32;

/// Binary precision needed for `digits` significant decimal digits.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8
}

pub fn zero(precision: usize) -> Real {
    Real::ZERO.with_precision(precision).value()
}

pub fn one(precision: usize) -> Real {
    Real::ONE.with_precision(precision).value()
}

pub fn from_int(n: impl Into<IBig>, precision: usize) -> Real {
    Real::from(n.into()).with_precision(precision).value()
}

pub fn from_rational(q: &Rational, precision: usize) -> Real {
    let num = from_int(q.numerator().clone(), precision);
    let den = from_int(IBig::from(q.denominator().clone()), precision);
    num / den
}

/// Rounds an `f64` into a `Real` at the given precision.
pub fn from_f64(x: f64, precision: usize) -> Real {
    Real::try_from(x)
        .expect("finite f64")
        .with_precision(precision)
        .value()
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

pub fn abs(x: &Real) -> Real {
    x.clone().abs()
}

pub fn is_zero(x: &Real) -> bool {
    *x.repr().significand() == IBig::ZERO
}

/// Scientific decimal text with `digits` significant digits, e.g.
/// `1.2345e-3`. Deterministic for a given value and digit count.
pub fn format_sci(x: &Real, digits: usize) -> String {
    let digits = digits.max(1);
    if is_zero(x) {
        return "0".to_string();
    }
    let dec = x.clone().with_base_and_precision::<10>(digits).value();
    let repr = dec.repr();
    let sig = repr.significand().clone();
    let negative = sig < IBig::ZERO;
    let text = if negative { (-sig).to_string() } else { sig.to_string() };
    let text = text.trim_end_matches('0');
    let text = if text.is_empty() { "0" } else { text };
    let exp10 = repr.exponent() + (repr.significand().to_string().trim_start_matches('-').len() as isize) - 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&text[..1]);
    if text.len() > 1 {
        out.push('.');
        out.push_str(&text[1..]);
    }
    out.push_str(&format!("e{exp10}"));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("gamma has a pole at {}", format_rational(.0))]
    Pole(Rational),
}

fn bernoulli_cache() -> &'static Mutex<Vec<Rational>> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![RBig::ONE]))
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = bernoulli_cache().lock().expect("bernoulli cache poisoned");
    while cache.len() <= n {
        let j = cache.len();
        // B_j = -1/(j+1) Σ_{k<j} C(j+1, k) B_k
        let mut acc = RBig::ZERO;
        for (k, bk) in cache.iter().enumerate() {
            if *bk != RBig::ZERO {
                acc += RBig::from(binomial(j + 1, k)) * bk;
            }
        }
        cache.push(-acc / int(j as i64 + 1));
    }
    cache[n].clone()
}

/// `ln |Γ(x)|` together with `true` when `Γ(x) < 0`.
pub fn ln_abs_gamma(x: &Rational, precision: usize) -> Result<(Real, bool), GammaError> {
    if nonpositive_integer(x).is_some() {
        return Err(GammaError::Pole(x.clone()));
    }
    let work = precision + GUARD_BITS;
    let threshold = int((work / 4).max(10) as i64);
    let shift = if *x < threshold {
        usize::try_from((&threshold - x).ceil()).expect("shift fits usize")
    } else {
        0
    };
    // Γ(x) = Γ(x + N) / (x)_N
    let poch = pochhammer(x, shift);
    let negative = poch < RBig::ZERO;
    let y = x + int(shift as i64);
    let ln_gamma_y = stirling_ln_gamma(&from_rational(&y, work), work);
    let poch_abs = if negative { -poch } else { poch };
    let ln_poch = from_rational(&poch_abs, work).ln();
    let value = (ln_gamma_y - ln_poch).with_precision(precision).value();
    Ok((value, negative))
}

/// Stirling series for `ln Γ(y)`; accurate to about `2^-precision` once
/// `y >= precision / 4`.
fn stirling_ln_gamma(y: &Real, precision: usize) -> Real {
    let half = from_rational(&RBig::from_parts_signed(IBig::ONE, IBig::from(2)), precision);
    let two_pi = Real::pi(precision) * from_int(2, precision);
    let mut sum = (y.clone() - &half) * y.ln() - y + half * two_pi.ln();
    let eps = from_f64(2f64.powi(-(precision as i32)), precision);
    let y_sq = y.clone() * y;
    let mut y_pow = y.clone();
    for k in 1..400 {
        let b = bernoulli(2 * k);
        let denom = int((2 * k * (2 * k - 1)) as i64);
        let term = from_rational(&(b / denom), precision) / &y_pow;
        let small = abs(&term) < eps.clone() * (abs(&sum) + one(precision));
        sum += term;
        if small {
            break;
        }
        y_pow *= &y_sq;
    }
    sum
}

/// `Γ(x)` for rational `x` that is not a pole.
pub fn gamma(x: &Rational, precision: usize) -> Result<Real, GammaError> {
    gamma_ratio(std::slice::from_ref(x), &[], precision)
}

/// `Π Γ(n_i) / Π Γ(d_j)` evaluated through log-gamma with sign tracking.
pub fn gamma_ratio(
    numerators: &[Rational],
    denominators: &[Rational],
    precision: usize,
) -> Result<Real, GammaError> {
    let work = precision + GUARD_BITS;
    let mut log_sum = zero(work);
    let mut negative = false;
    for x in numerators {
        let (lg, neg) = ln_abs_gamma(x, work)?;
        log_sum += lg;
        negative ^= neg;
    }
    for x in denominators {
        let (lg, neg) = ln_abs_gamma(x, work)?;
        log_sum -= lg;
        negative ^= neg;
    }
    let magnitude = log_sum.exp();
    let value = if negative { -magnitude } else { magnitude };
    Ok(value.with_precision(precision).value())
}

/// `base^exponent` for positive rational `base`.
pub fn pow_rational(base: &Rational, exponent: &Rational, precision: usize) -> Real {
    assert!(*base > RBig::ZERO, "pow_rational needs a positive base");
    if *exponent == RBig::ZERO || *base == RBig::ONE {
        return one(precision);
    }
    let work = precision + GUARD_BITS;
    let ln_base = from_rational(base, work).ln();
    (ln_base * from_rational(exponent, work))
        .exp()
        .with_precision(precision)
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    const P: usize = 200;

    fn close(a: &Real, b: f64, rel: f64) -> bool {
        let a = to_f64(a);
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn gamma_at_integers_is_factorial() {
        let mut fact = 1.0f64;
        for n in 1..15 {
            let g = gamma(&int(n), P).unwrap();
            assert!(close(&g, fact, 1e-15), "Γ({n})");
            fact *= n as f64;
        }
        // exact digits: Γ(25) = 24!
        let g = gamma(&int(25), P).unwrap();
        let exact = from_int(IBig::from(620448401733239439360000u128), P);
        let rel = abs(&((g - &exact) / exact));
        assert!(to_f64(&rel) < 1e-55);
    }

    #[test]
    fn gamma_half_integers() {
        let sqrt_pi = Real::pi(P).sqrt();
        let g = gamma(&rat(1, 2), P).unwrap();
        assert!(to_f64(&abs(&(g - &sqrt_pi))) < 1e-55);
        // Γ(-1/2) = -2 sqrt(pi), Γ(-3/2) = 4/3 sqrt(pi)
        let g = gamma(&rat(-1, 2), P).unwrap();
        let want = sqrt_pi.clone() * from_int(-2, P);
        assert!(to_f64(&abs(&(g - want))) < 1e-55);
        let g = gamma(&rat(-3, 2), P).unwrap();
        let want = sqrt_pi * from_rational(&rat(4, 3), P);
        assert!(to_f64(&abs(&(g - want))) < 1e-55);
    }

    #[test]
    fn gamma_reflection_consistency() {
        // Γ(x) Γ(1-x) = π / sin(πx)
        for x in [rat(1, 3), rat(-7, 4), rat(5, 6), rat(-11, 3)] {
            let lhs = gamma(&x, P).unwrap() * gamma(&(int(1) - &x), P).unwrap();
            let pix = Real::pi(P) * from_rational(&x, P);
            let rhs = Real::pi(P) / pix.sin();
            let rel = to_f64(&abs(&((lhs - &rhs) / rhs)));
            assert!(rel < 1e-50, "x = {x}: {rel}");
        }
    }

    #[test]
    fn gamma_poles_rejected() {
        assert_eq!(gamma(&int(0), P), Err(GammaError::Pole(int(0))));
        assert!(gamma_ratio(&[int(1)], &[int(-3)], P).is_err());
    }

    #[test]
    fn gamma_ratio_examples() {
        // B(1,1) = 1
        let b = gamma_ratio(&[int(1), int(1)], &[int(2)], P).unwrap();
        assert!(to_f64(&abs(&(b - one(P)))) < 1e-55);
        // B(1/2, 1) = 2
        let b = gamma_ratio(&[rat(1, 2), int(1)], &[rat(3, 2)], P).unwrap();
        assert!(close(&b, 2.0, 1e-15));
    }

    #[test]
    fn pow_and_format() {
        let x = pow_rational(&rat(3, 4), &rat(-1, 2), P);
        assert!(close(&x, (0.75f64).powf(-0.5), 1e-15));
        assert_eq!(format_sci(&from_rational(&rat(1, 8), P), 5), "1.25e-1");
        assert_eq!(format_sci(&from_int(-12345, P), 3), "-1.23e4");
        assert_eq!(format_sci(&zero(P), 3), "0");
        assert_eq!(format_sci(&from_rational(&rat(2, 3), P), 4), "6.667e-1");
    }
}
