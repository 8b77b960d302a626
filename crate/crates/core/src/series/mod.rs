//! Generalized hypergeometric series
//!
//! ```text
//! Σ_k  Π (a_i)_k / Π (b_j)_k / k!  ·  w(-k)  ·  x^k
//! ```
//!
//! with an optional polynomial weight `w`. Terminating rational series are
//! summed exactly; everything else is summed in extended precision with a
//! tail estimate, optionally accelerated by the Levin u-transform.

pub mod levin;

use std::fmt;

use dashu_ratio::RBig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, int, nonpositive_integer, serde_rational, serde_rational_vec, sum, Rational};
use crate::poly::RationalPolynomial;
use crate::real::{self, bits_for_digits, Real};

#[derive(Debug, Clone, Error)]
pub enum SeriesError {
    #[error("denominator parameter {} is a nonpositive integer not shielded by an earlier termination", format_rational(.0))]
    DenominatorPole(Rational),
    #[error("series does not terminate: no numerator parameter is a nonpositive integer")]
    NotTerminating,
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("argument {} is outside |x| < 1 and x = 1", format_rational(.0))]
    UnsupportedArgument(Rational),
    #[error("tolerance {tol:e} not reached within {} terms (best error bound {:e})", .best.terms_used, .best.abs_error_bound)]
    ToleranceNotReached { best: Box<EvalResult>, tol: f64 },
}

/// Common view of plain and weighted series.
pub trait SeriesTerms {
    fn numerators(&self) -> &[Rational];
    fn denominators(&self) -> &[Rational];
    fn argument(&self) -> &Rational;
    fn weight(&self) -> Option<&RationalPolynomial> {
        None
    }

    /// Index of the last possibly nonzero term, if the series terminates.
    fn termination_index(&self) -> Option<usize> {
        if *self.argument() == RBig::ZERO {
            return Some(0);
        }
        termination_index(self.numerators())
    }

    /// `Σ b_j - Σ a_i - deg w`; governs convergence at `x = 1`.
    fn excess(&self) -> Rational {
        let deg = self.weight().and_then(|w| w.degree()).unwrap_or(0);
        sum(self.denominators().iter().cloned()) - sum(self.numerators().iter().cloned()) - int(deg as i64)
    }

    fn weight_at(&self, k: usize) -> Rational {
        match self.weight() {
            Some(w) => w.eval(&-int(k as i64)),
            None => RBig::ONE,
        }
    }
}

fn termination_index(numerators: &[Rational]) -> Option<usize> {
    numerators
        .iter()
        .filter_map(nonpositive_integer)
        .min()
        .map(|n| n as usize)
}

fn check_poles(numerators: &[Rational], denominators: &[Rational]) -> Result<(), SeriesError> {
    let stop = termination_index(numerators);
    for b in denominators {
        if let Some(pole) = nonpositive_integer(b) {
            // (b)_k first vanishes at k = pole + 1; the series must stop by k = pole
            if !matches!(stop, Some(n) if n as u64 <= pole) {
                return Err(SeriesError::DenominatorPole(b.clone()));
            }
        }
    }
    Ok(())
}

/// A plain `pFq` series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct SeriesSpec {
    #[serde(with = "serde_rational_vec")]
    numerators: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    denominators: Vec<Rational>,
    #[serde(with = "serde_rational")]
    argument: Rational,
}

#[derive(Deserialize)]
struct RawSeries {
    #[serde(with = "serde_rational_vec")]
    numerators: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    denominators: Vec<Rational>,
    #[serde(with = "serde_rational")]
    argument: Rational,
}

impl TryFrom<RawSeries> for SeriesSpec {
    type Error = SeriesError;
    fn try_from(raw: RawSeries) -> Result<Self, SeriesError> {
        SeriesSpec::new(raw.numerators, raw.denominators, raw.argument)
    }
}

impl SeriesSpec {
    pub fn new(numerators: Vec<Rational>, denominators: Vec<Rational>, argument: Rational) -> Result<Self, SeriesError> {
        check_poles(&numerators, &denominators)?;
        Ok(Self {
            numerators,
            denominators,
            argument,
        })
    }
}

impl SeriesTerms for SeriesSpec {
    fn numerators(&self) -> &[Rational] {
        &self.numerators
    }
    fn denominators(&self) -> &[Rational] {
        &self.denominators
    }
    fn argument(&self) -> &Rational {
        &self.argument
    }
}

/// A kernel `(α..; γ..)` series whose `k`-th term is multiplied by `w(-k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWeighted")]
pub struct WeightedSeriesSpec {
    #[serde(with = "serde_rational_vec")]
    kernel_numerators: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    kernel_denominators: Vec<Rational>,
    weight: RationalPolynomial,
    #[serde(with = "serde_rational")]
    argument: Rational,
}

#[derive(Deserialize)]
struct RawWeighted {
    #[serde(with = "serde_rational_vec")]
    kernel_numerators: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    kernel_denominators: Vec<Rational>,
    weight: RationalPolynomial,
    #[serde(with = "serde_rational")]
    argument: Rational,
}

impl TryFrom<RawWeighted> for WeightedSeriesSpec {
    type Error = SeriesError;
    fn try_from(raw: RawWeighted) -> Result<Self, SeriesError> {
        WeightedSeriesSpec::new(raw.kernel_numerators, raw.kernel_denominators, raw.weight, raw.argument)
    }
}

impl WeightedSeriesSpec {
    pub fn new(
        kernel_numerators: Vec<Rational>,
        kernel_denominators: Vec<Rational>,
        weight: RationalPolynomial,
        argument: Rational,
    ) -> Result<Self, SeriesError> {
        check_poles(&kernel_numerators, &kernel_denominators)?;
        Ok(Self {
            kernel_numerators,
            kernel_denominators,
            weight,
            argument,
        })
    }

    pub fn weight_polynomial(&self) -> &RationalPolynomial {
        &self.weight
    }

    /// The same series with `w ≡ w(0)` expanded into parameter pairs
    /// `(z+1)/z`, one per zero `z` of `w`. Needs `w(0) = 1` and every zero
    /// rational; `zeros` must list them with multiplicity.
    pub fn with_explicit_pairs(&self, zeros: &[Rational]) -> Option<SeriesSpec> {
        if self.weight.coeff(0) != RBig::ONE || Some(zeros.len()) != self.weight.degree() {
            return None;
        }
        let mut rest = self.weight.clone();
        for z in zeros {
            rest = rest.divide_out_zero(z)?;
        }
        let mut numerators = self.kernel_numerators.clone();
        let mut denominators = self.kernel_denominators.clone();
        for z in zeros {
            numerators.push(z + int(1));
            denominators.push(z.clone());
        }
        SeriesSpec::new(numerators, denominators, self.argument.clone()).ok()
    }
}

impl SeriesTerms for WeightedSeriesSpec {
    fn numerators(&self) -> &[Rational] {
        &self.kernel_numerators
    }
    fn denominators(&self) -> &[Rational] {
        &self.kernel_denominators
    }
    fn argument(&self) -> &Rational {
        &self.argument
    }
    fn weight(&self) -> Option<&RationalPolynomial> {
        Some(&self.weight)
    }
}

fn write_params(f: &mut fmt::Formatter<'_>, params: &[Rational]) -> fmt::Result {
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{}", format_rational(p))?;
    }
    Ok(())
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}F{}[", self.numerators.len(), self.denominators.len())?;
        write_params(f, &self.numerators)?;
        write!(f, "; ")?;
        write_params(f, &self.denominators)?;
        write!(f, "; {}]", format_rational(&self.argument))
    }
}

impl fmt::Display for WeightedSeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Σ [")?;
        write_params(f, &self.kernel_numerators)?;
        write!(f, "; ")?;
        write_params(f, &self.kernel_denominators)?;
        write!(f, "; {}] · w(-k), w(t) = {}", format_rational(&self.argument), self.weight)
    }
}

/// `s = c + e - a - b - d - m`.
pub fn parametric_excess(a: &Rational, b: &Rational, c: &Rational, d: &Rational, e: &Rational, m: usize) -> Rational {
    c + e - a - b - d - int(m as i64)
}

/// Ratio `t_{k+1} / t_k` of the unweighted kernel.
fn kernel_ratio<S: SeriesTerms + ?Sized>(spec: &S, k: usize) -> Rational {
    let kk = int(k as i64);
    let mut r = spec.argument().clone() / int(k as i64 + 1);
    for a in spec.numerators() {
        r *= a + &kk;
    }
    for b in spec.denominators() {
        r /= b + &kk;
    }
    r
}

/// Exact terms `t_0 ..= t_n` of a series stopping at `n`.
fn exact_terms<S: SeriesTerms + ?Sized>(spec: &S, n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut kernel = RBig::ONE;
    for k in 0..=n {
        out.push(&kernel * spec.weight_at(k));
        if k < n {
            kernel *= kernel_ratio(spec, k);
        }
    }
    out
}

/// Exact sum of a terminating series.
pub fn eval_terminating<S: SeriesTerms + ?Sized>(spec: &S) -> Result<Rational, SeriesError> {
    let n = termination_index(spec.numerators()).ok_or(SeriesError::NotTerminating)?;
    Ok(sum(exact_terms(spec, n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Acceleration {
    Off,
    Levin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Working precision in significant decimal digits.
    pub digits: u32,
    pub tol: f64,
    /// Interpret `tol` relative to the value rather than absolutely.
    pub relative: bool,
    pub max_terms: usize,
    pub acceleration: Acceleration,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            digits: real::DEFAULT_DIGITS,
            tol: 1e-20,
            relative: true,
            max_terms: 100_000,
            acceleration: Acceleration::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Direct,
    Levin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: Real,
    pub abs_error_bound: f64,
    pub terms_used: usize,
    pub terminated_exactly: bool,
    pub exact_value: Option<Rational>,
    pub method: Method,
}

impl EvalResult {
    pub fn value_f64(&self) -> f64 {
        real::to_f64(&self.value)
    }
}

#[derive(Debug, Clone, Copy)]
enum Tail {
    /// Term ratio tends to a limit of modulus below one.
    Geometric(f64),
    /// Unit argument: terms decay like `k^(-1-s)`.
    Algebraic(f64),
}

fn classify<S: SeriesTerms + ?Sized>(spec: &S) -> Result<Tail, SeriesError> {
    let p = spec.numerators().len();
    let q = spec.denominators().len();
    let x = spec.argument();
    if p <= q {
        return Ok(Tail::Geometric(0.0));
    }
    if p > q + 1 {
        return Err(SeriesError::Divergent(format!("{p} numerator vs {q} denominator parameters")));
    }
    let one = RBig::ONE;
    if *x == one {
        let s = spec.excess();
        if s <= RBig::ZERO {
            return Err(SeriesError::Divergent(format!(
                "unit argument with nonpositive excess {}",
                format_rational(&s)
            )));
        }
        return Ok(Tail::Algebraic(s.to_f64().value()));
    }
    let ax = if *x < RBig::ZERO { -x.clone() } else { x.clone() };
    if ax < one {
        Ok(Tail::Geometric(ax.to_f64().value()))
    } else if ax > one {
        Err(SeriesError::Divergent(format!("|x| = {} > 1", format_rational(&ax))))
    } else {
        Err(SeriesError::UnsupportedArgument(x.clone()))
    }
}

/// Index past which the term ratio behaves monotonically enough for the
/// tail estimates: beyond every parameter and every weight zero.
fn settle_index<S: SeriesTerms + ?Sized>(spec: &S) -> usize {
    let mut reach = 0.0f64;
    for p in spec.numerators().iter().chain(spec.denominators()) {
        reach = reach.max(p.to_f64().value().abs());
    }
    if let Some(w) = spec.weight() {
        // Fujiwara bound on the zeros of w
        let c = w.to_f64_coeffs();
        let d = c.len() - 1;
        if d > 0 {
            let bound = (1..=d)
                .map(|i| {
                    let ratio = (c[d - i] / c[d]).abs();
                    if i == d { (ratio / 2.0).powf(1.0 / i as f64) } else { ratio.powf(1.0 / i as f64) }
                })
                .fold(0.0, f64::max);
            reach = reach.max(2.0 * bound);
        }
    }
    (2.0 * reach).ceil().min(1e7) as usize + 4
}

const LEVIN_CHECKPOINTS: [usize; 4] = [40, 80, 160, 320];
const LEVIN_MAX_ORDER: usize = 60;

struct Levin {
    value: Real,
    bound: f64,
    terms: usize,
}

fn levin_estimate(sums: &[Real], terms: &[Real], start: usize, precision: usize) -> Option<Levin> {
    let n0 = terms.iter().rposition(real::is_zero).map_or(0, |i| i + 1).max(start);
    let avail = sums.len().checked_sub(n0 + 1)?;
    let kmax = avail.min(LEVIN_MAX_ORDER);
    if kmax < 4 {
        return None;
    }
    let table = levin::levin_u_table(sums, terms, n0, kmax, precision);
    let mut best: Option<Levin> = None;
    for k in 2..table.len() {
        let d1 = real::to_f64(&real::abs(&(table[k].clone() - &table[k - 1])));
        let d2 = real::to_f64(&real::abs(&(table[k - 1].clone() - &table[k - 2])));
        let bound = d1 + d2;
        if best.as_ref().is_none_or(|b| bound < b.bound) {
            best = Some(Levin {
                value: table[k].clone(),
                bound,
                terms: n0 + k + 2,
            });
        }
    }
    best
}

/// Numeric evaluation with an error estimate.
///
/// The tail after `K` terms is estimated as `2|t_K| ρ/(1-ρ)` when the term
/// ratio tends to `|ρ| < 1`, and as `2|t_K| K/s` at unit argument, where
/// terms fall off like `k^(-1-s)`. Both are estimates, not proofs.
pub fn eval_numeric<S: SeriesTerms + ?Sized>(spec: &S, opts: &EvalOptions) -> Result<EvalResult, SeriesError> {
    let stop = spec.termination_index();
    let tail = match stop {
        Some(_) => None,
        None => Some(classify(spec)?),
    };
    let bits = bits_for_digits(opts.digits);
    let levin_on = opts.acceleration == Acceleration::Levin && tail.is_some();
    let work = if levin_on { bits + 4 * LEVIN_MAX_ORDER + 64 } else { bits + 32 };
    let ulp = 2f64.powi(-(bits as i32));
    let settle = settle_index(spec);
    let budget = match stop {
        Some(n) => n + 1,
        None => opts.max_terms.max(2),
    };

    let mut kernel = real::one(work);
    let mut partial = real::zero(work);
    let mut sum_abs = 0.0f64;
    let mut prev_term = 0.0f64;
    let mut terms: Vec<Real> = Vec::new();
    let mut sums: Vec<Real> = Vec::new();
    let mut best_levin: Option<Levin> = None;
    let mut last_levin: Option<Real> = None;
    let mut direct_bound = f64::INFINITY;

    let finish = |value: Real, bound: f64, terms_used: usize, method: Method, exact: Option<Rational>| EvalResult {
        value: value.with_precision(bits).value(),
        abs_error_bound: bound,
        terms_used,
        terminated_exactly: exact.is_some(),
        exact_value: exact,
        method,
    };

    for k in 0..budget {
        let term = kernel.clone() * real::from_rational(&spec.weight_at(k), work);
        partial += &term;
        let t = real::to_f64(&term).abs();
        sum_abs += t;
        if levin_on {
            terms.push(term);
            sums.push(partial.clone());
        }
        let used = k + 1;
        let rounding = 4.0 * used as f64 * ulp * sum_abs;
        let scale = if opts.relative { real::to_f64(&partial).abs() } else { 1.0 };
        let target = opts.tol * scale;

        if let Some(tail) = tail {
            if k >= settle && t > 0.0 && prev_term > 0.0 {
                let ratio = t / prev_term;
                let estimate = match tail {
                    Tail::Geometric(limit) => {
                        let rho = ratio.max(limit);
                        (rho < 1.0).then(|| 2.0 * t * rho / (1.0 - rho))
                    }
                    Tail::Algebraic(s) => (ratio < 1.0).then(|| 2.0 * t * k as f64 / s),
                };
                if let Some(est) = estimate {
                    direct_bound = est + rounding;
                    if direct_bound <= target {
                        return Ok(finish(partial, direct_bound, used, Method::Direct, None));
                    }
                }
            }
            // remainder estimates are meaningless before the terms settle
            if levin_on && used > settle && LEVIN_CHECKPOINTS.contains(&(used - settle)) {
                if let Some(mut l) = levin_estimate(&sums, &terms, settle, work) {
                    // a table can settle on a wrong value; only agreement
                    // between checkpoints counts
                    let drift = last_levin.replace(l.value.clone()).map_or(f64::INFINITY, |prev| {
                        real::to_f64(&real::abs(&(l.value.clone() - &prev)))
                    });
                    l.bound = l.bound.max(drift);
                    let l_target = if opts.relative { opts.tol * real::to_f64(&l.value).abs() } else { opts.tol };
                    if l.bound + rounding <= l_target {
                        return Ok(finish(l.value, l.bound + rounding, l.terms, Method::Levin, None));
                    }
                    if best_levin.as_ref().is_none_or(|b| l.bound < b.bound) {
                        best_levin = Some(l);
                    }
                }
            }
        }
        prev_term = t;
        if k + 1 < budget {
            kernel *= real::from_rational(&kernel_ratio(spec, k), work);
        }
    }

    if stop.is_some() {
        let exact = eval_terminating(spec)?;
        let bound = 4.0 * budget as f64 * ulp * sum_abs;
        return Ok(finish(partial, bound, budget, Method::Exact, Some(exact)));
    }
    let best = match best_levin {
        Some(l) if l.bound < direct_bound => finish(l.value, l.bound, l.terms, Method::Levin, None),
        _ => finish(partial, direct_bound, budget, Method::Direct, None),
    };
    Err(SeriesError::ToleranceNotReached {
        best: Box::new(best),
        tol: opts.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ParamPairs};
    use crate::poly::build_q;
    use crate::real::{gamma_ratio, pow_rational};

    fn spec(nums: &[Rational], dens: &[Rational], x: Rational) -> SeriesSpec {
        SeriesSpec::new(nums.to_vec(), dens.to_vec(), x).unwrap()
    }

    fn rel(a: &Real, b: &Real) -> f64 {
        real::to_f64(&real::abs(&((a.clone() - b) / b)))
    }

    #[test]
    fn terminating_examples() {
        let s = spec(&[int(0), rat(2, 3)], &[rat(5, 7)], rat(1, 2));
        assert_eq!(eval_terminating(&s).unwrap(), int(1));
        let s = spec(&[int(-2), int(1)], &[int(1)], int(1));
        assert_eq!(eval_terminating(&s).unwrap(), int(0));
        let s = spec(&[rat(1, 2)], &[int(2)], rat(1, 2));
        assert!(matches!(eval_terminating(&s), Err(SeriesError::NotTerminating)));
    }

    #[test]
    fn classical_terminating_thomae() {
        // 3F2(-n, c-b, d; c, 1-e+d-n; 1) = (e)_n/(e-d)_n · 3F2(-n, b, d; c, e; 1)
        let (n, b, c, d, e) = (2i64, rat(1, 2), int(3), int(1), int(5));
        let lhs = spec(&[int(-n), b.clone(), d.clone()], &[c.clone(), e.clone()], int(1));
        let rhs = spec(
            &[int(-n), &c - &b, d.clone()],
            &[c.clone(), int(1) - &e + &d - int(n)],
            int(1),
        );
        let factor = crate::exact::pochhammer(&e, n as usize) / crate::exact::pochhammer(&(&e - &d), n as usize);
        assert_eq!(eval_terminating(&rhs).unwrap(), factor * eval_terminating(&lhs).unwrap());
    }

    #[test]
    fn pole_rules() {
        assert!(matches!(
            SeriesSpec::new(vec![int(1)], vec![int(-2)], rat(1, 2)),
            Err(SeriesError::DenominatorPole(_))
        ));
        assert!(matches!(
            SeriesSpec::new(vec![int(-3)], vec![int(-2)], rat(1, 2)),
            Err(SeriesError::DenominatorPole(_))
        ));
        // shielded: the numerator stops the sum before the pole is reached
        let s = SeriesSpec::new(vec![int(-2), int(1)], vec![int(-2)], int(1)).unwrap();
        // 1 + (-2)(1)/(-2) + (-2)(-1)(1)(2)/((-2)(-1)·2) = 1 + 1 + 1
        assert_eq!(eval_terminating(&s).unwrap(), int(3));
    }

    #[test]
    fn binomial_reduction() {
        let (a, b, x) = (rat(1, 2), rat(7, 3), rat(1, 4));
        let s = spec(&[a.clone(), b.clone()], &[b], x.clone());
        let r = eval_numeric(&s, &EvalOptions::default()).unwrap();
        let want = pow_rational(&(int(1) - x), &-a, 200);
        assert!(rel(&r.value, &want) < 1e-20);
        assert!(r.abs_error_bound <= 1e-20 * real::to_f64(&want));
        assert_eq!(r.method, Method::Direct);
    }

    #[test]
    fn gauss_summation() {
        let (a, b, c) = (rat(1, 3), rat(1, 4), int(3));
        let s = spec(&[a.clone(), b.clone()], std::slice::from_ref(&c), int(1));
        let opts = EvalOptions {
            tol: 1e-12,
            max_terms: 200_000,
            ..EvalOptions::default()
        };
        let r = eval_numeric(&s, &opts).unwrap();
        let want = gamma_ratio(&[c.clone(), &c - &a - &b], &[&c - &a, &c - &b], 200).unwrap();
        assert!(rel(&r.value, &want) < 1e-12);
    }

    #[test]
    fn levin_agrees_with_direct_at_unit_argument() {
        // s = 3 - 1/3 - 1/4 - 1/2 is small enough that direct summation crawls
        let s = spec(&[rat(1, 3), rat(1, 4), rat(1, 2)], &[int(2), int(1)], int(1));
        let direct = eval_numeric(
            &s,
            &EvalOptions {
                tol: 1e-9,
                max_terms: 400_000,
                ..EvalOptions::default()
            },
        )
        .unwrap();
        let acc = eval_numeric(
            &s,
            &EvalOptions {
                tol: 1e-25,
                acceleration: Acceleration::Levin,
                ..EvalOptions::default()
            },
        )
        .unwrap();
        assert_eq!(acc.method, Method::Levin);
        assert!(acc.terms_used < 200);
        let diff = real::to_f64(&real::abs(&(acc.value.clone() - &direct.value)));
        assert!(diff <= direct.abs_error_bound + acc.abs_error_bound, "{diff}");
    }

    #[test]
    fn levin_gauss_to_many_digits() {
        let (a, b, c) = (rat(1, 3), rat(1, 4), rat(3, 2));
        let s = spec(&[a.clone(), b.clone()], std::slice::from_ref(&c), int(1));
        let r = eval_numeric(
            &s,
            &EvalOptions {
                tol: 1e-30,
                acceleration: Acceleration::Levin,
                ..EvalOptions::default()
            },
        )
        .unwrap();
        let want = gamma_ratio(&[c.clone(), &c - &a - &b], &[&c - &a, &c - &b], 200).unwrap();
        assert!(rel(&r.value, &want) < 1e-30);
    }

    #[test]
    fn weighted_matches_explicit_pairs() {
        let pp = ParamPairs::single(rat(1, 2), 2).unwrap();
        let (a, b, c) = (rat(1, 4), rat(5, 2), rat(3, 2));
        let q = build_q(&pp, &b, &c).unwrap();
        let x = rat(3, 10);
        let lam = &c - &b - int(2);
        let w = WeightedSeriesSpec::new(vec![a.clone(), lam.clone()], vec![c.clone()], q, x).unwrap();
        let explicit = w.with_explicit_pairs(&[rat(1, 2), rat(9, 2)]).unwrap();
        assert_eq!(explicit.numerators(), &[a, lam, rat(3, 2), rat(11, 2)]);
        let opts = EvalOptions::default();
        let lhs = eval_numeric(&w, &opts).unwrap();
        let rhs = eval_numeric(&explicit, &opts).unwrap();
        assert!(rel(&lhs.value, &rhs.value) < 1e-12);
        assert!(w.with_explicit_pairs(&[rat(1, 2), rat(7, 2)]).is_none());
    }

    #[test]
    fn divergence_and_budget() {
        let s = spec(&[int(1), int(1)], &[int(1)], int(1));
        assert!(matches!(eval_numeric(&s, &EvalOptions::default()), Err(SeriesError::Divergent(_))));
        let s = spec(&[int(1), int(1)], &[int(2)], int(-1));
        assert!(matches!(
            eval_numeric(&s, &EvalOptions::default()),
            Err(SeriesError::UnsupportedArgument(_))
        ));
        let s = spec(&[int(1), int(1), int(1)], &[int(2)], rat(1, 2));
        assert!(matches!(eval_numeric(&s, &EvalOptions::default()), Err(SeriesError::Divergent(_))));
    }

    #[test]
    fn tail_bound_shrinks_with_budget() {
        let s = spec(&[rat(1, 2), rat(1, 3)], &[int(2)], int(1));
        let mut last = f64::INFINITY;
        for budget in [200, 800, 3200] {
            let opts = EvalOptions {
                tol: 1e-30,
                max_terms: budget,
                ..EvalOptions::default()
            };
            let Err(SeriesError::ToleranceNotReached { best, .. }) = eval_numeric(&s, &opts) else {
                panic!("expected budget exhaustion");
            };
            assert!(best.abs_error_bound < last);
            last = best.abs_error_bound;
        }
    }

    #[test]
    fn terminating_numeric_matches_exact() {
        let s = spec(&[int(-5), rat(7, 3), rat(-1, 2)], &[rat(3, 4), rat(11, 5)], int(1));
        let r = eval_numeric(&s, &EvalOptions::default()).unwrap();
        let exact = r.exact_value.clone().unwrap();
        assert_eq!(exact, eval_terminating(&s).unwrap());
        let diff = real::to_f64(&real::abs(&(r.value - real::from_rational(&exact, 300))));
        assert!(diff <= r.abs_error_bound);
    }

    #[test]
    fn excess_values() {
        assert_eq!(parametric_excess(&int(0), &int(0), &int(1), &int(0), &int(1), 0), int(2));
        let s = parametric_excess(&rat(1, 4), &rat(5, 2), &rat(3, 2), &int(1), &int(8), 2);
        assert_eq!(s, int(8) - int(1) - rat(13, 4));
    }

    #[test]
    fn serde_round_trip_validates() {
        let s = spec(&[rat(1, 2)], &[int(3)], rat(1, 3));
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"numerators":["1/2"],"denominators":["3"],"argument":"1/3"}"#);
        assert_eq!(serde_json::from_str::<SeriesSpec>(&text).unwrap(), s);
        let bad = r#"{"numerators":["1"],"denominators":["-1"],"argument":"1/3"}"#;
        assert!(serde_json::from_str::<SeriesSpec>(bad).is_err());
    }
}
