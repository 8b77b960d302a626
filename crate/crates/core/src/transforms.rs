//! Euler-type and Thomae-type transformations for series carrying parameter
//! pairs `(f_j + m_j) / f_j`.
//!
//! Every transformation produces a [`TransformResult`]: the source series, a
//! prefactor, and a target series whose extra parameter pairs are kept in
//! zero-free form as a polynomial weight `Q(-k)`.

use std::fmt;

use dashu_ratio::RBig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, int, is_integer, nonpositive_integer, pochhammer, serde_rational, serde_rational_vec, ParamPairs, Rational};
use crate::poly::{build_q, build_qhat, PolyError, RationalPolynomial};
use crate::real::{self, gamma_ratio, pow_rational, GammaError, Real};
use crate::roots::{find_zeros, rational_zeros, RootOptions};
use crate::series::{parametric_excess, SeriesError, SeriesSpec, SeriesTerms, WeightedSeriesSpec};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremKind {
    Euler1,
    Euler2,
    Thomae,
    ThomaeTerminating,
}

impl fmt::Display for TheoremKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremKind::Euler1 => "euler1",
            TheoremKind::Euler2 => "euler2",
            TheoremKind::Thomae => "thomae",
            TheoremKind::ThomaeTerminating => "thomae-terminating",
        })
    }
}

#[derive(Debug, Clone, Error)]
pub enum TransformError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("x = {} must be below 1", format_rational(.0))]
    ArgumentNotBelowOne(Rational),
    #[error("e - d = {} must be positive", format_rational(.0))]
    EMinusDNotPositive(Rational),
    #[error("parametric excess s = {} must be positive", format_rational(.0))]
    ExcessNotPositive(Rational),
    #[error("(e)_n vanishes")]
    EPochhammerZero,
    #[error("gamma prefactor argument {} is a pole", format_rational(.0))]
    GammaPole(Rational),
    #[error("c = {} is a nonpositive integer", format_rational(.0))]
    CNonpositiveInteger(Rational),
    #[error("pair base f_{index} = {} is a nonpositive integer", format_rational(.value))]
    FNonpositiveInteger { index: usize, value: Rational },
}

/// The factor multiplying the target series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Prefactor {
    /// `(1 - x)^exponent`
    PowerOfOneMinusX {
        #[serde(with = "serde_rational")]
        x: Rational,
        #[serde(with = "serde_rational")]
        exponent: Rational,
    },
    /// `Π Γ(numerators) / Π Γ(denominators)`
    GammaRatio {
        #[serde(with = "serde_rational_vec")]
        numerators: Vec<Rational>,
        #[serde(with = "serde_rational_vec")]
        denominators: Vec<Rational>,
    },
    /// `(top)_n / (bottom)_n`
    PochhammerRatio {
        #[serde(with = "serde_rational")]
        top: Rational,
        #[serde(with = "serde_rational")]
        bottom: Rational,
        n: usize,
    },
}

impl Prefactor {
    /// Exact value where one exists without irrational functions.
    pub fn exact(&self) -> Option<Rational> {
        match self {
            Prefactor::PowerOfOneMinusX { x, exponent } => {
                if *exponent == RBig::ZERO {
                    return Some(RBig::ONE);
                }
                if !is_integer(exponent) {
                    return None;
                }
                let e = i64::try_from(exponent.numerator().clone()).ok()?;
                let base = int(1) - x;
                let p = (0..e.unsigned_abs()).fold(RBig::ONE, |acc, _| acc * &base);
                Some(if e < 0 { RBig::ONE / p } else { p })
            }
            Prefactor::GammaRatio { .. } => None,
            Prefactor::PochhammerRatio { top, bottom, n } => Some(pochhammer(top, *n) / pochhammer(bottom, *n)),
        }
    }

    pub fn evaluate(&self, precision: usize) -> Result<Real, GammaError> {
        if let Some(q) = self.exact() {
            return Ok(real::from_rational(&q, precision));
        }
        match self {
            Prefactor::PowerOfOneMinusX { x, exponent } => Ok(pow_rational(&(int(1) - x), exponent, precision)),
            Prefactor::GammaRatio { numerators, denominators } => gamma_ratio(numerators, denominators, precision),
            Prefactor::PochhammerRatio { .. } => unreachable!("pochhammer ratios are always exact"),
        }
    }
}

impl fmt::Display for Prefactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Rational], name: &str| {
            v.iter()
                .map(|q| format!("{name}({})", format_rational(q)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            Prefactor::PowerOfOneMinusX { x, exponent } => {
                write!(f, "(1 - {})^({})", format_rational(x), format_rational(exponent))
            }
            Prefactor::GammaRatio { numerators, denominators } => {
                write!(f, "{} / [{}]", list(numerators, "Γ"), list(denominators, "Γ"))
            }
            Prefactor::PochhammerRatio { top, bottom, n } => {
                write!(f, "({})_{n} / ({})_{n}", format_rational(top), format_rational(bottom))
            }
        }
    }
}

/// A precondition that was checked while building a transformation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub detail: String,
    pub holds: bool,
}

fn holds(name: &str, detail: String) -> Condition {
    Condition {
        name: name.to_string(),
        detail,
        holds: true,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformResult {
    pub kind: TheoremKind,
    pub prefactor: Prefactor,
    pub source: SeriesSpec,
    pub target: WeightedSeriesSpec,
    /// `Q_m` or `Q̂_m`, the weight of `target`.
    pub polynomial: RationalPolynomial,
    pub conditions: Vec<Condition>,
}

fn with_pairs(mut nums: Vec<Rational>, mut dens: Vec<Rational>, pp: &ParamPairs) -> (Vec<Rational>, Vec<Rational>) {
    nums.extend(pp.upper());
    dens.extend(pp.lower());
    (nums, dens)
}

fn b_not_f(pp: &ParamPairs, b: &Rational) -> Condition {
    holds("b-not-f", format!("b = {} differs from f_j in [{pp}]", format_rational(b)))
}

/// A pair with integer base `f <= 0` stands for the polynomial
/// `(f+k)_m / (f)_m` in the summation index, which the Pochhammer form would
/// silently truncate; such pairs are rejected.
fn pair_bases(pp: &ParamPairs) -> Result<Condition, TransformError> {
    for (index, p) in pp.pairs().iter().enumerate() {
        if nonpositive_integer(&p.f).is_some() {
            return Err(TransformError::FNonpositiveInteger { index, value: p.f.clone() });
        }
    }
    Ok(holds("f-not-pole", "no f_j is a nonpositive integer".to_string()))
}

fn c_not_pole(c: &Rational) -> Result<Condition, TransformError> {
    if nonpositive_integer(c).is_some() {
        return Err(TransformError::CNonpositiveInteger(c.clone()));
    }
    Ok(holds("c-not-pole", format!("c = {} is not a nonpositive integer", format_rational(c))))
}

fn pochhammer_nonzero(name: &str, base: &Rational, m: usize) -> Condition {
    holds(name, format!("({})_{m} != 0", format_rational(base)))
}

fn x_below_one(x: &Rational) -> Result<Condition, TransformError> {
    if *x >= RBig::ONE {
        return Err(TransformError::ArgumentNotBelowOne(x.clone()));
    }
    Ok(holds("x-below-one", format!("x = {} < 1", format_rational(x))))
}

fn e_minus_d_positive(d: &Rational, e: &Rational) -> Result<Condition, TransformError> {
    let diff = e - d;
    if diff <= RBig::ZERO {
        return Err(TransformError::EMinusDNotPositive(diff));
    }
    Ok(holds("e-minus-d-positive", format!("e - d = {} > 0", format_rational(&diff))))
}

/// `(r+2)F(r+1)[a, b, (f+m); c, (f); x] = (1-x)^(-a) Σ (a)_k (c-b-m)_k / ((c)_k k!) Q_m(-k) (x/(x-1))^k`
pub fn euler1(a: &Rational, b: &Rational, c: &Rational, pp: &ParamPairs, x: &Rational) -> Result<TransformResult, TransformError> {
    let m = pp.total_offset();
    let lambda = c - b - int(m as i64);
    let q = build_q(pp, b, c)?;
    let mut conditions = vec![b_not_f(pp, b), pochhammer_nonzero("c-b-m", &lambda, m)];
    conditions.push(pair_bases(pp)?);
    conditions.push(c_not_pole(c)?);
    conditions.push(x_below_one(x)?);
    let (nums, dens) = with_pairs(vec![a.clone(), b.clone()], vec![c.clone()], pp);
    let source = SeriesSpec::new(nums, dens, x.clone())?;
    let y = x / (x - int(1));
    let target = WeightedSeriesSpec::new(vec![a.clone(), lambda], vec![c.clone()], q.clone(), y)?;
    Ok(TransformResult {
        kind: TheoremKind::Euler1,
        prefactor: Prefactor::PowerOfOneMinusX {
            x: x.clone(),
            exponent: -a.clone(),
        },
        source,
        target,
        polynomial: q,
        conditions,
    })
}

/// `(r+2)F(r+1)[a, b, (f+m); c, (f); x] = (1-x)^(c-a-b-m) Σ (c-a-m)_k (c-b-m)_k / ((c)_k k!) Q̂_m(-k) x^k`
pub fn euler2(a: &Rational, b: &Rational, c: &Rational, pp: &ParamPairs, x: &Rational) -> Result<TransformResult, TransformError> {
    let m = pp.total_offset();
    let mm = int(m as i64);
    let qhat = build_qhat(pp, a, b, c)?;
    let ca = c - a - &mm;
    let cb = c - b - &mm;
    let mut conditions = vec![pochhammer_nonzero("c-a-m", &ca, m), pochhammer_nonzero("c-b-m", &cb, m)];
    conditions.push(pair_bases(pp)?);
    conditions.push(c_not_pole(c)?);
    conditions.push(x_below_one(x)?);
    let (nums, dens) = with_pairs(vec![a.clone(), b.clone()], vec![c.clone()], pp);
    let source = SeriesSpec::new(nums, dens, x.clone())?;
    let target = WeightedSeriesSpec::new(vec![ca, cb], vec![c.clone()], qhat.clone(), x.clone())?;
    Ok(TransformResult {
        kind: TheoremKind::Euler2,
        prefactor: Prefactor::PowerOfOneMinusX {
            x: x.clone(),
            exponent: c - a - b - mm,
        },
        source,
        target,
        polynomial: qhat,
        conditions,
    })
}

/// Unit-argument transformation
/// `(r+3)F(r+2)[a, b, d, (f+m); c, e, (f); 1] = Γ(e)Γ(s)/(Γ(e-d)Γ(s+d)) Σ (c-a-m)_k (c-b-m)_k (d)_k / ((c)_k (s+d)_k k!) Q̂_m(-k)`
/// with `s = c + e - a - b - d - m`.
pub fn thomae(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    e: &Rational,
    pp: &ParamPairs,
) -> Result<TransformResult, TransformError> {
    let m = pp.total_offset();
    let mm = int(m as i64);
    let qhat = build_qhat(pp, a, b, c)?;
    let ca = c - a - &mm;
    let cb = c - b - &mm;
    let mut conditions = vec![pochhammer_nonzero("c-a-m", &ca, m), pochhammer_nonzero("c-b-m", &cb, m)];
    conditions.push(pair_bases(pp)?);
    conditions.push(c_not_pole(c)?);
    conditions.push(e_minus_d_positive(d, e)?);
    let s = parametric_excess(a, b, c, d, e, m);
    if s <= RBig::ZERO {
        return Err(TransformError::ExcessNotPositive(s));
    }
    conditions.push(holds("excess-positive", format!("s = {} > 0", format_rational(&s))));
    let sd = &s + d;
    let numerators = vec![e.clone(), s.clone()];
    let denominators = vec![e - d, sd.clone()];
    for g in numerators.iter().chain(&denominators) {
        if nonpositive_integer(g).is_some() {
            return Err(TransformError::GammaPole(g.clone()));
        }
    }
    conditions.push(holds("gamma-finite", "Γ(e), Γ(s), Γ(e-d), Γ(s+d) are finite".to_string()));
    let (nums, dens) = with_pairs(vec![a.clone(), b.clone(), d.clone()], vec![c.clone(), e.clone()], pp);
    let source = SeriesSpec::new(nums, dens, int(1))?;
    let target = WeightedSeriesSpec::new(vec![ca, cb, d.clone()], vec![c.clone(), sd], qhat.clone(), int(1))?;
    Ok(TransformResult {
        kind: TheoremKind::Thomae,
        prefactor: Prefactor::GammaRatio {
            numerators,
            denominators,
        },
        source,
        target,
        polynomial: qhat,
        conditions,
    })
}

/// Finite transformation
/// `(r+3)F(r+2)[-n, b, d, (f+m); c, e, (f); 1] = (e-d)_n/(e)_n Σ (-n)_k (c-b-m)_k (d)_k / ((c)_k (1-e+d-n)_k k!) Q_m(-k)`.
pub fn thomae_terminating(
    n: usize,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    e: &Rational,
    pp: &ParamPairs,
) -> Result<TransformResult, TransformError> {
    let m = pp.total_offset();
    let lambda = c - b - int(m as i64);
    let q = build_q(pp, b, c)?;
    let mut conditions = vec![b_not_f(pp, b), pochhammer_nonzero("c-b-m", &lambda, m)];
    conditions.push(pair_bases(pp)?);
    conditions.push(e_minus_d_positive(d, e)?);
    if pochhammer(e, n) == RBig::ZERO {
        return Err(TransformError::EPochhammerZero);
    }
    conditions.push(pochhammer_nonzero("e", e, n));
    let nn = int(n as i64);
    let (nums, dens) = with_pairs(vec![-nn.clone(), b.clone(), d.clone()], vec![c.clone(), e.clone()], pp);
    let source = SeriesSpec::new(nums, dens, int(1))?;
    let lower = int(1) - e + d - &nn;
    let target = WeightedSeriesSpec::new(vec![-nn, lambda, d.clone()], vec![c.clone(), lower], q.clone(), int(1))?;
    Ok(TransformResult {
        kind: TheoremKind::ThomaeTerminating,
        prefactor: Prefactor::PochhammerRatio {
            top: e - d,
            bottom: e.clone(),
            n,
        },
        source,
        target,
        polynomial: q,
        conditions,
    })
}

/// A theorem application as plain data: what the CLI reads and the
/// verification harness generates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "kebab-case")]
pub enum Case {
    Euler1 {
        #[serde(with = "serde_rational")]
        a: Rational,
        #[serde(with = "serde_rational")]
        b: Rational,
        #[serde(with = "serde_rational")]
        c: Rational,
        pairs: ParamPairs,
        #[serde(with = "serde_rational")]
        x: Rational,
    },
    Euler2 {
        #[serde(with = "serde_rational")]
        a: Rational,
        #[serde(with = "serde_rational")]
        b: Rational,
        #[serde(with = "serde_rational")]
        c: Rational,
        pairs: ParamPairs,
        #[serde(with = "serde_rational")]
        x: Rational,
    },
    Thomae {
        #[serde(with = "serde_rational")]
        a: Rational,
        #[serde(with = "serde_rational")]
        b: Rational,
        #[serde(with = "serde_rational")]
        c: Rational,
        #[serde(with = "serde_rational")]
        d: Rational,
        #[serde(with = "serde_rational")]
        e: Rational,
        pairs: ParamPairs,
    },
    ThomaeTerminating {
        n: usize,
        #[serde(with = "serde_rational")]
        b: Rational,
        #[serde(with = "serde_rational")]
        c: Rational,
        #[serde(with = "serde_rational")]
        d: Rational,
        #[serde(with = "serde_rational")]
        e: Rational,
        pairs: ParamPairs,
    },
}

impl Case {
    pub fn kind(&self) -> TheoremKind {
        match self {
            Case::Euler1 { .. } => TheoremKind::Euler1,
            Case::Euler2 { .. } => TheoremKind::Euler2,
            Case::Thomae { .. } => TheoremKind::Thomae,
            Case::ThomaeTerminating { .. } => TheoremKind::ThomaeTerminating,
        }
    }

    pub fn apply(&self) -> Result<TransformResult, TransformError> {
        match self {
            Case::Euler1 { a, b, c, pairs, x } => euler1(a, b, c, pairs, x),
            Case::Euler2 { a, b, c, pairs, x } => euler2(a, b, c, pairs, x),
            Case::Thomae { a, b, c, d, e, pairs } => thomae(a, b, c, d, e, pairs),
            Case::ThomaeTerminating { n, b, c, d, e, pairs } => thomae_terminating(*n, b, c, d, e, pairs),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = format_rational;
        match self {
            Case::Euler1 { a, b, c, pairs, x } | Case::Euler2 { a, b, c, pairs, x } => write!(
                f,
                "{} a={} b={} c={} pairs=[{}] x={}",
                self.kind(),
                r(a),
                r(b),
                r(c),
                pairs,
                r(x)
            ),
            Case::Thomae { a, b, c, d, e, pairs } => write!(
                f,
                "thomae a={} b={} c={} d={} e={} pairs=[{}]",
                r(a),
                r(b),
                r(c),
                r(d),
                r(e),
                pairs
            ),
            Case::ThomaeTerminating { n, b, c, d, e, pairs } => write!(
                f,
                "thomae-terminating n={n} b={} c={} d={} e={} pairs=[{}]",
                r(b),
                r(c),
                r(d),
                r(e),
                pairs
            ),
        }
    }
}

/// One cancellation performed by [`contract_pairs`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contraction {
    #[serde(with = "serde_rational")]
    pub zero: Rational,
    /// `"denominator"` when `zero + 1` met a denominator, else `"numerator"`.
    pub matched: String,
    #[serde(with = "serde_rational")]
    pub parameter: Rational,
}

/// Cancels weight zeros against kernel parameters: a zero `z` with `z + 1`
/// equal to a denominator `γ` turns `γ` into `z`; a zero equal to a
/// numerator `α` turns `α` into `α + 1`. Either way the factor `1 - t/z`
/// leaves the weight and the series is unchanged term by term.
pub fn contract_pairs(target: &WeightedSeriesSpec) -> WeightedSeriesSpec {
    contract_pairs_traced(target).0
}

pub fn contract_pairs_traced(target: &WeightedSeriesSpec) -> (WeightedSeriesSpec, Vec<Contraction>) {
    let mut nums = target.numerators().to_vec();
    let mut dens = target.denominators().to_vec();
    let mut weight = target.weight_polynomial().clone();
    let mut trace = Vec::new();
    'search: loop {
        for i in 0..dens.len() {
            let z = &dens[i] - int(1);
            if z == RBig::ZERO {
                continue;
            }
            let Some(rest) = weight.divide_out_zero(&z) else { continue };
            let mut candidate = dens.clone();
            candidate[i] = z.clone();
            if WeightedSeriesSpec::new(nums.clone(), candidate.clone(), rest.clone(), target.argument().clone()).is_ok() {
                trace.push(Contraction {
                    zero: z,
                    matched: "denominator".to_string(),
                    parameter: dens[i].clone(),
                });
                dens = candidate;
                weight = rest;
                continue 'search;
            }
        }
        for i in 0..nums.len() {
            let z = nums[i].clone();
            if z == RBig::ZERO {
                continue;
            }
            let Some(rest) = weight.divide_out_zero(&z) else { continue };
            let mut candidate = nums.clone();
            candidate[i] = &z + int(1);
            if WeightedSeriesSpec::new(candidate.clone(), dens.clone(), rest.clone(), target.argument().clone()).is_ok() {
                trace.push(Contraction {
                    zero: z.clone(),
                    matched: "numerator".to_string(),
                    parameter: z,
                });
                nums = candidate;
                weight = rest;
                continue 'search;
            }
        }
        break;
    }
    let out = WeightedSeriesSpec::new(nums, dens, weight, target.argument().clone())
        .expect("every accepted contraction step was validated");
    (out, trace)
}

/// All zeros of `p` with multiplicity when every one of them is rational.
pub fn all_rational_zeros(p: &RationalPolynomial) -> Option<Vec<Rational>> {
    let mut rest = p.clone();
    let mut zeros = Vec::new();
    while rest.degree()? > 0 {
        let set = find_zeros(&rest, RootOptions::default()).ok()?;
        let found = rational_zeros(&rest, &set);
        if found.is_empty() {
            return None;
        }
        for z in found {
            rest = rest.divide_out_zero(&z)?;
            zeros.push(z);
        }
    }
    zeros.sort();
    Some(zeros)
}

/// The target written with explicit `(z+1)/z` parameter pairs, if the
/// weight's zeros are all rational and none of them is a pole.
pub fn explicit_parameters(target: &WeightedSeriesSpec) -> Option<SeriesSpec> {
    let zeros = all_rational_zeros(target.weight_polynomial())?;
    target.with_explicit_pairs(&zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::series::eval_terminating;

    fn example_pairs() -> ParamPairs {
        ParamPairs::single(rat(1, 2), 2).unwrap()
    }

    fn sorted(mut v: Vec<Rational>) -> Vec<Rational> {
        v.sort();
        v
    }

    #[test]
    fn unit_thomae_example_contracts_to_printed_form() {
        let (a, b, c, d, e) = (rat(1, 4), rat(5, 2), rat(3, 2), int(1), int(8));
        let t = thomae(&a, &b, &c, &d, &e, &example_pairs()).unwrap();
        let s = rat(15, 4);
        assert_eq!(
            t.prefactor,
            Prefactor::GammaRatio {
                numerators: vec![e.clone(), s.clone()],
                denominators: vec![int(7), &s + int(1)],
            }
        );
        let (contracted, trace) = contract_pairs_traced(&t.target);
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].zero, rat(1, 2));
        let explicit = explicit_parameters(&contracted).unwrap();
        assert_eq!(sorted(explicit.numerators().to_vec()), sorted(vec![rat(-3, 4), int(-3), d, rat(7, 34)]));
        assert_eq!(
            sorted(explicit.denominators().to_vec()),
            sorted(vec![&e - rat(13, 4), rat(1, 2), rat(-27, 34)])
        );
        assert_eq!(explicit.termination_index(), Some(3));
    }

    #[test]
    fn terminating_thomae_example_family() {
        let (b, c, d, e) = (rat(5, 2), rat(3, 2), rat(2, 3), rat(7, 2));
        for n in 0..6usize {
            let t = thomae_terminating(n, &b, &c, &d, &e, &example_pairs()).unwrap();
            let contracted = contract_pairs(&t.target);
            let explicit = explicit_parameters(&contracted).unwrap();
            let nn = int(n as i64);
            assert_eq!(
                sorted(explicit.numerators().to_vec()),
                sorted(vec![-nn.clone(), int(-3), d.clone(), rat(11, 2)])
            );
            assert_eq!(
                sorted(explicit.denominators().to_vec()),
                sorted(vec![int(1) - &e + &d - &nn, rat(1, 2), rat(9, 2)])
            );
            assert_eq!(explicit.termination_index(), Some(n.min(3)));
            let lhs = eval_terminating(&t.source).unwrap();
            let rhs = t.prefactor.exact().unwrap() * eval_terminating(&t.target).unwrap();
            assert_eq!(lhs, rhs, "n = {n}");
            assert_eq!(eval_terminating(&contracted).unwrap(), eval_terminating(&t.target).unwrap());
            assert_eq!(eval_terminating(&explicit).unwrap(), eval_terminating(&t.target).unwrap());
        }
    }

    #[test]
    fn terminating_thomae_single_pair_exact() {
        let pp = ParamPairs::single(rat(1, 5), 1).unwrap();
        let t = thomae_terminating(4, &rat(1, 3), &int(3), &rat(2, 3), &int(6), &pp).unwrap();
        let lhs = eval_terminating(&t.source).unwrap();
        let rhs = t.prefactor.exact().unwrap() * eval_terminating(&t.target).unwrap();
        assert_eq!(lhs, rhs);
        let t0 = thomae_terminating(0, &rat(1, 3), &int(3), &rat(2, 3), &int(6), &pp).unwrap();
        assert_eq!(eval_terminating(&t0.source).unwrap(), int(1));
        assert_eq!(t0.prefactor.exact().unwrap(), int(1));
    }

    #[test]
    fn classical_reductions() {
        let (a, b, c, x) = (rat(1, 3), rat(2, 5), rat(7, 4), rat(1, 3));
        let pp = ParamPairs::empty();
        let t = euler1(&a, &b, &c, &pp, &x).unwrap();
        assert_eq!(t.polynomial, RationalPolynomial::one());
        assert_eq!(t.target.numerators(), &[a.clone(), &c - &b]);
        assert_eq!(*t.target.argument(), rat(-1, 2));
        let t = euler2(&a, &b, &c, &pp, &x).unwrap();
        assert_eq!(t.target.numerators(), &[&c - &a, &c - &b]);
        assert_eq!(
            t.prefactor,
            Prefactor::PowerOfOneMinusX {
                x: x.clone(),
                exponent: &c - &a - &b
            }
        );
        let (d, e) = (rat(1, 5), int(3));
        let t = thomae(&a, &b, &int(2), &d, &e, &pp).unwrap();
        let s = int(2) + &e - &a - &b - &d;
        assert_eq!(t.target.denominators(), &[int(2), &s + &d]);
        assert_eq!(t.target.numerators(), &[int(2) - &a, int(2) - &b, d.clone()]);
    }

    #[test]
    fn linear_zero_matches_closed_forms() {
        let (a, b, c, f) = (rat(2, 3), int(2), int(7), int(3));
        let pp = ParamPairs::single(f.clone(), 1).unwrap();
        let t = euler1(&a, &b, &c, &pp, &rat(-1, 2)).unwrap();
        let xi = (&c - &b - int(1)) * &f / (&f - &b);
        assert_eq!(all_rational_zeros(&t.polynomial).unwrap(), vec![xi]);
        let t = euler2(&a, &b, &c, &pp, &rat(-1, 2)).unwrap();
        let eta = (&c - &a - int(1)) * (&c - &b - int(1)) * &f / (&a * &b + (&c - &a - &b - int(1)) * &f);
        assert_eq!(all_rational_zeros(&t.polynomial).unwrap(), vec![eta]);
    }

    #[test]
    fn named_failures() {
        let pp = example_pairs();
        assert!(matches!(
            euler1(&int(1), &rat(1, 2), &int(3), &pp, &int(1)),
            Err(TransformError::Poly(PolyError::BEqualsF { index: 0 }))
        ));
        assert!(matches!(
            euler1(&int(1), &int(1), &int(5), &pp, &int(1)),
            Err(TransformError::ArgumentNotBelowOne(_))
        ));
        assert!(matches!(
            thomae(&rat(1, 4), &rat(5, 2), &rat(3, 2), &int(3), &int(2), &pp),
            Err(TransformError::EMinusDNotPositive(_))
        ));
        assert!(matches!(
            thomae(&rat(1, 4), &rat(5, 2), &rat(3, 2), &int(1), &int(4), &pp),
            Err(TransformError::ExcessNotPositive(_))
        ));
        assert!(matches!(
            thomae_terminating(3, &rat(1, 3), &int(3), &int(-4), &int(-1), &pp),
            Err(TransformError::EPochhammerZero)
        ));
        assert!(matches!(
            euler2(&int(1), &int(1), &int(3), &pp, &rat(1, 2)),
            Err(TransformError::Poly(PolyError::CMinusAMinusMVanishes))
        ));
        // b = 0 would shield the pole at c = 0 on one side only
        assert!(matches!(
            thomae(&rat(9, 10), &int(0), &int(0), &int(-7), &rat(3, 2), &ParamPairs::empty()),
            Err(TransformError::CNonpositiveInteger(_))
        ));
        let degenerate = ParamPairs::new([(int(-1), 1)]).unwrap();
        assert!(matches!(
            euler1(&rat(7, 6), &int(1), &rat(-8, 7), &degenerate, &rat(3, 10)),
            Err(TransformError::FNonpositiveInteger { index: 0, .. })
        ));
    }

    #[test]
    fn contraction_is_noop_without_matches() {
        let w = WeightedSeriesSpec::new(vec![rat(1, 3)], vec![rat(5, 7)], RationalPolynomial::one(), rat(1, 2)).unwrap();
        assert_eq!(contract_pairs(&w), w);
        let q = RationalPolynomial::new(vec![int(1), rat(3, 11)]);
        let w = WeightedSeriesSpec::new(vec![int(-4), rat(1, 3)], vec![rat(5, 7)], q, int(1)).unwrap();
        assert_eq!(contract_pairs(&w), w);
    }

    #[test]
    fn contraction_on_numerator() {
        // zero at 2/3 equals a numerator
        let q = RationalPolynomial::new(vec![int(1), rat(-3, 2)]);
        let w = WeightedSeriesSpec::new(vec![int(-4), rat(2, 3)], vec![rat(5, 7)], q, int(1)).unwrap();
        let (c, trace) = contract_pairs_traced(&w);
        assert_eq!(trace[0].matched, "numerator");
        assert_eq!(c.numerators(), &[int(-4), rat(5, 3)]);
        assert_eq!(c.weight_polynomial(), &RationalPolynomial::one());
        assert_eq!(eval_terminating(&c).unwrap(), eval_terminating(&w).unwrap());
    }

    #[test]
    fn serde_case_round_trip() {
        let case = Case::Thomae {
            a: rat(1, 4),
            b: rat(5, 2),
            c: rat(3, 2),
            d: int(1),
            e: int(8),
            pairs: example_pairs(),
        };
        let text = serde_json::to_string(&case).unwrap();
        assert_eq!(
            text,
            r#"{"theorem":"thomae","a":"1/4","b":"5/2","c":"3/2","d":"1","e":"8","pairs":[{"f":"1/2","m":2}]}"#
        );
        assert_eq!(serde_json::from_str::<Case>(&text).unwrap(), case);
    }
}
