//! Independent checks of the transformations: two-sided evaluation, seeded
//! random case generation, an exhaustive exact sweep of the finite
//! transformation, a Beta-integral quadrature oracle, and a comparison of the
//! weighted (zero-free) target with its explicit parameter-pair form.

use std::collections::BTreeMap;

use dashu_ratio::RBig;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, int, rat, ParamPairs, Rational};
use crate::quadrature::{beta_weighted, QuadError, QuadOptions, Quadrature};
use crate::real::{self, bits_for_digits, format_sci, gamma_ratio, GammaError, Real};
use crate::roots::{find_zeros, RootError, RootOptions, ZeroSet};
use crate::series::{eval_numeric, eval_terminating, Acceleration, EvalOptions, EvalResult, SeriesError, SeriesSpec, SeriesTerms, WeightedSeriesSpec};
use crate::transforms::{Case, Condition, TheoremKind, TransformError, TransformResult};

#[derive(Debug, Clone, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("Beta weights need d > 0 and e - d > 0 (d = {}, e = {})", format_rational(.d), format_rational(.e))]
    BetaWeights { d: Rational, e: Rational },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Relative tolerance on the two sides.
    pub tol: f64,
    pub digits: u32,
    pub max_terms: usize,
    pub acceleration: Acceleration,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            digits: real::DEFAULT_DIGITS,
            max_terms: 100_000,
            acceleration: Acceleration::Levin,
        }
    }
}

impl VerifyOptions {
    fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            digits: self.digits,
            tol: self.tol * 0.1,
            relative: true,
            max_terms: self.max_terms,
            acceleration: self.acceleration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPath {
    Exact,
    Numeric,
}

/// Digits printed for numeric values in reports.
pub const REPORT_DIGITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub description: String,
    pub kind: TheoremKind,
    pub path: EvalPath,
    pub lhs: String,
    pub rhs: String,
    pub discrepancy: String,
    pub relative_discrepancy: f64,
    pub lhs_error_bound: f64,
    pub rhs_error_bound: f64,
    /// `tol·|lhs| + lhs_error_bound + rhs_error_bound`, zero on the exact path.
    pub tolerance: f64,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    pub verdict: Verdict,
    pub preconditions: Vec<Condition>,
    pub notes: Vec<String>,
}

/// Evaluates both sides of a transformation and compares them.
pub fn verify_transform(t: &TransformResult, description: &str, opts: &VerifyOptions) -> VerificationReport {
    let exact_sides = (
        t.source.termination_index(),
        t.target.termination_index(),
        t.prefactor.exact(),
    );
    if let (Some(n_lhs), Some(n_rhs), Some(factor)) = exact_sides {
        let lhs = eval_terminating(&t.source).expect("terminating source");
        let rhs = factor * eval_terminating(&t.target).expect("terminating target");
        let diff = &lhs - &rhs;
        let scale = if lhs == RBig::ZERO { RBig::ONE } else { lhs.clone() };
        let rel = (&diff / scale).to_f64().value().abs();
        return VerificationReport {
            description: description.to_string(),
            kind: t.kind.clone(),
            path: EvalPath::Exact,
            lhs: format_rational(&lhs),
            rhs: format_rational(&rhs),
            discrepancy: format_rational(&diff),
            relative_discrepancy: rel,
            lhs_error_bound: 0.0,
            rhs_error_bound: 0.0,
            tolerance: 0.0,
            lhs_terms: n_lhs + 1,
            rhs_terms: n_rhs + 1,
            verdict: if diff == RBig::ZERO { Verdict::Pass } else { Verdict::Fail },
            preconditions: t.conditions.clone(),
            notes: Vec::new(),
        };
    }

    let eval_opts = opts.eval_options();
    let bits = bits_for_digits(opts.digits);
    let mut notes = Vec::new();
    let mut bounds_met = true;
    let mut side = |spec: &dyn SeriesTerms, name: &str| -> Option<EvalResult> {
        match eval_numeric(spec, &eval_opts) {
            Ok(r) => Some(r),
            Err(SeriesError::ToleranceNotReached { best, .. }) => {
                notes.push(format!("{name}: error bound {:e} above target", best.abs_error_bound));
                bounds_met = false;
                Some(*best)
            }
            Err(e) => {
                notes.push(format!("{name}: {e}"));
                None
            }
        }
    };
    let lhs = side(&t.source, "lhs");
    let rhs_series = side(&t.target, "rhs");
    let factor = match t.prefactor.evaluate(bits) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("prefactor: {e}"));
            None
        }
    };
    let (Some(lhs), Some(rhs_series), Some(factor)) = (lhs, rhs_series, factor) else {
        return VerificationReport {
            description: description.to_string(),
            kind: t.kind.clone(),
            path: EvalPath::Numeric,
            lhs: String::new(),
            rhs: String::new(),
            discrepancy: String::new(),
            relative_discrepancy: f64::NAN,
            lhs_error_bound: f64::INFINITY,
            rhs_error_bound: f64::INFINITY,
            tolerance: opts.tol,
            lhs_terms: 0,
            rhs_terms: 0,
            verdict: Verdict::Inconclusive,
            preconditions: t.conditions.clone(),
            notes,
        };
    };
    let rhs = factor.clone() * &rhs_series.value;
    let rhs_bound = real::to_f64(&real::abs(&factor)) * rhs_series.abs_error_bound;
    let diff = lhs.value.clone() - &rhs;
    let abs_diff = real::to_f64(&real::abs(&diff));
    let lhs_mag = real::to_f64(&real::abs(&lhs.value));
    let tolerance = opts.tol * lhs_mag + lhs.abs_error_bound + rhs_bound;
    let verdict = if !bounds_met {
        Verdict::Inconclusive
    } else if abs_diff <= tolerance {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    VerificationReport {
        description: description.to_string(),
        kind: t.kind.clone(),
        path: EvalPath::Numeric,
        lhs: format_sci(&lhs.value, REPORT_DIGITS),
        rhs: format_sci(&rhs, REPORT_DIGITS),
        discrepancy: format_sci(&diff, 6),
        relative_discrepancy: if lhs_mag > 0.0 { abs_diff / lhs_mag } else { abs_diff },
        lhs_error_bound: lhs.abs_error_bound,
        rhs_error_bound: rhs_bound,
        tolerance,
        lhs_terms: lhs.terms_used,
        rhs_terms: rhs_series.terms_used,
        verdict,
        preconditions: t.conditions.clone(),
        notes,
    }
}

pub fn verify_case(case: &Case, opts: &VerifyOptions) -> Result<VerificationReport, TransformError> {
    let t = case.apply()?;
    Ok(verify_transform(&t, &case.to_string(), opts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled.
    Parallel,
}

/// Verifies every case; results come back in case order either way.
pub fn run_cases(cases: &[Case], opts: &VerifyOptions, exec: Execution) -> Vec<Result<VerificationReport, TransformError>> {
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            cases.par_iter().map(|c| verify_case(c, opts)).collect()
        }
        _ => cases.iter().map(|c| verify_case(c, opts)).collect(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub invalid: usize,
}

impl Summary {
    pub fn of(results: &[Result<VerificationReport, TransformError>]) -> Self {
        let mut s = Summary::default();
        for r in results {
            match r {
                Ok(rep) => match rep.verdict {
                    Verdict::Pass => s.pass += 1,
                    Verdict::Fail => s.fail += 1,
                    Verdict::Inconclusive => s.inconclusive += 1,
                },
                Err(_) => s.invalid += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.inconclusive + self.invalid
    }
}

/// Bounds for random case generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub theorem: TheoremKind,
    pub count: usize,
    pub max_pairs: usize,
    pub max_offset: u32,
    /// Parameters are `p/q` with `|p| <= max_numerator`, `1 <= q <= max_denominator`.
    pub max_numerator: i64,
    pub max_denominator: i64,
    /// Unit-argument cases: keep only `s >= min_excess`.
    pub min_excess: Option<Rational>,
    /// Keep only `s <= max_excess`.
    pub max_excess: Option<Rational>,
    pub min_e_minus_d: Option<Rational>,
    pub positive_d: bool,
    pub max_n: usize,
    /// Euler-type cases draw `x` from this list.
    pub x_values: Vec<Rational>,
    pub max_attempts: usize,
}

impl Profile {
    pub fn new(theorem: TheoremKind, count: usize) -> Self {
        Self {
            theorem,
            count,
            max_pairs: 2,
            max_offset: 3,
            max_numerator: 12,
            max_denominator: 12,
            min_excess: None,
            max_excess: None,
            min_e_minus_d: None,
            positive_d: false,
            max_n: 6,
            x_values: vec![rat(-1, 2), rat(3, 10)],
            max_attempts: 500 * count.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseBatch {
    pub cases: Vec<Case>,
    pub attempts: usize,
    pub note: Option<String>,
}

fn random_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    let p = rng.random_range(-max_num..=max_num);
    let q = rng.random_range(1..=max_den.max(1));
    rat(p, q)
}

fn random_pairs(rng: &mut ChaCha8Rng, profile: &Profile) -> Option<ParamPairs> {
    let r = rng.random_range(0..=profile.max_pairs);
    let pairs: Vec<(Rational, u32)> = (0..r)
        .map(|_| {
            (
                random_rational(rng, profile.max_numerator, profile.max_denominator),
                rng.random_range(1..=profile.max_offset.max(1)),
            )
        })
        .collect();
    ParamPairs::new(pairs).ok()
}

fn draw(rng: &mut ChaCha8Rng, profile: &Profile) -> Option<Case> {
    let mut q = || random_rational(rng, profile.max_numerator, profile.max_denominator);
    let (a, b, c, d, e) = (q(), q(), q(), q(), q());
    let pairs = random_pairs(rng, profile)?;
    Some(match profile.theorem {
        TheoremKind::Euler1 | TheoremKind::Euler2 => {
            let x = profile.x_values[rng.random_range(0..profile.x_values.len())].clone();
            if profile.theorem == TheoremKind::Euler1 {
                Case::Euler1 { a, b, c, pairs, x }
            } else {
                Case::Euler2 { a, b, c, pairs, x }
            }
        }
        TheoremKind::Thomae => Case::Thomae { a, b, c, d, e, pairs },
        TheoremKind::ThomaeTerminating => Case::ThomaeTerminating {
            n: rng.random_range(0..=profile.max_n),
            b,
            c,
            d,
            e,
            pairs,
        },
    })
}

fn profile_filter(case: &Case, t: &TransformResult, profile: &Profile) -> Result<(), &'static str> {
    let (d, e) = match case {
        Case::Thomae { d, e, .. } | Case::ThomaeTerminating { d, e, .. } => (d, e),
        _ => return Ok(()),
    };
    if profile.positive_d && *d <= RBig::ZERO {
        return Err("d not positive");
    }
    if let Some(min) = &profile.min_e_minus_d {
        if &(e - d) < min {
            return Err("e - d below profile minimum");
        }
    }
    let s = t.source.excess();
    if let Some(min) = &profile.min_excess {
        if &s < min {
            return Err("excess below profile minimum");
        }
    }
    if let Some(max) = &profile.max_excess {
        if &s > max {
            return Err("excess above profile maximum");
        }
    }
    Ok(())
}

fn rejection_reason(e: &TransformError) -> String {
    let text = e.to_string();
    // drop the specific values so reasons aggregate
    match text.find(|c: char| c == '=' || c.is_ascii_digit()) {
        Some(i) => text[..i].trim().to_string(),
        None => text,
    }
}

/// Deterministic admissible cases drawn by rejection sampling.
pub fn generate_cases(seed: u64, profile: &Profile) -> CaseBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    let mut attempts = 0;
    while cases.len() < profile.count && attempts < profile.max_attempts {
        attempts += 1;
        let Some(case) = draw(&mut rng, profile) else {
            *reasons.entry("invalid parameter pairs".to_string()).or_default() += 1;
            continue;
        };
        match case.apply() {
            Ok(t) => match profile_filter(&case, &t, profile) {
                Ok(()) => cases.push(case),
                Err(why) => *reasons.entry(why.to_string()).or_default() += 1,
            },
            Err(e) => *reasons.entry(rejection_reason(&e)).or_default() += 1,
        }
    }
    let note = (cases.len() < profile.count).then(|| {
        let top = reasons
            .iter()
            .max_by_key(|(_, n)| **n)
            .map(|(why, n)| format!("; most frequent rejection: {why} ({n} draws)"))
            .unwrap_or_default();
        format!(
            "found {} of {} admissible cases in {attempts} attempts{top}",
            cases.len(),
            profile.count
        )
    });
    CaseBatch { cases, attempts, note }
}

/// Every admissible finite-transformation case on a fixed small grid:
/// `n <= 6`, at most one parameter pair with offset `<= 3`.
pub fn terminating_sweep() -> Vec<Case> {
    let bs = [rat(1, 3), rat(5, 2), rat(-7, 4)];
    let cs = [rat(3, 2), int(4)];
    let ds = [rat(-1, 2), rat(2, 3)];
    let es = [rat(7, 2), int(5)];
    let mut pps = vec![ParamPairs::empty()];
    for f in [rat(1, 2), int(2), rat(-5, 3)] {
        for m in 1..=3 {
            pps.push(ParamPairs::single(f.clone(), m).expect("grid pairs are valid"));
        }
    }
    let mut out = Vec::new();
    for n in 0..=6 {
        for pairs in &pps {
            for b in &bs {
                for c in &cs {
                    for d in &ds {
                        for e in &es {
                            let case = Case::ThomaeTerminating {
                                n,
                                b: b.clone(),
                                c: c.clone(),
                                d: d.clone(),
                                e: e.clone(),
                                pairs: pairs.clone(),
                            };
                            if case.apply().is_ok() {
                                out.push(case);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// f64 value of a real-parameter series at argument `x`, summed until the
/// geometric tail estimate drops below `rel` of the sum.
fn sum_real(nums: &[f64], dens: &[f64], x: f64, rel: f64, max_terms: usize) -> Option<f64> {
    let settle = nums
        .iter()
        .chain(dens)
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .mul_add(2.0, 4.0) as usize;
    let mut term = 1.0f64;
    let mut total = 1.0f64;
    for k in 0..max_terms {
        let kf = k as f64;
        let mut ratio = x / (kf + 1.0);
        for a in nums {
            ratio *= a + kf;
        }
        for b in dens {
            ratio /= b + kf;
        }
        let next = term * ratio;
        if next == 0.0 {
            return Some(total);
        }
        total += next;
        term = next;
        if k >= settle {
            let rho = ratio.abs().max(x.abs().min(1.0));
            if rho < 1.0 && term.abs() * rho / (1.0 - rho) <= rel * total.abs() {
                return Some(total);
            }
        }
    }
    None
}

fn to_f64s(v: &[Rational]) -> Vec<f64> {
    v.iter().map(|q| q.to_f64().value()).collect()
}

/// `∫_0^1 x^(d-1) (1-x)^(e-d-1) F(z·x) dx` for the series `F` with argument
/// `z`, by tanh-sinh quadrature with `F` summed in f64 at each node.
pub fn beta_integral_oracle(d: &Rational, e: &Rational, inner: &SeriesSpec, tol: f64) -> Result<Quadrature, VerifyError> {
    let alpha = d.to_f64().value();
    let beta = (e - d).to_f64().value();
    if *d <= RBig::ZERO || beta <= 0.0 {
        return Err(VerifyError::BetaWeights { d: d.clone(), e: e.clone() });
    }
    let nums = to_f64s(inner.numerators());
    let dens = to_f64s(inner.denominators());
    let z = inner.argument().to_f64().value();
    let unit_radius = inner.termination_index().is_none() && nums.len() == dens.len() + 1;
    if unit_radius && z.abs() > 1.0 {
        return Err(VerifyError::Unsupported("inner series diverges on part of [0, 1]".into()));
    }
    // near x = 1 the inner series behaves like (1-x)^min(s, 0)
    let tau = if unit_radius && z == 1.0 {
        inner.excess().to_f64().value().min(0.0)
    } else {
        0.0
    };
    let exponent = beta + tau;
    if exponent <= 0.0 {
        return Err(VerifyError::Unsupported("integrand not integrable at x = 1".into()));
    }
    // the endpoint fit is off by a relative O(δ^min(|s|, 1))
    let cutoff = if unit_radius && z == 1.0 {
        let gain = inner.excess().to_f64().value().abs().min(1.0);
        (0.05 * tol * exponent).powf(1.0 / (exponent + gain)).clamp(1e-6, 1e-2)
    } else {
        0.0
    };
    let mut cutoff = cutoff;
    loop {
        let max_terms = if cutoff > 0.0 { (60.0 / cutoff) as usize + 10_000 } else { 1_000_000 };
        let opts = QuadOptions {
            tol,
            max_level: 9,
            cutoff,
        };
        let g = |x: f64, _one_minus_x: f64| sum_real(&nums, &dens, z * x, 1e-17, max_terms);
        match beta_weighted(alpha, beta, tau, g, &opts) {
            Err(QuadError::NotConverged { .. }) if cutoff > 1e-6 => cutoff = (cutoff / 10.0).max(1e-6),
            other => return Ok(other?),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaPipeline {
    pub integral: Quadrature,
    /// `Γ(d) Γ(e-d) / Γ(e)`
    pub beta: Real,
    /// The series with `d` and `e` appended.
    pub series: EvalResult,
    pub expected: f64,
    pub relative_discrepancy: f64,
    /// `tol` plus the relative error estimates of both paths.
    pub allowance: f64,
    pub pass: bool,
}

/// Checks `∫ x^(d-1)(1-x)^(e-d-1) F(x) dx = B(d, e-d) · G` where `G` is `F`
/// with numerator `d` and denominator `e` appended.
pub fn beta_pipeline(d: &Rational, e: &Rational, inner: &SeriesSpec, tol: f64, opts: &VerifyOptions) -> Result<BetaPipeline, VerifyError> {
    let integral = beta_integral_oracle(d, e, inner, tol * 0.1)?;
    let bits = bits_for_digits(opts.digits);
    let beta = gamma_ratio(&[d.clone(), e - d], std::slice::from_ref(e), bits)?;
    let mut nums = inner.numerators().to_vec();
    let mut dens = inner.denominators().to_vec();
    nums.push(d.clone());
    dens.push(e.clone());
    let outer = SeriesSpec::new(nums, dens, inner.argument().clone())?;
    let series = eval_numeric(&outer, &opts.eval_options())?;
    let expected = real::to_f64(&(beta.clone() * &series.value));
    let relative_discrepancy = (integral.value - expected).abs() / expected.abs();
    let series_rel = series.abs_error_bound / series.value_f64().abs();
    let allowance = tol + integral.error_estimate / integral.value.abs() + series_rel;
    Ok(BetaPipeline {
        integral,
        beta,
        series,
        expected,
        relative_discrepancy,
        allowance,
        pass: relative_discrepancy <= allowance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroFreeCheck {
    pub zeros: ZeroSet,
    pub weighted: f64,
    pub explicit: Complex64,
    pub relative_discrepancy: f64,
}

/// Sums the target twice: with the weight `w(-k)` in extended precision, and
/// in complex f64 with explicit pairs `(z+1)/z` for the numerically found
/// zeros `z` of `w`. Needs `|x| < 1` and `w(0) = 1`.
pub fn zero_free_check(target: &WeightedSeriesSpec, digits: u32) -> Result<ZeroFreeCheck, VerifyError> {
    let x = target.argument().to_f64().value();
    if x.abs() >= 1.0 {
        return Err(VerifyError::Unsupported("zero-free check needs |x| < 1".into()));
    }
    if target.weight_polynomial().coeff(0) != RBig::ONE {
        return Err(VerifyError::Unsupported("weight must equal 1 at the origin".into()));
    }
    let weighted = eval_numeric(
        target,
        &EvalOptions {
            digits,
            tol: 1e-16,
            ..EvalOptions::default()
        },
    )?
    .value_f64();
    let zeros = match target.weight_polynomial().degree() {
        Some(0) => ZeroSet {
            zeros: Vec::new(),
            residuals: Vec::new(),
            iterations: 0,
        },
        _ => find_zeros(target.weight_polynomial(), RootOptions::default())?,
    };
    let mut nums: Vec<Complex64> = to_f64s(target.numerators()).into_iter().map(Complex64::from).collect();
    let mut dens: Vec<Complex64> = to_f64s(target.denominators()).into_iter().map(Complex64::from).collect();
    for z in &zeros.zeros {
        nums.push(z + 1.0);
        dens.push(*z);
    }
    let explicit = sum_complex(&nums, &dens, x, 200_000)
        .ok_or_else(|| VerifyError::Unsupported("explicit form did not converge".into()))?;
    let relative_discrepancy = (explicit - weighted).norm() / weighted.abs();
    Ok(ZeroFreeCheck {
        zeros,
        weighted,
        explicit,
        relative_discrepancy,
    })
}

fn sum_complex(nums: &[Complex64], dens: &[Complex64], x: f64, max_terms: usize) -> Option<Complex64> {
    let settle = nums
        .iter()
        .chain(dens)
        .fold(0.0f64, |m, v| m.max(v.norm()))
        .mul_add(2.0, 4.0) as usize;
    let mut term = Complex64::new(1.0, 0.0);
    let mut total = term;
    for k in 0..max_terms {
        let kf = k as f64;
        let mut ratio = Complex64::new(x / (kf + 1.0), 0.0);
        for a in nums {
            ratio *= a + kf;
        }
        for b in dens {
            let den = b + kf;
            if den.norm() == 0.0 {
                return None;
            }
            ratio /= den;
        }
        term *= ratio;
        total += term;
        if term.norm() == 0.0 {
            return Some(total);
        }
        if k >= settle {
            let rho = ratio.norm().max(x.abs());
            if rho < 1.0 && term.norm() * rho / (1.0 - rho) <= 1e-17 * total.norm() {
                return Some(total);
            }
        }
    }
    None
}
