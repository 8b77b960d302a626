//! Jobs: the normalized, serializable form of a command line, and their
//! execution into text or JSON documents.

use std::fmt::{self, Write as _};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use thomae_core::exact::{c_coefficients, format_rational, serde_rational, serde_rational_vec, sigma_coefficients, int, ParamPairs, Rational};
use thomae_core::poly::{build_q, build_qhat, RationalPolynomial};
use thomae_core::real::{bits_for_digits, format_sci};
use thomae_core::roots::{find_zeros, rational_zeros, RootError, RootOptions};
use thomae_core::series::{eval_numeric, Acceleration, EvalOptions, EvalResult, SeriesError, SeriesSpec};
use thomae_core::transforms::{contract_pairs_traced, explicit_parameters, Case, TheoremKind};
use thomae_core::verify::{
    generate_cases, run_cases, terminating_sweep, verify_case, EvalPath, Execution, Profile, Summary, Verdict, VerificationReport,
    VerifyOptions, REPORT_DIGITS,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyKind {
    Q,
    Qhat,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numeric {
    /// Decimal digits.
    pub precision: u32,
    pub tol: f64,
    pub budget: usize,
    pub accelerate: Acceleration,
}

impl Numeric {
    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            tol: self.tol,
            digits: self.precision,
            max_terms: self.budget,
            acceleration: self.accelerate,
        }
    }
}

mod serde_opt_rational {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use thomae_core::exact::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        q.as_ref().map(format_rational).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJob {
    pub kind: PolyKind,
    #[serde(with = "serde_opt_rational")]
    pub a: Option<Rational>,
    #[serde(with = "serde_rational")]
    pub b: Rational,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub pairs: ParamPairs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformJob {
    pub case: Case,
    pub contract: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalJob {
    #[serde(with = "serde_rational_vec")]
    pub numerators: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub denominators: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub x: Rational,
    pub pairs: ParamPairs,
    pub numeric: Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum VerifySource {
    Case { case: Box<Case> },
    Sweep,
    Random { theorem: TheoremKind, seed: u64, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyJob {
    pub source: VerifySource,
    pub numeric: Numeric,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "inputs", rename_all = "kebab-case")]
pub enum Job {
    Poly(PolyJob),
    Transform(TransformJob),
    Eval(EvalJob),
    Verify(VerifyJob),
}

/// The JSON form of a finished job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    #[serde(flatten)]
    pub job: Job,
    pub outputs: Value,
    pub diagnostics: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Invalid,
}

struct Ran {
    outputs: Value,
    diagnostics: Value,
    text: String,
    status: Status,
}

pub struct Outcome {
    job: Job,
    result: Result<Ran, InputError>,
}

const FLOAT_FORMAT: &str = "binary64 values as shortest round-trip decimal strings";

/// Floats travel as strings so that NaN and infinities survive.
fn float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:e}")
    }
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

impl Outcome {
    pub fn to_json(&self) -> (String, Status) {
        let (outputs, diagnostics, status) = match &self.result {
            Ok(ran) => (ran.outputs.clone(), ran.diagnostics.clone(), ran.status),
            Err(e) => (Value::Null, json!({ "error": e.0 }), Status::Invalid),
        };
        let doc = Document {
            job: self.job.clone(),
            outputs,
            diagnostics,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("documents serialize");
        text.push('\n');
        (text, status)
    }

    pub fn to_text(&self) -> (String, Status) {
        match &self.result {
            Ok(ran) => (ran.text.clone(), ran.status),
            Err(e) => {
                eprintln!("error: {e}");
                (String::new(), Status::Invalid)
            }
        }
    }
}

pub fn run(job: Job) -> Outcome {
    let result = match &job {
        Job::Poly(j) => run_poly(j),
        Job::Transform(j) => run_transform(j),
        Job::Eval(j) => run_eval(j),
        Job::Verify(j) => run_verify(j),
    };
    Outcome { job, result }
}

fn zeros_json(p: &RationalPolynomial) -> (Value, Vec<String>, Option<String>) {
    let found = match find_zeros(p, RootOptions::default()) {
        Ok(z) => z,
        Err(RootError::Constant) => return (json!([]), Vec::new(), None),
        Err(e) => return (json!([]), Vec::new(), Some(e.to_string())),
    };
    let exact = rational_zeros(p, &found);
    let mut lines = Vec::new();
    let list: Vec<Value> = found
        .zeros
        .iter()
        .zip(&found.residuals)
        .map(|(z, res)| {
            let matched = (z.im == 0.0)
                .then(|| exact.iter().find(|q| (q.to_f64().value() - z.re).abs() <= 1e-9 * z.re.abs().max(1.0)))
                .flatten();
            lines.push(match matched {
                Some(q) => format!("{} (exact)", format_rational(q)),
                None if z.im == 0.0 => format!("{:.12e}  residual {res:.1e}", z.re),
                None => format!("{:.12e} {:+.12e}i  residual {res:.1e}", z.re, z.im),
            });
            json!({
                "re": float(z.re),
                "im": float(z.im),
                "residual": float(*res),
                "exact": matched.map(format_rational),
            })
        })
        .collect();
    (Value::Array(list), lines, None)
}

fn run_poly(j: &PolyJob) -> Result<Ran, InputError> {
    let sigma = sigma_coefficients(&j.pairs);
    let cs = c_coefficients(&j.pairs);
    let mut text = String::new();
    let _ = writeln!(text, "pairs: [{}]  m = {}", j.pairs, j.pairs.total_offset());
    let _ = writeln!(text, "sigma: [{}]", rationals(&sigma).join(", "));
    let _ = writeln!(text, "C:     [{}]", rationals(&cs).join(", "));
    let mut outputs = json!({
        "m": j.pairs.total_offset(),
        "sigma": rationals(&sigma),
        "c_coefficients": rationals(&cs),
    });
    let mut warnings = Vec::new();
    let mut polys = Vec::new();
    if j.kind != PolyKind::Qhat {
        let q = build_q(&j.pairs, &j.b, &j.c).map_err(|e| InputError(format!("precondition failed: {e}")))?;
        polys.push(("q", "Q", q));
    }
    if j.kind != PolyKind::Q {
        let a = j.a.as_ref().ok_or_else(|| InputError("a is required for qhat".to_string()))?;
        let q = build_qhat(&j.pairs, a, &j.b, &j.c).map_err(|e| InputError(format!("precondition failed: {e}")))?;
        polys.push(("qhat", "Q̂", q));
    }
    for (key, name, p) in polys {
        let (zeros, lines, warning) = zeros_json(&p);
        if let Some(w) = warning {
            warnings.push(format!("{key}: {w}"));
        }
        let degree = p.degree().unwrap_or(0);
        let _ = writeln!(text, "{name}(t) = {p}");
        let _ = writeln!(text, "  degree {degree}, coefficients [{}]", rationals(p.coeffs()).join(", "));
        for line in lines {
            let _ = writeln!(text, "  zero {line}");
        }
        outputs[key] = json!({
            "display": p.to_string(),
            "degree": degree,
            "coefficients": rationals(p.coeffs()),
            "zeros": zeros,
        });
    }
    Ok(Ran {
        outputs,
        diagnostics: json!({ "float_format": FLOAT_FORMAT, "warnings": warnings }),
        text,
        status: Status::Pass,
    })
}

fn run_transform(j: &TransformJob) -> Result<Ran, InputError> {
    let t = j.case.apply().map_err(|e| InputError(format!("precondition failed: {e}")))?;
    let bits = bits_for_digits(REPORT_DIGITS as u32 + 10);
    let mut warnings = Vec::new();
    let factor = match t.prefactor.evaluate(bits) {
        Ok(v) => Some(format_sci(&v, REPORT_DIGITS)),
        Err(e) => {
            warnings.push(format!("prefactor: {e}"));
            None
        }
    };
    let (zeros, zero_lines, warning) = zeros_json(&t.polynomial);
    warnings.extend(warning);
    let explicit = explicit_parameters(&t.target);
    let mut text = String::new();
    let _ = writeln!(text, "case: {}", j.case);
    let _ = writeln!(text, "lhs: {}", t.source);
    let _ = writeln!(text, "prefactor: {}{}", t.prefactor, factor.as_ref().map(|v| format!(" = {v}")).unwrap_or_default());
    let _ = writeln!(text, "rhs: {}", t.target);
    for line in &zero_lines {
        let _ = writeln!(text, "  weight zero {line}");
    }
    if let Some(e) = &explicit {
        let _ = writeln!(text, "rhs explicit: {e}");
    }
    let mut outputs = json!({
        "theorem": t.kind.to_string(),
        "case": j.case.to_string(),
        "source": { "display": t.source.to_string(), "series": t.source },
        "prefactor": { "display": t.prefactor.to_string(), "value": factor, "form": t.prefactor },
        "target": {
            "display": t.target.to_string(),
            "series": t.target,
            "weight_zeros": zeros,
            "explicit": explicit.as_ref().map(|e| json!({ "display": e.to_string(), "series": e })),
        },
        "conditions": t.conditions,
    });
    if j.contract {
        let (contracted, trace) = contract_pairs_traced(&t.target);
        let _ = writeln!(text, "rhs contracted: {contracted}");
        for step in &trace {
            let _ = writeln!(
                text,
                "  zero {} cancelled against {} {}",
                format_rational(&step.zero),
                step.matched,
                format_rational(&step.parameter)
            );
        }
        let contracted_explicit = explicit_parameters(&contracted);
        if let Some(e) = &contracted_explicit {
            let _ = writeln!(text, "rhs contracted explicit: {e}");
        }
        outputs["contracted"] = json!({
            "display": contracted.to_string(),
            "series": contracted,
            "steps": trace,
            "explicit": contracted_explicit.as_ref().map(|e| json!({ "display": e.to_string(), "series": e })),
        });
    }
    for c in &t.conditions {
        let _ = writeln!(text, "  [{}] {}: {}", if c.holds { "ok" } else { "!!" }, c.name, c.detail);
    }
    Ok(Ran {
        outputs,
        diagnostics: json!({ "float_format": FLOAT_FORMAT, "value_digits": REPORT_DIGITS, "warnings": warnings }),
        text,
        status: Status::Pass,
    })
}

fn eval_json(r: &EvalResult, digits: usize) -> Value {
    json!({
        "value": format_sci(&r.value, digits),
        "abs_error_bound": float(r.abs_error_bound),
        "terms_used": r.terms_used,
        "method": r.method,
        "exact": r.exact_value.as_ref().map(format_rational),
    })
}

fn run_eval(j: &EvalJob) -> Result<Ran, InputError> {
    let mut nums = j.numerators.clone();
    let mut dens = j.denominators.clone();
    nums.extend(j.pairs.upper());
    dens.extend(j.pairs.lower());
    let spec = SeriesSpec::new(nums, dens, j.x.clone()).map_err(|e| InputError(e.to_string()))?;
    let opts = EvalOptions {
        digits: j.numeric.precision,
        tol: j.numeric.tol,
        relative: true,
        max_terms: j.numeric.budget,
        acceleration: j.numeric.accelerate,
    };
    let digits = REPORT_DIGITS.min(j.numeric.precision as usize);
    let (result, status, note) = match eval_numeric(&spec, &opts) {
        Ok(r) => (r, Status::Pass, None),
        Err(SeriesError::ToleranceNotReached { best, .. }) => {
            let note = format!("tolerance {:e} not reached within {} terms", j.numeric.tol, best.terms_used);
            (*best, Status::Fail, Some(note))
        }
        Err(e) => return Err(InputError(e.to_string())),
    };
    let mut text = format!(
        "{spec}\n  = {}\n  error bound {:.3e}, {} terms, {}\n",
        format_sci(&result.value, digits),
        result.abs_error_bound,
        result.terms_used,
        serde_json::to_value(result.method).expect("methods serialize").as_str().unwrap_or_default()
    );
    if let Some(q) = &result.exact_value {
        let _ = writeln!(text, "  exact {}", format_rational(q));
    }
    if let Some(n) = &note {
        let _ = writeln!(text, "  warning: {n}");
    }
    Ok(Ran {
        outputs: json!({ "series": spec.to_string(), "result": eval_json(&result, digits) }),
        diagnostics: json!({ "float_format": FLOAT_FORMAT, "value_digits": digits, "warnings": note.into_iter().collect::<Vec<_>>() }),
        text,
        status,
    })
}

fn report_json(r: &VerificationReport) -> Value {
    json!({
        "description": r.description,
        "kind": r.kind,
        "path": r.path,
        "verdict": r.verdict,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "discrepancy": r.discrepancy,
        "relative_discrepancy": float(r.relative_discrepancy),
        "lhs_error_bound": float(r.lhs_error_bound),
        "rhs_error_bound": float(r.rhs_error_bound),
        "tolerance": float(r.tolerance),
        "lhs_terms": r.lhs_terms,
        "rhs_terms": r.rhs_terms,
        "preconditions": r.preconditions,
        "notes": r.notes,
    })
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

fn run_verify(j: &VerifyJob) -> Result<Ran, InputError> {
    let opts = j.numeric.verify_options();
    let mut diagnostics = json!({ "float_format": FLOAT_FORMAT, "value_digits": REPORT_DIGITS });
    let results = match &j.source {
        VerifySource::Case { case } => {
            vec![Ok(verify_case(case.as_ref(), &opts).map_err(|e| InputError(format!("precondition failed: {e}")))?)]
        }
        VerifySource::Sweep => run_cases(&terminating_sweep(), &opts, Execution::Parallel),
        VerifySource::Random { theorem, seed, count } => {
            let mut profile = Profile::new(theorem.clone(), *count);
            if *theorem == TheoremKind::Thomae {
                profile.min_excess = Some(int(1));
            }
            let batch = generate_cases(*seed, &profile);
            diagnostics["generation"] = json!({
                "attempts": batch.attempts,
                "generated": batch.cases.len(),
                "note": batch.note,
                "min_excess": profile.min_excess.as_ref().map(format_rational),
            });
            run_cases(&batch.cases, &opts, Execution::Parallel)
        }
    };
    let summary = Summary::of(&results);
    let reports: Vec<&VerificationReport> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let invalid: Vec<String> = results.iter().filter_map(|r| r.as_ref().err().map(|e| e.to_string())).collect();
    let listed = |v: Verdict| -> Vec<String> { reports.iter().filter(|r| r.verdict == v).map(|r| r.description.clone()).collect() };
    let (failed, inconclusive) = (listed(Verdict::Fail), listed(Verdict::Inconclusive));
    let exact: Vec<&&VerificationReport> = reports.iter().filter(|r| r.path == EvalPath::Exact).collect();
    let exact_nonzero = exact.iter().filter(|r| r.discrepancy != "0").count();

    let mut text = String::new();
    for r in &reports {
        let path = if r.path == EvalPath::Exact { "exact" } else { "numeric" };
        let _ = writeln!(
            text,
            "{:<12} {:<7} {}: lhs {} rhs {} (relative {:.1e})",
            verdict_label(r.verdict),
            path,
            r.description,
            r.lhs,
            r.rhs,
            r.relative_discrepancy
        );
    }
    let _ = writeln!(
        text,
        "summary: {} pass, {} fail, {} inconclusive, {} invalid of {}",
        summary.pass,
        summary.fail,
        summary.inconclusive,
        summary.invalid,
        summary.total()
    );
    if !exact.is_empty() {
        let _ = writeln!(text, "exact path: {} cases, {} nonzero discrepancies", exact.len(), exact_nonzero);
    }
    if !inconclusive.is_empty() {
        let _ = writeln!(text, "inconclusive:");
        for r in reports.iter().filter(|r| r.verdict == Verdict::Inconclusive) {
            let _ = writeln!(text, "  {}: {}", r.description, r.notes.join("; "));
        }
    }
    let status = if summary.fail > 0 || (j.strict && summary.inconclusive > 0) {
        Status::Fail
    } else {
        Status::Pass
    };
    Ok(Ran {
        outputs: json!({
            "summary": summary,
            "reports": reports.iter().map(|r| report_json(r)).collect::<Vec<_>>(),
            "failed": failed,
            "inconclusive": inconclusive,
            "invalid": invalid,
            "exact_path": { "cases": exact.len(), "nonzero_discrepancies": exact_nonzero },
        }),
        diagnostics,
        text,
        status,
    })
}
