//! `thomae`: construct, transform, evaluate and verify hypergeometric
//! transformations with integer-shifted parameter pairs.

mod job;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use thomae_core::exact::{parse_rational, ParamPairs, Rational};
use thomae_core::series::Acceleration;
use thomae_core::transforms::{Case, TheoremKind};

use job::{Document, EvalJob, InputError, Job, Numeric, PolyJob, PolyKind, Status, TransformJob, VerifyJob, VerifySource};

#[derive(Parser)]
#[command(name = "thomae", version, about = "Euler- and Thomae-type transformations with integer-shifted parameter pairs")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coefficients and zeros of Q_m and Q̂_m
    Poly(PolyArgs),
    /// Build a transformation and describe both sides
    Transform(TransformArgs),
    /// Evaluate a (weightless) hypergeometric series
    Eval(EvalArgs),
    /// Verify transformations on one case, a seeded batch, or the small sweep
    Verify(VerifyArgs),
    /// Re-run a saved JSON document and check the output is byte-identical
    Replay(ReplayArgs),
}

#[derive(Args)]
struct Params {
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    a: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    b: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    c: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    d: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    e: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    x: Option<Rational>,
    /// Termination order of the finite Thomae-type transformation
    #[arg(long)]
    n: Option<usize>,
    /// Parameter pairs `f1:m1,f2:m2`
    #[arg(long, value_parser = pairs, allow_hyphen_values = true, default_value = "")]
    pairs: ParamPairs,
}

#[derive(Args)]
struct NumericArgs {
    /// Working precision in decimal digits
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(10..=2000))]
    precision: u32,
    /// Relative tolerance
    #[arg(long, default_value_t = 1e-10, value_parser = tolerance)]
    tol: f64,
    /// Maximum number of series terms per evaluation
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    #[arg(long, value_enum, default_value_t = Accelerate::Levin)]
    accelerate: Accelerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Accelerate {
    Off,
    Levin,
}

impl NumericArgs {
    fn numeric(&self) -> Numeric {
        Numeric {
            precision: self.precision,
            tol: self.tol,
            budget: self.budget,
            accelerate: match self.accelerate {
                Accelerate::Off => Acceleration::Off,
                Accelerate::Levin => Acceleration::Levin,
            },
        }
    }
}

#[derive(Args)]
struct PolyArgs {
    #[arg(long, value_enum, default_value_t = PolyKind::Both)]
    kind: PolyKind,
    #[command(flatten)]
    params: Params,
}

#[derive(Args)]
struct TransformArgs {
    /// 1 | euler1, euler2, 2 | thomae, 3 | thomae-terminating
    #[arg(long, value_parser = theorem)]
    theorem: TheoremKind,
    #[command(flatten)]
    params: Params,
    /// Also cancel weight zeros against kernel parameters
    #[arg(long)]
    contract: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Numerator parameters, comma separated
    #[arg(long = "num", value_parser = rational, value_delimiter = ',', allow_hyphen_values = true)]
    numerators: Vec<Rational>,
    /// Denominator parameters, comma separated
    #[arg(long = "den", value_parser = rational, value_delimiter = ',', allow_hyphen_values = true)]
    denominators: Vec<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    x: Rational,
    /// Parameter pairs appended as `(f+m)` upstairs and `f` downstairs
    #[arg(long, value_parser = pairs, allow_hyphen_values = true, default_value = "")]
    pairs: ParamPairs,
    #[command(flatten)]
    numeric: NumericArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = theorem)]
    theorem: Option<TheoremKind>,
    /// Exhaustive exact sweep of the finite transformation
    #[arg(long, conflicts_with_all = ["seed", "count", "case"])]
    sweep_small: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, requires = "seed")]
    count: Option<usize>,
    /// A case as JSON, or a path to a file holding one
    #[arg(long, conflicts_with = "seed")]
    case: Option<String>,
    /// Treat inconclusive cases as failures
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    params: Params,
    #[command(flatten)]
    numeric: NumericArgs,
}

#[derive(Args)]
struct ReplayArgs {
    /// A JSON document written with `--format json`
    file: PathBuf,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn pairs(s: &str) -> Result<ParamPairs, String> {
    ParamPairs::parse(s).map_err(|e| e.to_string())
}

fn tolerance(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 && t < 1.0 => Ok(t),
        Ok(_) => Err("tolerance must lie in (0, 1)".to_string()),
        Err(e) => Err(e.to_string()),
    }
}

fn theorem(s: &str) -> Result<TheoremKind, String> {
    match s {
        "1" | "euler1" => Ok(TheoremKind::Euler1),
        "euler2" => Ok(TheoremKind::Euler2),
        "2" | "thomae" => Ok(TheoremKind::Thomae),
        "3" | "thomae-terminating" => Ok(TheoremKind::ThomaeTerminating),
        _ => Err(format!("unknown theorem `{s}` (expected 1, euler1, euler2, 2, thomae, 3, thomae-terminating)")),
    }
}

fn required(value: &Option<Rational>, flag: &str, kind: &str) -> Result<Rational, InputError> {
    value.clone().ok_or_else(|| InputError(format!("--{flag} is required for {kind}")))
}

fn build_case(kind: &TheoremKind, p: &Params) -> Result<Case, InputError> {
    let k = kind.to_string();
    let pairs = p.pairs.clone();
    Ok(match kind {
        TheoremKind::Euler1 | TheoremKind::Euler2 => {
            let (a, b, c, x) = (required(&p.a, "a", &k)?, required(&p.b, "b", &k)?, required(&p.c, "c", &k)?, required(&p.x, "x", &k)?);
            if *kind == TheoremKind::Euler1 {
                Case::Euler1 { a, b, c, pairs, x }
            } else {
                Case::Euler2 { a, b, c, pairs, x }
            }
        }
        TheoremKind::Thomae => Case::Thomae {
            a: required(&p.a, "a", &k)?,
            b: required(&p.b, "b", &k)?,
            c: required(&p.c, "c", &k)?,
            d: required(&p.d, "d", &k)?,
            e: required(&p.e, "e", &k)?,
            pairs,
        },
        TheoremKind::ThomaeTerminating => Case::ThomaeTerminating {
            n: p.n.ok_or_else(|| InputError(format!("--n is required for {k}")))?,
            b: required(&p.b, "b", &k)?,
            c: required(&p.c, "c", &k)?,
            d: required(&p.d, "d", &k)?,
            e: required(&p.e, "e", &k)?,
            pairs,
        },
    })
}

fn read_case(arg: &str) -> Result<Case, InputError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| InputError(format!("cannot read case file {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| InputError(format!("invalid case: {e}")))
}

fn build_job(command: Command) -> Result<Job, InputError> {
    Ok(match command {
        Command::Poly(args) => {
            let p = &args.params;
            let k = format!("{:?}", args.kind).to_lowercase();
            let a = match args.kind {
                PolyKind::Q => None,
                _ => Some(required(&p.a, "a", &k)?),
            };
            Job::Poly(PolyJob {
                kind: args.kind,
                a,
                b: required(&p.b, "b", &k)?,
                c: required(&p.c, "c", &k)?,
                pairs: p.pairs.clone(),
            })
        }
        Command::Transform(args) => Job::Transform(TransformJob {
            case: build_case(&args.theorem, &args.params)?,
            contract: args.contract,
        }),
        Command::Eval(args) => Job::Eval(EvalJob {
            numerators: args.numerators,
            denominators: args.denominators,
            x: args.x,
            pairs: args.pairs,
            numeric: args.numeric.numeric(),
        }),
        Command::Verify(args) => {
            let source = if args.sweep_small {
                match args.theorem {
                    Some(TheoremKind::ThomaeTerminating) | None => VerifySource::Sweep,
                    Some(other) => return Err(InputError(format!("--sweep-small is only defined for thomae-terminating, not {other}"))),
                }
            } else if let Some(case) = &args.case {
                let case = read_case(case)?;
                if args.theorem.as_ref().is_some_and(|t| *t != case.kind()) {
                    return Err(InputError(format!("--theorem disagrees with the case, which is {}", case.kind())));
                }
                VerifySource::Case { case: Box::new(case) }
            } else if let Some(seed) = args.seed {
                let theorem = args.theorem.ok_or_else(|| InputError("--theorem is required with --seed".to_string()))?;
                VerifySource::Random {
                    theorem,
                    seed,
                    count: args.count.unwrap_or(20),
                }
            } else {
                let theorem = args
                    .theorem
                    .ok_or_else(|| InputError("give --sweep-small, --case, --seed or --theorem with parameters".to_string()))?;
                VerifySource::Case {
                    case: Box::new(build_case(&theorem, &args.params)?),
                }
            };
            Job::Verify(VerifyJob {
                source,
                numeric: args.numeric.numeric(),
                strict: args.strict,
            })
        }
        Command::Replay(_) => unreachable!("replay is handled before job construction"),
    })
}

fn exit(status: Status) -> ExitCode {
    ExitCode::from(match status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Invalid => 2,
    })
}

fn replay(path: &PathBuf) -> ExitCode {
    let saved = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let doc: Document = match serde_json::from_str(&saved) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {} is not a saved document: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let (fresh, status) = job::run(doc.job).to_json();
    print!("{fresh}");
    if fresh != saved {
        eprintln!("replay differs from {}", path.display());
        return ExitCode::from(1);
    }
    exit(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Replay(args) = &cli.command {
        return replay(&args.file);
    }
    let job = match build_job(cli.command) {
        Ok(job) => job,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = job::run(job);
    let (text, status) = match cli.format {
        Format::Json => outcome.to_json(),
        Format::Text => outcome.to_text(),
    };
    print!("{text}");
    exit(status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_aliases() {
        assert_eq!(theorem("1").unwrap(), TheoremKind::Euler1);
        assert_eq!(theorem("euler2").unwrap(), TheoremKind::Euler2);
        assert_eq!(theorem("2").unwrap(), TheoremKind::Thomae);
        assert_eq!(theorem("thomae-terminating").unwrap(), TheoremKind::ThomaeTerminating);
        assert!(theorem("4").is_err());
    }

    #[test]
    fn tolerance_range() {
        assert_eq!(tolerance("1e-8").unwrap(), 1e-8);
        assert!(tolerance("0").is_err());
        assert!(tolerance("NaN").is_err());
        assert!(tolerance("2").is_err());
    }

    #[test]
    fn cases_need_their_parameters() {
        let cli = Cli::try_parse_from(["thomae", "transform", "--theorem", "3", "--b", "1", "--c", "2", "--d", "1/2", "--e", "4"]).unwrap();
        let Command::Transform(args) = cli.command else { unreachable!() };
        let err = build_case(&args.theorem, &args.params).unwrap_err();
        assert_eq!(err.0, "--n is required for thomae-terminating");
    }

    #[test]
    fn negative_rationals_parse() {
        let cli = Cli::try_parse_from(["thomae", "poly", "--a", "-1/4", "--b", "-5/2", "--c", "3", "--pairs", "-1/2:1"]).unwrap();
        let Command::Poly(args) = cli.command else { unreachable!() };
        assert_eq!(args.params.a, Some(parse_rational("-1/4").unwrap()));
        assert_eq!(args.params.pairs.to_string(), "-1/2:1");
    }
}
