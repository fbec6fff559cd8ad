use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use thinset::arith::{expand, ArithmeticSequence, CircleRational, DigitExpansion, TermSequence};
use thinset::ideals::{density_estimate, ideal_member, IdealDescriptor, Outcome, SetDescriptor, Verdict, DEFAULT_CUTOFF};
use thinset::rational::{format_rational, parse_rational};
use thinset::thinsets::{
    classical_convergence, default_epsilons, ideal_convergence, nset_partial_sums, Point, WeightRule, DEFAULT_DEPTH,
};
use thinset::witnesses::{build_and_verify, plan_witness, verify_certificate, Theorem, WitnessCertificate};
use thinset::{Error, Rational};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "thinset", version, about = "Digit expansions, ideal convergence and witness certificates on the circle")]
struct Cli {
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Digits of a rational point over an arithmetic sequence.
    Expand {
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "dyadic")]
        seq: String,
        #[arg(long, env = "THINSET_DEPTH", default_value_t = 64)]
        depth: u64,
    },
    /// Value of a digit expansion (JSON, inline or via --json-in).
    Reconstruct {
        #[arg(long)]
        expansion: Option<String>,
        #[arg(long)]
        json_in: Option<PathBuf>,
        /// Sum only the first DEPTH digits.
        #[arg(long)]
        depth: Option<u64>,
    },
    /// Density estimate of a set descriptor.
    Density {
        #[command(flatten)]
        set: SetInput,
        #[arg(long, env = "THINSET_DEPTH", default_value_t = DEFAULT_CUTOFF)]
        cutoff: u64,
    },
    /// Membership of a set descriptor in an ideal.
    IdealMember {
        #[arg(long)]
        ideal: String,
        #[command(flatten)]
        set: SetInput,
        #[arg(long, env = "THINSET_DEPTH", default_value_t = DEFAULT_CUTOFF)]
        cutoff: u64,
    },
    /// Whether ‖a_n x‖ -> 0, classically or along an ideal.
    Converge {
        #[command(flatten)]
        point: PointInput,
        #[arg(long)]
        a: String,
        #[arg(long)]
        ideal: Option<String>,
        #[arg(long, env = "THINSET_DEPTH", default_value_t = DEFAULT_DEPTH)]
        depth: u64,
        /// Comma-separated thresholds, e.g. 1/4,1/8.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Partial sums of Σ r_n ‖a_n x‖.
    Nset {
        #[command(flatten)]
        point: PointInput,
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "1/n")]
        weights: String,
        #[arg(long, env = "THINSET_DEPTH", default_value_t = 10_000)]
        depth: u64,
    },
    /// Build and check a witness certificate.
    Witness {
        theorem: String,
        #[arg(long, default_value = "dyadic")]
        seq: String,
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "density")]
        ideal: String,
        #[arg(long, default_value_t = 8)]
        count: u64,
    },
    /// Re-check a certificate file.
    Verify {
        /// Certificate file (same as --json-in).
        file: Option<PathBuf>,
        #[arg(long)]
        json_in: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SetInput {
    /// Set descriptor as JSON, e.g. {"kind":"geometric","base":2}.
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    json_in: Option<PathBuf>,
}

#[derive(Args)]
struct PointInput {
    /// A rational in [0, 1) or a digit expansion as JSON.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    json_in: Option<PathBuf>,
}

/// An error reported with exit code 64.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

/// Library errors in user input are usage errors; the rest mean the
/// computation could not reach a verdict.
fn lib(e: Error) -> anyhow::Error {
    match e {
        Error::Parse(_)
        | Error::Schema(_)
        | Error::Domain(_)
        | Error::InvalidSequence(_)
        | Error::InvalidSet(_)
        | Error::Precondition(_)
        | Error::UnsupportedIdeal(_) => usage(e.to_string()),
        other => anyhow!(other),
    }
}

fn read_input(inline: Option<&str>, file: Option<&Path>, what: &str) -> anyhow::Result<String> {
    match (inline, file) {
        (Some(s), None) => match s.strip_prefix('@') {
            Some(path) => read_file(Path::new(path)),
            None => Ok(s.to_string()),
        },
        (None, Some(p)) => read_file(p),
        (Some(_), Some(_)) => Err(usage(format!("give the {what} inline or with --json-in, not both"))),
        (None, None) => Err(usage(format!("missing {what}"))),
    }
}

fn read_file(p: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> anyhow::Result<T> {
    serde_json::from_str(s).map_err(|e| usage(format!("invalid {what}: {e}")))
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> anyhow::Result<T> {
    s.parse().map_err(lib)
}

fn outcome_code(o: Outcome) -> u8 {
    match o {
        Outcome::Member => 0,
        Outcome::NotMember => 1,
        Outcome::Inconclusive => 2,
    }
}

fn pass_code(pass: bool) -> u8 {
    if pass {
        0
    } else {
        1
    }
}

fn verdict_doc(command: &str, verdict: &Verdict, mut body: Value) -> (Value, u8) {
    body["command"] = json!(command);
    body["outcome"] = json!(verdict.outcome.as_str());
    body["verdict"] = serde_json::to_value(verdict).expect("serializable");
    (body, outcome_code(verdict.outcome))
}

fn pass_doc(command: &str, pass: bool, mut body: Value) -> (Value, u8) {
    body["command"] = json!(command);
    body["outcome"] = json!(if pass { "pass" } else { "fail" });
    body["pass"] = json!(pass);
    (body, pass_code(pass))
}

fn digit_value(d: &BigUint) -> Value {
    match d.to_u64() {
        Some(x) if x < (1 << 53) => json!(x),
        _ => json!(d.to_string()),
    }
}

fn epsilons(s: Option<&str>) -> anyhow::Result<Vec<Rational>> {
    let Some(s) = s else { return Ok(default_epsilons()) };
    let eps = s
        .split(',')
        .map(|p| parse_rational(p.trim()).map_err(|e| usage(e.to_string())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if eps.is_empty() || eps.iter().any(|e| e <= &thinset::rational::rat(0, 1)) {
        return Err(usage("thresholds must be positive"));
    }
    Ok(eps)
}

fn positive(name: &str, n: u64) -> anyhow::Result<u64> {
    if n == 0 {
        Err(usage(format!("--{name} must be positive")))
    } else {
        Ok(n)
    }
}

fn run(command: Command) -> anyhow::Result<(Value, u8)> {
    match command {
        Command::Expand { x, seq, depth } => {
            let depth = positive("depth", depth)?;
            let x: CircleRational = parse(&x)?;
            let seq: ArithmeticSequence = parse(&seq)?;
            let e = expand(&x, &seq, depth).map_err(lib)?;
            let digits: Vec<Value> = e.dense(depth).map_err(lib)?.iter().map(digit_value).collect();
            let body = json!({
                "x": x.to_string(),
                "sequence": seq.to_string(),
                "depth": depth,
                "digits": digits,
                "finite": e.is_finite(),
                "expansion": e,
            });
            Ok(pass_doc("expand", true, body))
        }
        Command::Reconstruct { expansion, json_in, depth } => {
            let text = read_input(expansion.as_deref(), json_in.as_deref(), "expansion")?;
            let e: DigitExpansion = parse_json(&text, "expansion")?;
            let value = match depth {
                Some(d) => e.reconstruct(d),
                None => e.value(),
            }
            .map_err(lib)?;
            let body = json!({ "value": value.to_string(), "exact": depth.is_none() });
            Ok(pass_doc("reconstruct", true, body))
        }
        Command::Density { set, cutoff } => {
            let cutoff = positive("cutoff", cutoff)?;
            let s: SetDescriptor = parse_json(&read_input(set.set.as_deref(), set.json_in.as_deref(), "set")?, "set")?;
            let est = density_estimate(&s, cutoff).map_err(lib)?;
            let verdict = ideal_member(&IdealDescriptor::Density, &s, cutoff);
            Ok(verdict_doc("density", &verdict, json!({ "set": s, "estimate": est })))
        }
        Command::IdealMember { ideal, set, cutoff } => {
            let cutoff = positive("cutoff", cutoff)?;
            let ideal: IdealDescriptor = parse(&ideal)?;
            let s: SetDescriptor = parse_json(&read_input(set.set.as_deref(), set.json_in.as_deref(), "set")?, "set")?;
            let verdict = ideal_member(&ideal, &s, cutoff);
            Ok(verdict_doc("ideal-member", &verdict, json!({ "ideal": ideal, "set": s })))
        }
        Command::Converge { point, a, ideal, depth, eps } => {
            let depth = positive("depth", depth)?;
            let x: Point = parse(&read_input(point.x.as_deref(), point.json_in.as_deref(), "point")?)?;
            let a: TermSequence = parse(&a)?;
            let eps = epsilons(eps.as_deref())?;
            match ideal {
                None => {
                    let report = classical_convergence(&x, &a, depth, &eps).map_err(lib)?;
                    let verdict = report.verdict.clone();
                    Ok(verdict_doc("converge", &verdict, json!({ "report": report })))
                }
                Some(spec) => {
                    let ideal: IdealDescriptor = parse(&spec)?;
                    let mut per_eps = vec![];
                    let mut outcomes = vec![];
                    for e in &eps {
                        let v = ideal_convergence(&x, &a, &ideal, depth, e).map_err(lib)?;
                        outcomes.push(v.outcome);
                        per_eps.push(json!({ "epsilon": format_rational(e), "verdict": v }));
                    }
                    // one failing threshold refutes, every threshold must certify
                    let top = if outcomes.contains(&Outcome::NotMember) {
                        Outcome::NotMember
                    } else if outcomes.iter().all(|o| *o == Outcome::Member) {
                        Outcome::Member
                    } else {
                        Outcome::Inconclusive
                    };
                    let verdict = match top {
                        Outcome::Member => Verdict::member("every threshold certified"),
                        Outcome::NotMember => Verdict::not_member("some threshold refuted"),
                        Outcome::Inconclusive => Verdict::inconclusive("not every threshold was decided"),
                    }
                    .with_cutoff(depth);
                    let body = json!({ "ideal": ideal, "terms": a, "depth": depth, "thresholds": per_eps });
                    Ok(verdict_doc("converge", &verdict, body))
                }
            }
        }
        Command::Nset { point, a, weights, depth } => {
            let depth = positive("depth", depth)?;
            let x: Point = parse(&read_input(point.x.as_deref(), point.json_in.as_deref(), "point")?)?;
            let a: TermSequence = parse(&a)?;
            let weights: WeightRule = parse(&weights)?;
            let report = nset_partial_sums(&x, &a, &weights, depth).map_err(lib)?;
            let verdict = report.verdict.clone();
            Ok(verdict_doc("nset", &verdict, json!({ "report": report })))
        }
        Command::Witness { theorem, seq, a, ideal, count } => {
            let theorem: Theorem = theorem.parse().map_err(lib)?;
            let seq: ArithmeticSequence = parse(&seq)?;
            let a: TermSequence = parse(&a)?;
            let ideal: IdealDescriptor = parse(&ideal)?;
            let plan = plan_witness(theorem, &seq, &a, &ideal, count).map_err(lib)?;
            let cert = build_and_verify(&plan).map_err(lib)?;
            let code = pass_code(cert.pass);
            let mut body = serde_json::to_value(&cert).context("serializing the certificate")?;
            body["outcome"] = json!(if cert.pass { "pass" } else { "fail" });
            Ok((body, code))
        }
        Command::Verify { file, json_in } => {
            let path = match (file, json_in) {
                (Some(p), None) | (None, Some(p)) => p,
                (Some(_), Some(_)) => return Err(usage("give the certificate once")),
                (None, None) => return Err(usage("missing certificate file")),
            };
            let cert: WitnessCertificate = parse_json(&read_file(&path)?, "certificate")?;
            let report = verify_certificate(&cert).map_err(lib)?;
            let pass = report.pass;
            Ok(pass_doc("verify", pass, json!({ "theorem": cert.theorem, "report": report })))
        }
    }
}

fn emit(doc: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            // a closed pipe downstream is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(cli.command).and_then(|(doc, code)| emit(&doc, cli.out.as_deref()).map(|_| code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("thinset: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                // no verdict could be reached
                let doc = json!({ "outcome": "inconclusive", "error": e.to_string() });
                let _ = emit(&doc, cli.out.as_deref());
                ExitCode::from(2)
            }
        }
    }
}
