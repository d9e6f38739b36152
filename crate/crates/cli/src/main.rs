//! `artin-flow`: continued fractions, first-return orbits, codings and the
//! verification experiments from the command line.
//!
//! Exit codes: 0 success or pass, 1 statistical failure, 2 parse or usage
//! error, 3 domain error, 4 precision exhausted.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use artin_flow::algebra::{caret_diagnostic, parse_fp_poly, parse_poly, FieldSpec, Poly, RationalFunction};
use artin_flow::artin::{cf_expand_general, Termination, DEFAULT_MAX_TERMS};
use artin_flow::coding::{beta_seq_json, code_decorated, orbit, GeodesicSection};
use artin_flow::laurent::{LaurentSeries, DEFAULT_PRECISION};
use artin_flow::measure::{
    entropy_closed_form, entropy_series, sample_m, verify_calcintegral_report, verify_cocycle,
    verify_coding, verify_entropy, verify_haar_invariance, verify_iid_quotients, verify_sojourn,
    verify_tree, Bias, ExperimentConfig, Report, RngStream,
};
use artin_flow::moebius::Homography;
use artin_flow::tree::{geometry_csv, sojourn_lengths, validate_geodesic, vertex_distance, TreeVertex};
use artin_flow::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "artin-flow", version, about = "Artin continued fractions and the geodesic flow on the Bruhat-Tits tree")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued-fraction expansion of a rational function or a series.
    Cf(CfArgs),
    /// Iterate the first-return map and dump the emitted quotients.
    Orbit(OrbitArgs),
    /// Quotient and affine codings of a section, with tree geometry.
    Code(CodeArgs),
    /// Run one of the verification experiments.
    Verify(VerifyArgs),
    /// Entropy of the quotient shift: closed form against the series.
    Entropy(EntropyArgs),
    /// Tree distance between the vertices g x_* and h x_*.
    Distance(DistanceArgs),
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Irreducible modulus in `t`, required when n > 1 (e.g. "t^2 + t + 1").
    #[arg(long)]
    modulus: Option<String>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn prec_arg() -> clap::builder::RangedI64ValueParser<i64> {
    clap::value_parser!(i64).range(8..)
}

#[derive(Args)]
struct CfArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Numerator of a rational input.
    #[arg(long, requires = "den", conflicts_with = "series")]
    num: Option<String>,
    /// Denominator of a rational input.
    #[arg(long, requires = "num")]
    den: Option<String>,
    /// A Laurent series such as "X^-1 + X^-3 + O(X^-40)".
    #[arg(long, required_unless_present = "num")]
    series: Option<String>,
    #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = prec_arg())]
    prec: i64,
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    max_terms: usize,
    #[command(flatten)]
    out: OutputArgs,
}

/// A section given explicitly or drawn from m with `--seed`.
#[derive(Args)]
struct SectionArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = prec_arg())]
    prec: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Backward endpoint (a series with an integer part of positive degree).
    #[arg(long, allow_hyphen_values = true)]
    xi_minus: Option<String>,
    /// Forward endpoint as a series in X^-1 O.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "num")]
    xi_plus: Option<String>,
    /// Forward endpoint as a rational function: numerator.
    #[arg(long, requires = "den")]
    num: Option<String>,
    #[arg(long, requires = "num")]
    den: Option<String>,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    section: SectionArgs,
    #[arg(long, default_value_t = 64)]
    steps: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CodeArgs {
    #[command(flatten)]
    section: SectionArgs,
    /// Number of quotients on each side of the origin.
    #[arg(long, default_value_t = 8)]
    horizon: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Haar,
    Iid,
    Sojourn,
    Entropy,
    Calcintegral,
    Cocycle,
    Coding,
    Tree,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = prec_arg())]
    prec: i64,
    /// Cylinder depth for `haar`.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
    /// Window half-width for `iid`, `coding` and `tree`.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    horizon: Option<u64>,
    /// Truncation degree for `entropy` and `calcintegral`.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    degree: Option<u32>,
    /// Chi-square acceptance quantile.
    #[arg(long, default_value_t = 0.999)]
    level: f64,
    /// Harness self-test for `haar`: force the first output coefficient, which must fail.
    #[arg(long)]
    self_test: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(1..))]
    degree: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Matrix "a, b, c, d" of the first vertex (default: the identity).
    #[arg(long)]
    from: Option<String>,
    /// Matrix "a, b, c, d" of the second vertex.
    #[arg(long)]
    to: String,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    Parse { input: String, position: usize, message: String },
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Parse { .. } => 2,
            Failure::Core(Error::PrecisionExhausted { .. }) => 4,
            Failure::Core(_) | Failure::Io(_) => 3,
        }
    }

    fn describe(&self) -> String {
        match self {
            // on its own lines so the caret lines up with the input
            Failure::Parse { input, position, message } => {
                format!("could not parse input\n{}", caret_diagnostic(input, *position, message))
            }
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Runs a parser on `input`, attaching the input to parse errors for the caret diagnostic.
fn parsing<T>(input: &str, f: impl FnOnce(&str) -> artin_flow::Result<T>) -> CliResult<T> {
    f(input).map_err(|e| match e {
        Error::Parse { position, message } => Failure::Parse {
            input: input.to_string(),
            position,
            message,
        },
        other => Failure::Core(other),
    })
}

impl FieldArgs {
    fn build(&self) -> CliResult<FieldSpec> {
        let modulus = match &self.modulus {
            Some(m) => Some(parsing(m, |s| parse_fp_poly(self.p, s, 't'))?),
            None => None,
        };
        Ok(FieldSpec::new(self.p, self.n, modulus)?)
    }
}

fn rational(k: &FieldSpec, num: &str, den: &str) -> CliResult<RationalFunction> {
    let num = parsing(num, |s| parse_poly(k, s))?;
    let den = parsing(den, |s| parse_poly(k, s))?;
    Ok(RationalFunction::new(num, den)?)
}

/// The command line, quoted so it can be pasted back into a shell.
fn command_line() -> String {
    std::iter::once("artin-flow".to_string())
        .chain(std::env::args().skip(1))
        .map(|a| {
            if !a.is_empty() && a.chars().all(|c| c.is_ascii_alphanumeric() || "-_./=:,".contains(c)) {
                a
            } else {
                format!("'{}'", a.replace('\'', r"'\''"))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

fn run_cf(a: &CfArgs) -> CliResult<Output> {
    let k = a.field.build()?;
    let series = match (&a.num, &a.den, &a.series) {
        (Some(n), Some(d), _) => LaurentSeries::from_rational(&rational(&k, n, d)?, a.prec)?,
        (_, _, Some(s)) => parsing(s, |s| LaurentSeries::parse(&k, s, a.prec))?,
        _ => unreachable!("clap enforces an input"),
    };
    let (a0, cf) = cf_expand_general(&series, a.max_terms)?;
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = cf.to_json();
            if !a0.is_zero() {
                v["integer_part"] = json!(a0.to_string());
            }
            json_text(&v)
        }
        Format::Csv => {
            let mut s = String::from("n,a,deg\n");
            if !a0.is_zero() {
                let _ = writeln!(s, "0,{a0},{}", a0.deg().unwrap());
            }
            for (i, t) in cf.terms.iter().enumerate() {
                let _ = writeln!(s, "{},{t},{}", i + 1, t.degree());
            }
            s
        }
    };
    Ok(Output::ok(text))
}

impl SectionArgs {
    fn build(&self, k: &FieldSpec) -> CliResult<GeodesicSection> {
        let drawn = sample_m(k, &mut RngStream::new(self.seed, 0), self.prec);
        let xi_plus = match (&self.xi_plus, &self.num, &self.den) {
            (Some(s), _, _) => parsing(s, |s| LaurentSeries::parse(k, s, self.prec))?,
            (None, Some(n), Some(d)) => LaurentSeries::from_rational(&rational(k, n, d)?, self.prec)?,
            _ => drawn.xi_plus,
        };
        let xi_minus = match &self.xi_minus {
            Some(s) => parsing(s, |s| LaurentSeries::parse(k, s, self.prec))?,
            None => drawn.xi_minus,
        };
        // rational endpoints are allowed here; the orbit stops on them
        match GeodesicSection::new(xi_minus.clone(), xi_plus.clone()) {
            Ok(s) => Ok(s),
            Err(Error::RationalEndpoint) => Ok(GeodesicSection { xi_minus, xi_plus }),
            Err(e) => Err(e.into()),
        }
    }
}

fn run_orbit(a: &OrbitArgs) -> CliResult<Output> {
    let k = a.section.field.build()?;
    let s = a.section.build(&k)?;
    let o = orbit(&s.xi_minus, &s.xi_plus, a.steps)?;
    if o.steps.is_empty() && o.terminated == Termination::PrecisionExhausted {
        return Err(Error::PrecisionExhausted {
            needed: 1,
            available: o.final_prec,
        }
        .into());
    }
    let text = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => o.to_csv(),
        Format::Json => json_text(&json!({
            "steps": o.steps.iter().map(|st| json!({
                "a": st.a.to_string(),
                "deg": st.a.degree(),
                "prec_remaining": st.prec_remaining,
            })).collect::<Vec<_>>(),
            "terminated": o.terminated.as_str(),
            "final_prec": o.final_prec,
        })),
    };
    Ok(Output::ok(text))
}

fn run_code(a: &CodeArgs) -> CliResult<Output> {
    let k = a.section.field.build()?;
    let s = a.section.build(&k)?;
    let s = GeodesicSection::new(s.xi_minus, s.xi_plus)?;
    let c = code_decorated(&s, a.horizon, a.horizon)?;
    let lengths = sojourn_lengths(&c.gammas)?;
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Csv => geometry_csv(&lengths),
        Format::Json => json_text(&json!({
            "quotients": c.quotients.iter().map(|(n, q)| json!({"n": n, "a": q.to_string()})).collect::<Vec<_>>(),
            "betas": beta_seq_json(&c.betas),
            "gammas": c.gammas.iter().map(|(n, g)| json!({"n": n, "matrix": g.to_json()})).collect::<Vec<_>>(),
            "sojourn": lengths.iter().map(|(n, d)| json!({"n": n, "d": d})).collect::<Vec<_>>(),
            "aligned": validate_geodesic(&c.gammas).aligned(),
        })),
    };
    Ok(Output::ok(text))
}

fn report_csv(r: &Report) -> String {
    format!(
        "experiment,q,seed,samples,statistic,dof,threshold,pass\n{},{},{},{},{},{},{},{}\n",
        r.experiment, r.q, r.seed, r.samples, r.statistic, r.dof, r.threshold, r.pass
    )
}

fn run_verify(a: &VerifyArgs) -> CliResult<Output> {
    let k = a.field.build()?;
    let default_samples = match a.experiment {
        Experiment::Haar | Experiment::Sojourn => 100_000,
        Experiment::Iid => 10_000,
        Experiment::Cocycle => 1_000,
        Experiment::Coding | Experiment::Tree => 100,
        Experiment::Entropy | Experiment::Calcintegral => 1,
    };
    let mut cfg = ExperimentConfig::new(a.seed, a.samples.unwrap_or(default_samples)).with_prec(a.prec);
    cfg.level = a.level;
    let horizon = |d: u64| a.horizon.unwrap_or(d) as usize;
    let mut r = match a.experiment {
        Experiment::Haar => {
            let bias = if a.self_test { Bias::Output(k.one()) } else { Bias::None };
            verify_haar_invariance(&k, &cfg, a.depth, bias)
        }
        Experiment::Iid => verify_iid_quotients(&k, &cfg, horizon(8)),
        Experiment::Sojourn => verify_sojourn(&k, &cfg),
        Experiment::Entropy => verify_entropy(&k, a.degree.unwrap_or(40)),
        Experiment::Calcintegral => verify_calcintegral_report(&k, a.degree.unwrap_or(10)),
        Experiment::Cocycle => verify_cocycle(&k, &cfg),
        Experiment::Coding => verify_coding(&k, &cfg, horizon(6)),
        Experiment::Tree => verify_tree(&k, &cfg, horizon(6)),
    };
    r.command = Some(command_line());
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&r.to_json()),
        Format::Csv => report_csv(&r),
    };
    let code = if r.exhausted {
        4
    } else if r.pass {
        0
    } else {
        1
    };
    Ok(Output { text, code })
}

fn run_entropy(a: &EntropyArgs) -> CliResult<Output> {
    let k = a.field.build()?;
    let closed = entropy_closed_form(&k);
    let s = entropy_series(&k, a.degree);
    let agree = (closed - s.value).abs() <= s.tail_bound + 1e-12;
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&json!({
            "q": k.order(),
            "closed_form": closed,
            "series": s.value,
            "degree": a.degree,
            "tail_bound": s.tail_bound,
            "agree": agree,
        })),
        Format::Csv => format!(
            "q,closed_form,series,degree,tail_bound,agree\n{},{closed},{},{},{},{agree}\n",
            k.order(),
            s.value,
            a.degree,
            s.tail_bound
        ),
    };
    Ok(Output { text, code: if agree { 0 } else { 1 } })
}

fn matrix(k: &FieldSpec, s: &str) -> CliResult<Homography> {
    let mut entries = Vec::new();
    let mut offset = 0;
    for part in s.split(',') {
        let p = parsing(part, |t| parse_poly(k, t)).map_err(|e| match e {
            // report the caret against the whole argument
            Failure::Parse { position, message, .. } => Failure::Parse {
                input: s.to_string(),
                position: offset + position,
                message,
            },
            other => other,
        })?;
        entries.push(p);
        offset += part.len() + 1;
    }
    let [a, b, c, d]: [Poly; 4] = entries.try_into().map_err(|v: Vec<Poly>| Failure::Parse {
        input: s.to_string(),
        position: s.len(),
        message: format!("expected 4 comma-separated entries, found {}", v.len()),
    })?;
    Ok(Homography::new(a, b, c, d)?)
}

fn run_distance(a: &DistanceArgs) -> CliResult<Output> {
    let k = a.field.build()?;
    let from = match &a.from {
        Some(s) => matrix(&k, s)?,
        None => Homography::identity(&k),
    };
    let to = matrix(&k, &a.to)?;
    let d = vertex_distance(&TreeVertex(from.clone()), &TreeVertex(to.clone()));
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&json!({"from": from.to_json(), "to": to.to_json(), "distance": d})),
        Format::Csv => format!("distance\n{d}\n"),
    };
    Ok(Output::ok(text))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out) = match &cli.command {
        Command::Cf(a) => (run_cf(a), &a.out),
        Command::Orbit(a) => (run_orbit(a), &a.out),
        Command::Code(a) => (run_code(a), &a.out),
        Command::Verify(a) => (run_verify(a), &a.out),
        Command::Entropy(a) => (run_entropy(a), &a.out),
        Command::Distance(a) => (run_distance(a), &a.out),
    };
    let result = result.and_then(|o| {
        match &out.output {
            Some(path) => fs::write(path, &o.text).map_err(Failure::Io)?,
            None => print!("{}", o.text),
        }
        Ok(o.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.describe());
            ExitCode::from(f.exit_code())
        }
    }
}
