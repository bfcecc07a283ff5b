//! `matchkit` command line: generate instances, replay them through an
//! algorithm, sweep parameter grids, and query the oracles.
//!
//! Exit codes: 0 all checks pass, 2 invariant violation, 3 certificate
//! failure, 4 input or parameter error.

use std::fs;
use std::io::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use matchkit::generators::{gen, GenKind, GenSpec};
use matchkit::harness::{self, sweep_csv, Algorithm, RunOptions, RunReport, SweepSpec, EXIT_INPUT_ERROR};
use matchkit::instance::{parse_instance, write_instance};
use matchkit::mwm::MwmParams;
use matchkit::oracle::opt_matching;
use matchkit::{ArrivalSequence, Mode, Rational};

#[derive(Parser)]
#[command(name = "matchkit", version, about = "Online and incremental matching experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated instance.
    Gen(GenArgs),
    /// Replay an instance through an algorithm and report.
    Run(RunArgs),
    /// Run a grid of generated instances and parameters, emitting CSV rows.
    Sweep(SweepArgs),
    /// Optimum matching of an instance.
    Opt(OptArgs),
    /// Replay with dual certification and print the certificate.
    Certify(RunArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AlgId {
    Alg1,
    Alg2,
    Alg3,
    Mwm,
    Mcgregor,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct GenOpts {
    /// Generator: growing-tree, tree-any-order, path, star, bounded-degree,
    /// mcgregor-adversary, alg4-tight.
    #[arg(long, value_parser = parse_kind)]
    kind: GenKind,
    /// Weighted instance with weights in [1, W].
    #[arg(long, value_name = "W")]
    max_weight: Option<f64>,
    /// Eviction factor for the McGregor adversary.
    #[arg(long = "adv-gamma")]
    adv_gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
}

impl GenOpts {
    fn spec(&self, n: usize, seed: u64) -> GenSpec {
        let mut s = GenSpec::new(self.kind, n, seed).max_degree(self.max_degree);
        if let Some(w) = self.max_weight {
            s = s.weighted(w);
        }
        if let Some(g) = self.adv_gamma {
            s = s.gamma(g);
        }
        if let Some(d) = self.delta {
            s = s.delta(d);
        }
        s
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GenOpts,
    /// Edge count (stage count for the adversaries).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    alg: AlgId,
    /// Slack for alg3, as a decimal (`0.25`) or fraction (`1/4`).
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[command(flatten)]
    checks: CheckFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    instance: PathBuf,
}

#[derive(Args, Clone)]
struct CheckFlags {
    /// Compare against the oracle after every insertion.
    #[arg(long)]
    per_step: bool,
    /// Build and verify the dual certificate.
    #[arg(long)]
    certify: bool,
    /// Run the structural checks.
    #[arg(long)]
    lemmas: bool,
    /// Output one sampled matching instead of the exact expectation.
    #[arg(long, value_name = "SEED")]
    sample: Option<u64>,
}

impl CheckFlags {
    fn options(&self) -> RunOptions {
        RunOptions { per_step: self.per_step, certify: self.certify, lemmas: self.lemmas, sample: self.sample }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    gen: GenOpts,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Seed range `a..b` (half open) or a single seed.
    #[arg(long, value_parser = parse_seeds, default_value = "0..10")]
    seeds: Range<u64>,
    #[arg(long, value_enum)]
    alg: AlgId,
    /// Comma-separated values; the sweep takes the product of all lists.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    gamma1: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    gamma2: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[command(flatten)]
    checks: CheckFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct OptArgs {
    /// Maximise weight instead of cardinality (default: by instance mode).
    #[arg(long)]
    weighted: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
    instance: PathBuf,
}

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn input(msg: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INPUT_ERROR, msg: msg.to_string() }
    }
}

impl From<matchkit::Error> for Failure {
    fn from(e: matchkit::Error) -> Self {
        Failure::input(e)
    }
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    GenKind::parse(s).ok_or_else(|| format!("unknown generator `{s}`"))
}

fn parse_seeds(s: &str) -> Result<Range<u64>, String> {
    match s.split_once("..") {
        Some((a, b)) => {
            let a = a.trim().parse().map_err(|e| format!("bad seed range start: {e}"))?;
            let b = b.trim().parse().map_err(|e| format!("bad seed range end: {e}"))?;
            Ok(a..b)
        }
        None => {
            let a: u64 = s.trim().parse().map_err(|e| format!("bad seed: {e}"))?;
            Ok(a..a + 1)
        }
    }
}

/// Exact rational from `a/b` or a plain decimal such as `0.125`.
fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not a fraction or decimal");
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 15 || !frac.bytes().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let neg = int.starts_with('-');
    let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
    let den = 10i64.pow(frac.len() as u32);
    let mut num: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    if neg {
        num = -num;
    }
    Ok(Rational::new(whole * den + num, den))
}

fn algorithm(
    id: AlgId,
    epsilon: Option<&str>,
    p: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    gamma: Option<f64>,
) -> Result<Algorithm, Failure> {
    Ok(match id {
        AlgId::Alg1 => Algorithm::Alg1,
        AlgId::Alg2 => Algorithm::Alg2,
        AlgId::Alg3 => {
            let eps = epsilon.ok_or_else(|| Failure::input("alg3 needs --epsilon"))?;
            let epsilon = parse_rational(eps).map_err(Failure::input)?;
            if epsilon <= Rational::from_integer(0) {
                return Err(Failure::input("--epsilon must be positive"));
            }
            Algorithm::Alg3 { epsilon }
        }
        AlgId::Mwm => {
            let d = MwmParams::three_competitive();
            Algorithm::Mwm(MwmParams::new(p.unwrap_or(d.p), gamma1.unwrap_or(d.gamma1), gamma2.unwrap_or(d.gamma2))?)
        }
        AlgId::Mcgregor => {
            let gamma = gamma.unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(Failure::input("--gamma must be positive"));
            }
            Algorithm::McGregor { gamma }
        }
    })
}

fn load(path: &Path) -> Result<ArrivalSequence, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(Failure::input)
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn report_csv(r: &RunReport) -> String {
    let mut out = String::from(
        "schema_version,instance,algorithm,expectation,opt,ratio,bound,status,work_max,work_total,failed_checks\n",
    );
    let failed: Vec<&str> = r.failed_checks().map(|c| c.name.as_str()).collect();
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{},{}\n",
        r.schema_version,
        r.instance,
        r.algorithm,
        r.expectation,
        r.opt.map(|v| v.to_string()).unwrap_or_default(),
        r.ratio.clone().unwrap_or_default(),
        r.bound.map(|v| v.to_string()).unwrap_or_default(),
        r.status.as_str(),
        r.work.max_per_update,
        r.work.total,
        failed.join(";"),
    ));
    out
}

fn cmd_gen(a: &GenArgs) -> Result<i32, Failure> {
    let seq = gen(&a.gen.spec(a.n, a.seed))?;
    emit(a.out.as_deref(), &write_instance(&seq))?;
    Ok(0)
}

fn run_args_algorithm(a: &RunArgs) -> Result<Algorithm, Failure> {
    algorithm(a.alg, a.epsilon.as_deref(), a.p, a.gamma1, a.gamma2, a.gamma)
}

fn replay(a: &RunArgs, opts: &RunOptions) -> Result<RunReport, Failure> {
    let alg = run_args_algorithm(a)?;
    let seq = load(&a.instance)?;
    if seq.mode != alg.mode() && seq.mode == Mode::Mwm {
        return Err(Failure::input(format!("{} is a cardinality algorithm; instance is weighted", alg.id())));
    }
    let id = a.instance.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(harness::run(&id, &seq, &alg, opts)?)
}

fn cmd_run(a: &RunArgs) -> Result<i32, Failure> {
    let report = replay(a, &a.checks.options())?;
    let text = match a.format {
        Format::Json => with_newline(report.to_json()),
        Format::Csv => report_csv(&report),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(report.status.exit_code())
}

fn cmd_certify(a: &RunArgs) -> Result<i32, Failure> {
    if a.alg != AlgId::Alg2 {
        return Err(Failure::input("certificates are defined for alg2"));
    }
    let report = replay(a, &RunOptions { certify: true, ..a.checks.options() })?;
    let certs: Vec<_> =
        report.checks.iter().filter(|c| c.name.starts_with("certificate") || c.name == "weak-duality").collect();
    let text = match a.format {
        Format::Json => with_newline(
            serde_json::to_string_pretty(&serde_json::json!({
                "schema_version": report.schema_version,
                "instance": report.instance,
                "certificate": report.certificate,
                "checks": certs,
                "status": report.status,
            }))
            .map_err(Failure::input)?,
        ),
        Format::Csv => {
            let mut s = String::from("check,pass,detail\n");
            for c in certs {
                s.push_str(&format!("{},{},\"{}\"\n", c.name, c.pass, c.detail.replace('"', "\"\"")));
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(report.status.exit_code())
}

/// `[None]` for an empty list so the product keeps one cell.
fn or_none<T: Clone>(v: &[T]) -> Vec<Option<T>> {
    if v.is_empty() {
        vec![None]
    } else {
        v.iter().cloned().map(Some).collect()
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<i32, Failure> {
    let mut algorithms = Vec::new();
    for eps in or_none(&a.epsilon) {
        for p in or_none(&a.p) {
            for g1 in or_none(&a.gamma1) {
                for g2 in or_none(&a.gamma2) {
                    for g in or_none(&a.gamma) {
                        let alg = algorithm(a.alg, eps.as_deref(), p, g1, g2, g)?;
                        if !algorithms.contains(&alg) {
                            algorithms.push(alg);
                        }
                    }
                }
            }
        }
    }
    let spec = SweepSpec {
        template: a.gen.spec(0, 0),
        ns: a.n.clone(),
        seeds: a.seeds.clone(),
        algorithms,
        options: a.checks.options(),
    };
    let outcome = harness::sweep(&spec);
    let text = match a.format {
        Format::Csv => sweep_csv(&outcome.rows),
        Format::Json => with_newline(serde_json::to_string_pretty(&outcome.rows).map_err(Failure::input)?),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(outcome.status.exit_code())
}

fn cmd_opt(a: &OptArgs) -> Result<i32, Failure> {
    let seq = load(&a.instance)?;
    let weighted = a.weighted.unwrap_or(seq.mode == Mode::Mwm);
    let g = seq.graph();
    let opt = opt_matching(&g, weighted)?;
    let witness: Vec<(usize, usize)> = opt.witness.iter().map(|&id| (g.edge(id).u, g.edge(id).v)).collect();
    let text = serde_json::to_string_pretty(&serde_json::json!({
        "schema_version": matchkit::SCHEMA_VERSION,
        "weighted": weighted,
        "value": opt.value,
        "witness": opt.witness,
        "witness_endpoints": witness,
    }))
    .map_err(Failure::input)?;
    emit(a.out.as_deref(), &with_newline(text))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match &cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Opt(a) => cmd_opt(a),
        Cmd::Certify(a) => cmd_certify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("matchkit: {}", f.msg);
            ExitCode::from(f.code as u8)
        }
    }
}
