//! Replays instances through an algorithm, interleaving oracle queries,
//! certificates and structural checks, and summarises the outcome as a
//! [`RunReport`].

mod batch;
mod sweep;

pub use batch::{par_map, thread_cap, THREADS_ENV};
pub use sweep::{sweep, sweep_csv, CsvRow, SweepOutcome, SweepSpec, CSV_COLUMNS};

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::certify::{self, CertificateSummary, DualCertificate};
use crate::error::{Error, Result};
use crate::graph::{ArrivalSequence, Edge, Graph, Mode, MultiMatchingState};
use crate::incremental::{IncrementalDet, IncrementalRand, WorkProfile};
use crate::mwm::{self, McGregor, MwmAudit, MwmParams, RandomizedMwm, TOLERANCE};
use crate::oracle::{self, OptResult};
use crate::preemptive_mcm::PreemptiveMcm;
use crate::{Rational, SCHEMA_VERSION};

/// Certificates try every root when the instance has at most this many
/// vertices; larger instances use one root per component.
pub const ALL_ROOTS_LIMIT: usize = 2000;

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Algorithm {
    Alg1,
    Alg2,
    Alg3 { epsilon: Rational },
    Mwm(MwmParams),
    McGregor { gamma: f64 },
}

impl Algorithm {
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg2 => "alg2",
            Algorithm::Alg3 { .. } => "alg3",
            Algorithm::Mwm(_) => "mwm",
            Algorithm::McGregor { .. } => "mcgregor",
        }
    }

    pub fn params(&self) -> AlgParams {
        let mut out = AlgParams::default();
        match *self {
            Algorithm::Alg3 { epsilon } => out.epsilon = Some(epsilon.to_string()),
            Algorithm::Mwm(p) => {
                out.p = Some(p.p);
                out.gamma1 = Some(p.gamma1);
                out.gamma2 = Some(p.gamma2);
            }
            Algorithm::McGregor { gamma } => out.gamma = Some(gamma),
            Algorithm::Alg1 | Algorithm::Alg2 => {}
        }
        out
    }

    pub fn mode(&self) -> Mode {
        match self {
            Algorithm::Mwm(_) | Algorithm::McGregor { .. } => Mode::Mwm,
            _ => Mode::Mcm,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AlgParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub per_step: bool,
    pub certify: bool,
    pub lemmas: bool,
    pub sample: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    InvariantViolation,
    CertificateFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::InvariantViolation => 2,
            Status::CertificateFailure => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::InvariantViolation => "invariant-violation",
            Status::CertificateFailure => "certificate-failure",
        }
    }
}

/// Exit code for input and parameter errors.
pub const EXIT_INPUT_ERROR: i32 = 4;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Invariant,
    Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StepSummary {
    pub steps: usize,
    /// Step (1-based prefix length) with the largest OPT / value ratio.
    pub worst_step: usize,
    pub worst_ratio: f64,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub algorithm: &'static str,
    pub params: AlgParams,
    pub mode: &'static str,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub sizes: Vec<usize>,
    pub weights: Vec<f64>,
    /// Exact for MCM algorithms (`"3/2"`); decimal for MWM.
    pub expectation: String,
    pub expectation_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_index: Option<usize>,
    pub opt: Option<f64>,
    pub ratio: Option<String>,
    pub ratio_value: Option<f64>,
    /// Guarantee the algorithm carries on this instance class, if any.
    pub bound: Option<f64>,
    pub analyzed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<MwmAudit>,
    pub work: WorkProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_step: Option<StepSummary>,
    pub checks: Vec<Check>,
    pub events: usize,
    pub status: Status,
}

impl RunReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// The algorithm's output value, exact where the algorithm is cardinality based.
#[derive(Copy, Clone, Debug, PartialEq)]
enum Value {
    Exact(Rational),
    Real(f64),
}

impl Value {
    fn as_f64(self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Real(x) => x,
        }
    }

    fn render(self) -> String {
        match self {
            Value::Exact(r) => r.to_string(),
            Value::Real(x) => format!("{x}"),
        }
    }
}

enum Runner {
    A1(PreemptiveMcm),
    A2(IncrementalRand),
    A3(IncrementalDet),
    W(RandomizedMwm),
    G(McGregor),
}

impl Runner {
    fn new(alg: &Algorithm, seq: &ArrivalSequence, opts: &RunOptions) -> Result<Runner> {
        let f = seq.flags;
        Ok(match *alg {
            Algorithm::Alg1 => {
                let a = PreemptiveMcm::new(f);
                Runner::A1(match opts.sample {
                    Some(s) => a.with_sample(s),
                    None => a,
                })
            }
            Algorithm::Alg2 => {
                let a = IncrementalRand::new(f);
                Runner::A2(match opts.sample {
                    Some(s) => a.with_sample(s),
                    None => a,
                })
            }
            Algorithm::Alg3 { epsilon } => Runner::A3(IncrementalDet::new(epsilon, f)?),
            Algorithm::Mwm(p) => {
                let mut a = RandomizedMwm::new(p, f);
                if f.is_growing_tree {
                    a = a.with_duals()?.with_full_audit(opts.lemmas || seq.len() <= 2000);
                }
                Runner::W(match opts.sample {
                    Some(s) => a.with_sample(s),
                    None => a,
                })
            }
            Algorithm::McGregor { gamma } => Runner::G(McGregor::new(gamma, f)?),
        })
    }

    fn core(&self) -> &MultiMatchingState {
        match self {
            Runner::A1(a) => a.core(),
            Runner::A2(a) => a.core(),
            Runner::A3(a) => a.core(),
            Runner::W(a) => a.core(),
            Runner::G(a) => a.core(),
        }
    }

    fn step(&mut self, e: &Edge) -> Result<()> {
        match self {
            Runner::A1(a) => a.process_edge(e),
            Runner::A2(a) => a.process_edge(e),
            Runner::A3(a) => a.process_edge(e),
            Runner::W(a) => a.process_edge(e).map(|_| ()),
            Runner::G(a) => a.process_edge(e).map(|_| ()),
        }
    }

    fn value(&self) -> Value {
        match self {
            Runner::A1(a) => Value::Exact(a.output_size()),
            Runner::A2(a) => Value::Exact(a.output_size()),
            Runner::A3(a) => Value::Exact(Rational::from_integer(a.current_size() as i64)),
            Runner::W(a) => Value::Real(a.output_weight()),
            Runner::G(a) => Value::Real(a.weight()),
        }
    }

    fn sampled_index(&self) -> Option<usize> {
        match self {
            Runner::A1(a) => a.sampled_index(),
            Runner::A2(a) => a.sampled_index(),
            Runner::W(a) => a.sampled_index(),
            _ => None,
        }
    }

    fn events(&self) -> usize {
        match self {
            Runner::A1(a) => a.log().len(),
            Runner::A2(a) => a.log().len(),
            Runner::A3(a) => a.log().len(),
            _ => 0,
        }
    }
}

/// What the algorithm promises on an instance, given its final graph.
#[derive(Copy, Clone, Debug)]
enum Guarantee {
    /// `value ≥ factor · OPT` (exact).
    Fraction(Rational),
    /// `OPT ≤ factor · value` (floating point, relative tolerance).
    Ratio(f64),
}

impl Guarantee {
    fn bound(self) -> f64 {
        match self {
            Guarantee::Fraction(f) => 1.0 / f.to_f64().unwrap_or(f64::NAN),
            Guarantee::Ratio(r) => r,
        }
    }

    fn holds(self, value: Value, opt: f64) -> bool {
        match (self, value) {
            (Guarantee::Fraction(f), Value::Exact(v)) => v >= f * Rational::from_integer(opt.round() as i64),
            (Guarantee::Ratio(r), v) => opt <= r * v.as_f64() * (1.0 + TOLERANCE) + TOLERANCE,
            (Guarantee::Fraction(f), Value::Real(v)) => v >= f.to_f64().unwrap_or(f64::NAN) * opt * (1.0 - TOLERANCE),
        }
    }
}

fn guarantee(alg: &Algorithm, g: &Graph, seq: &ArrivalSequence) -> Result<Option<Guarantee>> {
    let forest = g.is_forest();
    Ok(match *alg {
        Algorithm::Alg1 if forest => Some(Guarantee::Fraction(Rational::new(33, 64))),
        Algorithm::Alg2 if forest => Some(Guarantee::Fraction(Rational::new(2, 3))),
        Algorithm::Alg2 if g.max_degree() <= 3 => Some(Guarantee::Fraction(Rational::new(5, 9))),
        Algorithm::Alg3 { epsilon } if forest => {
            Some(Guarantee::Fraction(Rational::from_integer(1) / (Rational::new(3, 2) + epsilon)))
        }
        Algorithm::Mwm(p) if seq.flags.is_growing_tree => Some(Guarantee::Ratio(mwm::ratio_bound(&p)?)),
        Algorithm::McGregor { gamma } => Some(Guarantee::Ratio(mwm::mcgregor_bound(gamma))),
        _ => None,
    })
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, kind: CheckKind, pass: bool, detail: impl Into<String>) {
        let detail = if pass { String::new() } else { detail.into() };
        self.0.push(Check { name: name.into(), kind, pass, detail });
    }

    fn inv(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.push(name, CheckKind::Invariant, pass, detail);
    }

    fn cert(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.push(name, CheckKind::Certificate, pass, detail);
    }

    /// Folds repeated per-step outcomes into one check carrying the first failure.
    fn fold(&mut self, name: &str, kind: CheckKind, step: usize, pass: bool, detail: impl FnOnce() -> String) {
        match self.0.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                if c.pass && !pass {
                    c.pass = false;
                    c.detail = format!("step {step}: {}", detail());
                }
            }
            None => {
                let detail = if pass { String::new() } else { format!("step {step}: {}", detail()) };
                self.0.push(Check { name: name.into(), kind, pass, detail });
            }
        }
    }
}

fn optimum(g: &Graph, mode: Mode) -> Result<Option<OptResult>> {
    match oracle::opt_matching(g, mode == Mode::Mwm) {
        Ok(r) => Ok(Some(r)),
        Err(Error::TooLarge { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Root choices for the tree certificate: every vertex when small enough.
fn root_choices(g: &Graph) -> Vec<Vec<usize>> {
    if g.n_vertices() == 0 {
        return vec![Vec::new()];
    }
    if g.n_vertices() <= ALL_ROOTS_LIMIT {
        (0..g.n_vertices()).map(|r| vec![r]).collect()
    } else {
        vec![Vec::new()]
    }
}

/// Builds the Algorithm-2 certificates that apply to `g` and records their
/// checks; returns the worst certificate for the report.
fn certify_alg2(
    ms: &[crate::graph::Matching],
    g: &Graph,
    opt: Option<usize>,
    checks: &mut Checks,
    step: Option<usize>,
) -> Result<Option<DualCertificate>> {
    let mut certs: Vec<(&str, DualCertificate)> = Vec::new();
    if g.is_forest() {
        for roots in root_choices(g) {
            certs.push(("certificate-tree", certify::assign_duals_tree(ms, g, &roots)?));
        }
    }
    if g.max_degree() <= 3 && !g.is_forest() {
        match certify::assign_duals_deg3(ms, g) {
            Ok(c) => certs.push(("certificate-deg3", c)),
            Err(Error::Certificate(msg)) => {
                record_cert(checks, step, "certificate-deg3", false, msg);
                return Ok(None);
            }
            Err(e) => return Err(e),
        }
    }
    let primal: usize = ms.iter().map(|m| m.len()).sum();
    let mut worst: Option<DualCertificate> = None;
    for (name, c) in certs {
        let slack = c.min_slack.map(|(e, s)| format!("edge {} slack {s}", e.0)).unwrap_or_default();
        record_cert(checks, step, name, c.feasible() && c.nonnegative(), slack);
        let conserved = c.total == Rational::from_integer(primal as i64);
        record_cert(checks, step, "conservation", conserved, format!("total {} vs primal {primal}", c.total));
        if let Some(opt) = opt {
            record_cert(
                checks,
                step,
                "weak-duality",
                certify::dominates(&c, opt),
                format!("OPT {opt} above {}", c.certified_bound()),
            );
        }
        let worse = match (&worst, c.min_slack, worst.as_ref().and_then(|w| w.min_slack)) {
            (None, _, _) => true,
            (Some(_), Some((_, s)), Some((_, t))) => s < t,
            _ => false,
        };
        if worse {
            worst = Some(c);
        }
    }
    Ok(worst)
}

fn record_cert(checks: &mut Checks, step: Option<usize>, name: &str, pass: bool, detail: String) {
    match step {
        Some(s) => checks.fold(name, CheckKind::Certificate, s, pass, || detail),
        None => match checks.0.iter_mut().find(|c| c.name == name) {
            Some(c) if c.pass && !pass => {
                c.pass = false;
                c.detail = detail;
            }
            Some(_) => {}
            None => checks.cert(name, pass, detail),
        },
    }
}

/// Work units per update, measured as the change in the core's meter around
/// each `process_edge`.
#[derive(Default)]
struct Meter {
    updates: u64,
    max: u64,
    total: u64,
}

impl Meter {
    fn profile(&self) -> WorkProfile {
        let amortized = if self.updates == 0 { 0.0 } else { self.total as f64 / self.updates as f64 };
        WorkProfile { updates: self.updates, max_per_update: self.max, total: self.total, amortized }
    }
}

/// Replays `seq` through `alg` with the checks selected in `opts`.
pub fn run(instance: &str, seq: &ArrivalSequence, alg: &Algorithm, opts: &RunOptions) -> Result<RunReport> {
    if seq.mode != alg.mode() && alg.mode() == Mode::Mcm {
        return Err(Error::Domain(format!("{} needs an mcm instance", alg.id())));
    }
    let mut runner = Runner::new(alg, seq, opts)?;
    let mut checks = Checks(Vec::new());
    let mut meter = Meter::default();
    let mut steps: Option<StepSummary> = opts.per_step.then(StepSummary::default);
    let mut prev_sizes: Vec<usize> = Vec::new();

    for (t, e) in seq.edges.iter().enumerate() {
        let before = runner.core().work();
        runner.step(e)?;
        let units = runner.core().work() - before;
        meter.updates += 1;
        meter.max = meter.max.max(units);
        meter.total += units;

        let Some(summary) = steps.as_mut() else { continue };
        let step = t + 1;
        let g = seq.prefix_graph(step);
        let opt = optimum(&g, seq.mode)?;
        let value = runner.value();
        summary.steps = step;
        if let (Some(opt), Some(guar)) = (&opt, guarantee(alg, &g, seq)?) {
            if opts.sample.is_none() {
                let ok = guar.holds(value, opt.value);
                if !ok {
                    summary.failures += 1;
                }
                checks.fold("step-ratio", CheckKind::Invariant, step, ok, || {
                    format!("OPT {} against value {}", opt.value, value.render())
                });
            }
            let v = value.as_f64();
            let r = if v > 0.0 {
                opt.value / v
            } else if opt.value > 0.0 {
                f64::INFINITY
            } else {
                1.0
            };
            if r > summary.worst_ratio {
                summary.worst_ratio = r;
                summary.worst_step = step;
            }
        }
        match &runner {
            Runner::A1(a) => {
                let cov = a.core().coverage(e);
                checks.fold("new-edge-coverage", CheckKind::Invariant, step, cov == 4, || format!("coverage {cov}"));
            }
            Runner::A2(a) => {
                let ok = a.all_maximal();
                checks.fold("maximal", CheckKind::Invariant, step, ok, || "a matching is not maximal".into());
                if opts.certify {
                    let ms = &a.core().matchings()[..3];
                    let o = opt.as_ref().map(|o| o.cardinality());
                    certify_alg2(ms, &g, o, &mut checks, Some(step))?;
                }
            }
            Runner::A3(a) => {
                let sizes = a.sizes();
                let mono = prev_sizes.is_empty() || (0..3).all(|i| sizes[i] >= prev_sizes[i]);
                checks.fold("monotone-sizes", CheckKind::Invariant, step, mono, || {
                    format!("{prev_sizes:?} -> {sizes:?}")
                });
                let max23 = a.core().is_maximal(1) && a.core().is_maximal(2);
                checks.fold("support-maximal", CheckKind::Invariant, step, max23, || "M_2 or M_3 not maximal".into());
                let inv = a.output_invariant_holds();
                checks.fold("output-invariant", CheckKind::Invariant, step, inv, || {
                    format!("current {} sizes {sizes:?}", a.current() + 1)
                });
                prev_sizes = sizes;
            }
            Runner::W(_) | Runner::G(_) => {}
        }
    }

    let g = seq.graph();
    let opt = optimum(&g, seq.mode)?;
    let value = runner.value();
    let guar = guarantee(alg, &g, seq)?;
    if let (Some(o), Some(gu)) = (&opt, guar) {
        if opts.sample.is_none() {
            checks.inv(
                "ratio-bound",
                gu.holds(value, o.value),
                format!("OPT {} against value {}", o.value, value.render()),
            );
        }
    }

    let mut certificate = None;
    let mut dual = None;
    match &runner {
        Runner::A1(a) => {
            if opts.lemmas {
                lemma_checks(a, &g, &mut checks)?;
            }
        }
        Runner::A2(a) => {
            checks.inv("maximal", a.all_maximal(), "a matching is not maximal");
            if opts.certify {
                let ms = &a.core().matchings()[..3];
                let o = opt.as_ref().map(|o| o.cardinality());
                certificate = certify_alg2(ms, &g, o, &mut checks, None)?.map(|c| c.summary());
            }
            if opts.lemmas {
                let replayed = a.log().replay(3, Mode::Mcm, &seq.edges)?;
                checks.inv("replay", replayed.matchings() == a.core().matchings(), "log replay differs");
            }
        }
        Runner::A3(a) => {
            checks.inv("output-invariant", a.output_invariant_holds(), "current matching below threshold");
            checks.inv("support-maximal", a.core().is_maximal(1) && a.core().is_maximal(2), "M_2 or M_3 not maximal");
            if let (Some(o), true) = (&opt, g.is_forest()) {
                let mean = a.mean_size();
                let need = Rational::new(2, 3) * Rational::from_integer(o.cardinality() as i64);
                checks.inv("mean-size", mean >= need, format!("mean {mean} below {need}"));
            }
            if opts.lemmas {
                let replayed = a.log().replay(4, Mode::Mcm, &seq.edges)?;
                checks.inv("replay", replayed.matchings() == a.core().matchings(), "log replay differs");
            }
        }
        Runner::W(a) => {
            if let Some(l) = a.ledger() {
                let audit = l.audit().clone();
                checks.inv("dual-audit", audit.clean(), format!("{audit:?}"));
                if let Some(o) = &opt {
                    let d = audit.dual_total;
                    let ok = o.value <= d * (1.0 + TOLERANCE) + TOLERANCE;
                    checks.inv("weak-duality", ok, format!("OPT {} above dual total {d}", o.value));
                }
                dual = Some(audit);
            }
        }
        Runner::G(_) => {}
    }

    let core = runner.core();
    checks.inv("state-consistent", core.is_consistent(), "counters or vertex index out of sync");

    let expectation = match (&runner, opts.sample) {
        (_, Some(_)) => value,
        (Runner::A1(a), None) => Value::Exact(a.expected_size()),
        (Runner::A2(a), None) => Value::Exact(a.expected_size()),
        (Runner::W(a), None) => Value::Real(a.expected_weight()),
        _ => value,
    };
    let (ratio, ratio_value) = match (&opt, expectation) {
        (None, _) => (None, None),
        (Some(o), Value::Exact(v)) => {
            let opt_r = Rational::from_integer(o.value.round() as i64);
            let r = if v.is_zero() {
                if opt_r.is_zero() {
                    Some(Rational::from_integer(1))
                } else {
                    None
                }
            } else {
                Some(opt_r / v)
            };
            match r {
                Some(r) => (Some(r.to_string()), r.to_f64()),
                None => (Some("inf".into()), Some(f64::INFINITY)),
            }
        }
        (Some(o), Value::Real(v)) => {
            let r = if v > 0.0 {
                o.value / v
            } else if o.value > 0.0 {
                f64::INFINITY
            } else {
                1.0
            };
            (Some(format!("{r}")), Some(r))
        }
    };

    let status = if checks.0.iter().any(|c| !c.pass && c.kind == CheckKind::Invariant) {
        Status::InvariantViolation
    } else if checks.0.iter().any(|c| !c.pass) {
        Status::CertificateFailure
    } else {
        Status::Pass
    };

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        instance: instance.to_string(),
        seed: None,
        algorithm: alg.id(),
        params: alg.params(),
        mode: seq.mode.as_str(),
        n_vertices: seq.n_vertices,
        n_edges: seq.len(),
        sizes: core.sizes(),
        weights: core.matchings().iter().map(|m| m.weight(core.edges())).collect(),
        expectation: expectation.render(),
        expectation_value: expectation.as_f64(),
        sampled_index: runner.sampled_index(),
        opt: opt.as_ref().map(|o| o.value),
        ratio,
        ratio_value,
        bound: guar.map(Guarantee::bound),
        analyzed: guar.is_some(),
        certificate,
        dual,
        work: meter.profile(),
        per_step: steps,
        checks: checks.0,
        events: runner.events(),
        status,
    })
}

fn lemma_checks(a: &PreemptiveMcm, g: &Graph, checks: &mut Checks) -> Result<()> {
    if !g.is_forest() {
        checks.inv("lemma-internal", true, "");
        return Ok(());
    }
    match a.classify_edges() {
        Ok(_) => checks.inv("coverage", true, ""),
        Err(e) => {
            checks.inv("coverage", false, e.to_string());
            return Ok(());
        }
    }
    let path = a.check_lemma_internal()?;
    checks.inv(
        "lemma-internal",
        path.pass,
        format!("bad-incident run of {} vertices: {:?}", path.max_len, path.witness),
    );
    let m4 = a.check_m4bad()?;
    checks.inv("m4bad", m4.pass, format!("part a {:?}, part b {:?}", m4.part_a_violations, m4.part_b_violations));
    let lonely = a.unmatched_edges_without_witnesses();
    checks.inv("unmatched-witnesses", lonely.is_empty(), format!("{lonely:?}"));
    let replayed = a.log().replay(4, Mode::Mcm, g.edges())?;
    checks.inv("replay", replayed.matchings() == a.core().matchings(), "log replay differs");
    Ok(())
}
