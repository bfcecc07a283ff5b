//! Parameter sweeps emitting one CSV row per `(algorithm, n, seed)` cell plus
//! one summary row per `(algorithm, n)` group.
//!
//! Rows run in parallel and are emitted sorted by cell key. A row fails
//! softly: its error or failed checks are recorded and the sweep continues.

use std::ops::Range;

use serde::Serialize;

use super::{par_map, run, Algorithm, RunOptions, RunReport, Status};
use crate::error::Result;
use crate::generators::{gen, GenSpec};
use crate::SCHEMA_VERSION;

#[derive(Clone, Debug)]
pub struct SweepSpec {
    /// Generator template; `n` and `seed` are overridden per cell.
    pub template: GenSpec,
    pub ns: Vec<usize>,
    pub seeds: Range<u64>,
    pub algorithms: Vec<Algorithm>,
    pub options: RunOptions,
}

/// Column order of [`CsvRow`].
pub const CSV_COLUMNS: [&str; 26] = [
    "schema_version",
    "row_kind",
    "generator",
    "n",
    "seed",
    "algorithm",
    "epsilon",
    "p",
    "gamma1",
    "gamma2",
    "gamma",
    "n_vertices",
    "n_edges",
    "expectation",
    "opt",
    "ratio",
    "bound",
    "status",
    "cert_pass",
    "work_max",
    "work_total",
    "work_amortized",
    "failed_checks",
    "ratio_min",
    "ratio_mean",
    "ratio_max",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub schema_version: u32,
    /// `run` or `summary`.
    pub row_kind: &'static str,
    pub generator: &'static str,
    pub n: usize,
    pub seed: Option<u64>,
    pub algorithm: &'static str,
    pub epsilon: Option<String>,
    pub p: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma: Option<f64>,
    pub n_vertices: Option<usize>,
    pub n_edges: Option<usize>,
    pub expectation: Option<String>,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub bound: Option<f64>,
    /// Run status, or `error: …` when the row could not be produced.
    pub status: String,
    pub cert_pass: Option<bool>,
    pub work_max: Option<u64>,
    pub work_total: Option<u64>,
    pub work_amortized: Option<f64>,
    pub failed_checks: String,
    pub ratio_min: Option<f64>,
    pub ratio_mean: Option<f64>,
    pub ratio_max: Option<f64>,
}

impl CsvRow {
    fn blank(kind: &'static str, spec: &GenSpec, n: usize, alg: &Algorithm) -> Self {
        let p = alg.params();
        CsvRow {
            schema_version: SCHEMA_VERSION,
            row_kind: kind,
            generator: spec.kind.as_str(),
            n,
            seed: None,
            algorithm: alg.id(),
            epsilon: p.epsilon,
            p: p.p,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            gamma: p.gamma,
            n_vertices: None,
            n_edges: None,
            expectation: None,
            opt: None,
            ratio: None,
            bound: None,
            status: String::new(),
            cert_pass: None,
            work_max: None,
            work_total: None,
            work_amortized: None,
            failed_checks: String::new(),
            ratio_min: None,
            ratio_mean: None,
            ratio_max: None,
        }
    }

    fn from_report(mut row: CsvRow, r: &RunReport) -> Self {
        row.n_vertices = Some(r.n_vertices);
        row.n_edges = Some(r.n_edges);
        row.expectation = Some(r.expectation.clone());
        row.opt = r.opt;
        row.ratio = r.ratio_value;
        row.bound = r.bound;
        row.status = r.status.as_str().into();
        row.cert_pass = r.certificate.as_ref().map(|c| c.pass);
        row.work_max = Some(r.work.max_per_update);
        row.work_total = Some(r.work.total);
        row.work_amortized = Some(r.work.amortized);
        row.failed_checks = r.failed_checks().map(|c| c.name.as_str()).collect::<Vec<_>>().join(";");
        row
    }

    pub fn is_hard_failure(&self) -> bool {
        self.row_kind == "run" && self.status != Status::Pass.as_str()
    }
}

pub struct SweepOutcome {
    pub rows: Vec<CsvRow>,
    /// Worst status over all rows; row errors count as invariant violations.
    pub status: Status,
}

pub fn sweep(spec: &SweepSpec) -> SweepOutcome {
    let mut cells = Vec::new();
    for (a, alg) in spec.algorithms.iter().enumerate() {
        for &n in &spec.ns {
            for seed in spec.seeds.clone() {
                cells.push((a, n, seed, *alg));
            }
        }
    }
    cells.sort_by_key(|&(a, n, seed, _)| (a, n, seed));

    let results = par_map(&cells, |&(_, n, seed, alg)| -> (CsvRow, Result<RunReport>) {
        let g = GenSpec { n, seed, ..spec.template.clone() };
        let mut row = CsvRow::blank("run", &spec.template, n, &alg);
        row.seed = Some(seed);
        let report = gen(&g).and_then(|seq| {
            let id = format!("{}:n={n}:seed={seed}", g.kind.as_str());
            run(&id, &seq, &alg, &spec.options).map(|mut r| {
                r.seed = Some(seed);
                r
            })
        });
        (row, report)
    });

    let mut rows = Vec::with_capacity(results.len());
    let mut status = Status::Pass;
    let mut group: Vec<f64> = Vec::new();
    for (idx, (row, report)) in results.into_iter().enumerate() {
        let (a, n, _, alg) = cells[idx];
        let row = match report {
            Ok(r) => {
                status = status.max(r.status);
                CsvRow::from_report(row, &r)
            }
            Err(e) => {
                status = status.max(Status::InvariantViolation);
                CsvRow { status: format!("error: {e}"), ..row }
            }
        };
        if let Some(r) = row.ratio {
            group.push(r);
        }
        let bound = row.bound;
        rows.push(row);

        let last_of_group = cells.get(idx + 1).is_none_or(|&(a2, n2, _, _)| (a2, n2) != (a, n));
        if last_of_group {
            let mut s = CsvRow::blank("summary", &spec.template, n, &alg);
            if !group.is_empty() {
                s.ratio_min = group.iter().copied().reduce(f64::min);
                s.ratio_max = group.iter().copied().reduce(f64::max);
                s.ratio_mean = Some(group.iter().sum::<f64>() / group.len() as f64);
            }
            s.bound = match alg {
                Algorithm::Mwm(p) => crate::mwm::ratio_bound(&p).ok(),
                _ => bound,
            };
            s.status = "summary".into();
            rows.push(s);
            group.clear();
        }
    }
    SweepOutcome { rows, status }
}

/// Renders rows as CSV; an empty row set yields the header alone.
pub fn sweep_csv(rows: &[CsvRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8")
}
