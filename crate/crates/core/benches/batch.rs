//! Batch replay throughput: a plain sequential loop against `par_map`.
//!
//! Built without the `parallel` feature, `par_map` is itself sequential and
//! the two series should coincide.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use matchkit::generators::{gen, GenKind, GenSpec};
use matchkit::harness::{par_map, run, Algorithm, RunOptions};
use matchkit::{ArrivalSequence, Rational};

fn batch(kind: GenKind, n: usize, count: u64) -> Vec<ArrivalSequence> {
    (0..count).map(|s| gen(&GenSpec::new(kind, n, s)).expect("generator")).collect()
}

fn replay(seqs: &[ArrivalSequence], alg: &Algorithm, opts: &RunOptions) -> usize {
    let one = |s: &ArrivalSequence| run("bench", s, alg, opts).expect("run").n_edges;
    black_box(seqs.iter().map(one).sum())
}

fn replay_par(seqs: &[ArrivalSequence], alg: &Algorithm, opts: &RunOptions) -> usize {
    let one = |s: &ArrivalSequence| run("bench", s, alg, opts).expect("run").n_edges;
    black_box(par_map(seqs, one).into_iter().sum())
}

fn bench_algorithms(c: &mut Criterion) {
    let seqs = batch(GenKind::GrowingTree, 200, 64);
    let opts = RunOptions::default();
    let mut group = c.benchmark_group("replay-64x200");
    group.throughput(Throughput::Elements(64));
    group.sample_size(20);
    for alg in [Algorithm::Alg1, Algorithm::Alg2, Algorithm::Alg3 { epsilon: Rational::new(1, 4) }] {
        group.bench_with_input(BenchmarkId::new("sequential", alg.id()), &alg, |b, a| {
            b.iter(|| replay(&seqs, a, &opts))
        });
        group.bench_with_input(BenchmarkId::new("par_map", alg.id()), &alg, |b, a| {
            b.iter(|| replay_par(&seqs, a, &opts))
        });
    }
    group.finish();
}

fn bench_per_step(c: &mut Criterion) {
    let seqs = batch(GenKind::TreeAnyOrder, 60, 16);
    let opts = RunOptions { per_step: true, certify: true, lemmas: true, sample: None };
    let mut group = c.benchmark_group("checked-16x60");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| replay(&seqs, &Algorithm::Alg2, &opts)));
    group.bench_function("par_map", |b| b.iter(|| replay_par(&seqs, &Algorithm::Alg2, &opts)));
    group.finish();
}

criterion_group!(benches, bench_algorithms, bench_per_step);
criterion_main!(benches);
