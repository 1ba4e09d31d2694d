use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mdd_core::circle::{theorem_main_term, ArcParams};
use mdd_core::expsum::{expsum_digitset_block, expsum_digitset_direct, expsum_digitset_prefix, expsum_divisor};
use mdd_core::ntheory::{cumulative_divisor, sieve_divisor_count};
use mdd_core::voronoi::second_moment;
use mdd_core::{DigitSet, MainTermForm};

fn sieve(c: &mut Criterion) {
    let mut group = c.benchmark_group("sieve_divisor_count");
    for (lo, len) in [(1u64, 100_000u64), (1_000_000_000, 100_000)] {
        group.bench_with_input(BenchmarkId::from_parameter(lo), &(lo, len), |b, &(lo, len)| {
            b.iter(|| sieve_divisor_count(black_box(lo), lo + len).unwrap())
        });
    }
    group.finish();
}

fn divisor_expsum(c: &mut Criterion) {
    let x = 1_000_000u64;
    let h = 100_000u64;
    let table = sieve_divisor_count(x, x + h).unwrap();
    c.bench_function("expsum_divisor/H=1e5", |b| {
        b.iter(|| expsum_divisor(black_box(0.318_309_886), x, h, &table).unwrap())
    });
}

fn digit_sums(c: &mut Criterion) {
    let ds = DigitSet::new(10, 7).unwrap();
    let mut group = c.benchmark_group("digitset_sum");
    for k in [3u32, 5] {
        group.bench_with_input(BenchmarkId::new("block", k), &k, |b, &k| {
            b.iter(|| expsum_digitset_block(&ds, black_box(0.1234), k).unwrap())
        });
        let hi = 10u64.pow(k) - 1;
        group.bench_with_input(BenchmarkId::new("direct", k), &hi, |b, &hi| {
            b.iter(|| expsum_digitset_direct(&ds, black_box(0.1234), 0, hi))
        });
    }
    group.bench_function("prefix/H=123456789", |b| {
        b.iter(|| expsum_digitset_prefix(&ds, black_box(0.1234), 123_456_789).unwrap())
    });
    group.finish();
}

fn moment(c: &mut Criterion) {
    let cum = cumulative_divisor(100_000).unwrap();
    c.bench_function("second_moment/X=1e5", |b| {
        b.iter(|| second_moment(1, 1, black_box(100_000), &cum).unwrap())
    });
}

fn main_term(c: &mut Criterion) {
    let ds = DigitSet::new(10, 7).unwrap();
    let params = ArcParams::explicit(100, 3, 9).unwrap();
    let mut group = c.benchmark_group("main_term");
    group.sample_size(10);
    for (name, form) in [("beta", MainTermForm::BetaQuadrature), ("sine", MainTermForm::SineKernel)] {
        group.bench_function(name, |b| {
            b.iter(|| theorem_main_term(&ds, 100, 20, &params, form, u64::MAX).unwrap())
        });
    }
    group.finish();
}

criterion_group!(kernels, sieve, divisor_expsum, digit_sums, moment, main_term);
criterion_main!(kernels);
