use std::hint::black_box;
use std::ops::ControlFlow;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigUint;
use zeck_core::{
    count_bad_c2, decompose, exact_distribution_prefix, fib, IntervalMap, IntervalParams,
};

fn decomposition(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose");
    for k in [60i64, 180, 1000] {
        let m = fib(k).unwrap() * 7u32 / 11u32;
        g.bench_with_input(BenchmarkId::from_parameter(k), &m, |b, m| {
            b.iter(|| decompose(black_box(m)))
        });
    }
    g.finish();
}

fn increment_walk(c: &mut Criterion) {
    let start = decompose(&(fib(80).unwrap() + 12345u32));
    c.bench_function("increment x 10000", |b| {
        b.iter(|| {
            let mut code = start.clone();
            for _ in 0..10_000 {
                code.increment();
            }
            code
        })
    });
}

fn prefix_dp(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_distribution_prefix");
    for k in [100usize, 400, 2000] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| exact_distribution_prefix(black_box(k)))
        });
    }
    g.finish();
}

fn bad_count(c: &mut Criterion) {
    let p = IntervalParams::new(2000, 1000, 24).unwrap();
    c.bench_function("count_bad_c2 n=2000", |b| {
        b.iter(|| count_bad_c2(black_box(&p)))
    });
}

fn interval_walk(c: &mut Criterion) {
    let p = IntervalParams::new(60, 20, 6).unwrap();
    let m = fib(60).unwrap() + BigUint::from(1u32);
    let map = IntervalMap::new(&m, &p).unwrap();
    c.bench_function("interval walk F_20", |b| {
        b.iter(|| {
            let mut total = 0i64;
            map.walk(|step| {
                total += step.defect();
                ControlFlow::<()>::Continue(())
            })
            .unwrap();
            total
        })
    });
}

criterion_group!(
    benches,
    decomposition,
    increment_walk,
    prefix_dp,
    bad_count,
    interval_walk
);
criterion_main!(benches);
