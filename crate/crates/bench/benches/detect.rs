// SPDX-License-Identifier: MIT OR Apache-2.0

use cpi_bench::bench_series;
use cpi_core::detect::{binseg, l0_segment};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_binseg(c: &mut Criterion) {
    let mut group = c.benchmark_group("binseg");
    for t_len in [500usize, 2000] {
        let y = bench_series(t_len, 10, 2.0, 11);
        group.bench_with_input(BenchmarkId::from_parameter(t_len), &y, |b, y| {
            b.iter(|| binseg(black_box(y), 10).unwrap());
        });
    }
    group.finish();
}

fn bench_l0(c: &mut Criterion) {
    let mut group = c.benchmark_group("l0_segment");
    for t_len in [500usize, 2000] {
        let y = bench_series(t_len, 10, 2.0, 11);
        group.bench_with_input(BenchmarkId::from_parameter(t_len), &y, |b, y| {
            b.iter(|| l0_segment(black_box(y), (t_len as f64).ln()).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_binseg, bench_l0);
criterion_main!(benches);
