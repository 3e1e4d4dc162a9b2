use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tvcert::bessel::{i0e, i1e};
use tvcert::kernels::{circle_conv, disk_conv};
use tvcert::{certify, CertifyTolerances};
use tvcert_bench::specs;

fn bessel(c: &mut Criterion) {
    let xs: Vec<f64> = (0..256).map(|k| 0.1 * k as f64).collect();
    c.bench_function("i0e_i1e_256", |b| {
        b.iter(|| xs.iter().map(|&x| i0e(black_box(x)) + i1e(black_box(x))).sum::<f64>())
    });
}

fn convolutions(c: &mut Criterion) {
    let tau = 0.2 * std::f64::consts::SQRT_2;
    c.bench_function("disk_conv", |b| {
        b.iter(|| disk_conv(black_box(tau), 1.0, black_box(0.9)))
    });
    c.bench_function("circle_conv", |b| {
        b.iter(|| circle_conv(black_box(tau), 1.0, black_box(0.9)))
    });
}

fn certify_bench(c: &mut Criterion) {
    let tols = CertifyTolerances::default();
    let mut group = c.benchmark_group("certify");
    for (name, spec) in specs() {
        group.bench_function(name, |b| b.iter(|| certify(&spec, black_box(0.15), &tols).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bessel, convolutions, certify_bench);
criterion_main!(benches);
