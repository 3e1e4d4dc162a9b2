use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tvcert::tvgrid::GnormParams;
use tvcert::{discrete_gnorm, solve_precert, solve_tv, SolveParams};
use tvcert_bench::{disk_problem, specs};

fn tv_iterations(c: &mut Criterion) {
    let (op, y) = disk_problem(24);
    // fixed iteration count; the gap target is out of reach on purpose
    let params = SolveParams {
        max_iter: 500,
        gap_tol: 0.0,
        ..SolveParams::default()
    };
    c.bench_function("tv_500_iterations_48x48", |b| {
        b.iter(|| solve_tv(&op, &y, black_box(0.1), &params).unwrap_err())
    });
}

fn gnorm(c: &mut Criterion) {
    let (_, spec) = &specs()[0];
    let eta = solve_precert(spec, 0.2).unwrap().eta_image(64, 64, 0.09).unwrap();
    let params = GnormParams::default();
    let mut group = c.benchmark_group("gnorm");
    group.sample_size(10);
    group.bench_function("64x64", |b| {
        b.iter(|| discrete_gnorm(black_box(&eta), &params).unwrap())
    });
    group.finish();
}

criterion_group!(benches, tv_iterations, gnorm);
criterion_main!(benches);
