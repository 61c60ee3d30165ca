use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use quasifix_bench::{integral_problem, quarter_certificate};
use quasifix_core::{
    apply_t, check_axioms, linspace, picard_solve, MapSpec, MetricSpec, Point, SolverConfig,
};

fn axiom_sweep(c: &mut Criterion) {
    let metric = MetricSpec::mat2_split();
    let mut group = c.benchmark_group("check_axioms");
    for n in [11, 21, 41] {
        let points = linspace(-2.0, 2.0, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &points, |b, pts| {
            b.iter(|| check_axioms(&metric, black_box(pts), 1e-9).unwrap())
        });
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let (metric, cert) = quarter_certificate();
    let cfg = SolverConfig::default();
    c.bench_function("picard_solve/linear-quarter", |b| {
        b.iter(|| {
            picard_solve(
                &MapSpec::LinearQuarter,
                &metric,
                black_box(&Point::Real(7.0)),
                &cert,
                &cfg,
            )
            .unwrap()
        })
    });
}

fn integral(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_t");
    for n in [256, 2048, 8192] {
        let prob = integral_problem(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &prob, |b, p| {
            b.iter(|| apply_t(black_box(&p.f0), p).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, axiom_sweep, solve, integral);
criterion_main!(benches);
