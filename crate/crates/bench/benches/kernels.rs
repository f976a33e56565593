use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rotspec::approx::{certify_normal, hausdorff_distance};
use rotspec::spectral::{hermitian_eigenvalues, singular_values};
use rotspec::{
    build_operator, compute_grid, expand, GridParams, OperatorSpec, PointCloud, RealNumberInput, Region, Resolution,
};

fn bench_expand(c: &mut Criterion) {
    let golden = RealNumberInput::golden();
    let surd = RealNumberInput::surd(-2, 1, 3, 7).unwrap();
    c.bench_function("expand/golden_40", |b| b.iter(|| expand(black_box(&golden), 40).unwrap()));
    c.bench_function("expand/surd_200", |b| b.iter(|| expand(black_box(&surd), 200).unwrap()));
}

fn bench_build(c: &mut Criterion) {
    let spec = OperatorSpec::almost_mathieu(1.0);
    let mut group = c.benchmark_group("build_operator");
    for (p, q) in [(34u64, 55u64), (144, 233), (377, 610)] {
        group.bench_with_input(BenchmarkId::from_parameter(q), &(p, q), |b, &(p, q)| {
            b.iter(|| build_operator(&spec, p, q).unwrap())
        });
    }
    group.finish();
}

fn bench_eigen(c: &mut Criterion) {
    let hermitian = OperatorSpec::almost_mathieu(1.0);
    let general = OperatorSpec::canonical_real(1.0, 0.0, 2.0, 0.0);
    let mut group = c.benchmark_group("eigen");
    group.sample_size(20);
    for (p, q) in [(21u64, 34u64), (55, 89), (144, 233)] {
        let a = build_operator(&hermitian, p, q).unwrap();
        group.bench_with_input(BenchmarkId::new("hermitian", q), &a, |b, a| {
            b.iter(|| hermitian_eigenvalues(a.matrix()).unwrap())
        });
    }
    for (p, q) in [(21u64, 34u64), (55, 89)] {
        let a = build_operator(&general, p, q).unwrap();
        group.bench_with_input(BenchmarkId::new("svd_general", q), &a, |b, a| {
            b.iter(|| singular_values(a.matrix()).unwrap())
        });
    }
    group.finish();
}

fn bench_grid(c: &mut Criterion) {
    let params = GridParams::new(Region::centered_square(4.0), Resolution::square(32));
    let mut group = c.benchmark_group("grid_32x32");
    group.sample_size(10);
    let normal = build_operator(&OperatorSpec::almost_mathieu(1.0), 21, 34).unwrap();
    group.bench_function("normal_q34", |b| b.iter(|| compute_grid(normal.matrix(), params).unwrap()));
    let general = build_operator(&OperatorSpec::canonical_real(1.0, 0.0, 2.0, 0.0), 21, 34).unwrap();
    group.bench_function("general_q34", |b| b.iter(|| compute_grid(general.matrix(), params).unwrap()));
    group.finish();
}

fn bench_hausdorff(c: &mut Criterion) {
    let cloud = |n: usize, phase: f64| {
        PointCloud::from_real(&(0..n).map(|k| 4.0 * ((k as f64 + phase) * 0.618).sin()).collect::<Vec<_>>(), "bench")
    };
    let (a, b) = (cloud(2000, 0.0), cloud(2000, 0.5));
    c.bench_function("hausdorff/2000x2000", |bch| bch.iter(|| hausdorff_distance(black_box(&a), black_box(&b)).unwrap()));
    let theta = RealNumberInput::golden();
    let spec = OperatorSpec::almost_mathieu(1.0);
    let mut group = c.benchmark_group("certify_normal");
    group.sample_size(10);
    group.bench_function("level_10", |b| b.iter(|| certify_normal(&theta, &spec, 10).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_expand, bench_build, bench_eigen, bench_grid, bench_hausdorff);
criterion_main!(benches);
