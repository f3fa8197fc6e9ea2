use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use secondkind_core::kahler::curvature_report;
use secondkind_core::models::{algebraic_subspace, random_kahler};
use secondkind_core::spectral::{assemble, spectrum};
use secondkind_core::TracelessBasis;

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble");
    for m in [2, 3, 4] {
        let r = random_kahler(m, 1).unwrap().into_base();
        let basis = TracelessBasis::standard(2 * m).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(2 * m), &r, |b, r| {
            b.iter(|| assemble(black_box(r), &basis).unwrap())
        });
    }
    g.finish();
}

fn eigensolve(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectrum");
    for m in [2, 3, 4] {
        let r = random_kahler(m, 2).unwrap().into_base();
        g.bench_with_input(BenchmarkId::from_parameter(2 * m), &r, |b, r| {
            b.iter(|| spectrum(black_box(r)).unwrap())
        });
    }
    g.finish();
}

fn nullspace(c: &mut Criterion) {
    // Cached after the first call, so this measures sampling from the basis.
    let mut g = c.benchmark_group("algebraic_sample");
    for n in [4, 6] {
        let s = algebraic_subspace(n).unwrap();
        g.bench_function(BenchmarkId::from_parameter(n), |b| b.iter(|| s.sample(black_box(3))));
    }
    g.finish();
}

fn functionals(c: &mut Criterion) {
    let k = random_kahler(2, 5).unwrap();
    c.bench_function("curvature_report/m=2/200", |b| {
        b.iter(|| curvature_report(black_box(&k), 200, 0).unwrap())
    });
}

criterion_group!(benches, assembly, eigensolve, nullspace, functionals);
criterion_main!(benches);
