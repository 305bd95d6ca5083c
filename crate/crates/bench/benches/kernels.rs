//! Microbenchmarks for the numeric kernels: eigendecomposition, closure
//! generation, validation, core search and the exhaustive parity count.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use qivpm_core::hilbert::{basis_ket, Complex64};
use qivpm_core::{
    find_core_member, hermitian_eigensystem, ks_search, ComplexMatrix, CoreQuery,
    DensityMatrix, EventSpace, Interval, Projector, Qivpm,
};

/// Deterministic dense Hermitian test matrix.
fn test_hermitian(dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |i, j| {
        Complex64::new(
            ((i * 7 + j * 3) as f64).sin(),
            ((i * 5) as f64 - (j * 2) as f64).cos(),
        )
    });
    g.add(&g.adjoint()).scale_re(0.5)
}

fn bench_eigensystem(c: &mut Criterion) {
    for dim in [4, 8] {
        let m = test_hermitian(dim);
        c.bench_function(&format!("hermitian_eigensystem_d{dim}"), |b| {
            b.iter(|| hermitian_eigensystem(black_box(&m)).unwrap())
        });
    }
}

fn bench_closure(c: &mut Criterion) {
    let atoms: Vec<Projector> = (0..4)
        .map(|i| Projector::onto_ket(&basis_ket(4, i)).unwrap())
        .collect();
    c.bench_function("boolean_algebra_d4", |b| {
        b.iter(|| EventSpace::generate(4, black_box(&atoms), 64).unwrap())
    });
}

fn bench_validate(c: &mut Criterion) {
    let atoms: Vec<Projector> = (0..3)
        .map(|i| Projector::onto_ket(&basis_ket(3, i)).unwrap())
        .collect();
    let space = EventSpace::generate(3, &atoms, 64).unwrap();
    let third = 1.0 / 3.0;
    let intervals = space
        .members()
        .iter()
        .map(|p| Interval::point(p.rank() as f64 * third))
        .collect();
    let m = Qivpm::new(space, intervals).unwrap();
    c.bench_function("validate_8_member_algebra", |b| {
        b.iter(|| black_box(&m).validate(1e-9))
    });
}

fn bench_core_search(c: &mut Criterion) {
    let space = qivpm_core::events::mub_space_d3().unwrap();
    let rho = DensityMatrix::maximally_mixed(3);
    let m = Qivpm::born(&rho, &space).unwrap();
    let mut group = c.benchmark_group("core_search");
    group.sample_size(20);
    group.bench_function("sharp_measure_on_mub_space", |b| {
        b.iter(|| find_core_member(black_box(&CoreQuery::new(m.clone()))).unwrap())
    });
    group.finish();
}

fn bench_parity_search(c: &mut Criterion) {
    c.bench_function("exhaustive_parity_count", |b| {
        b.iter(|| black_box(ks_search()))
    });
}

criterion_group!(
    benches,
    bench_eigensystem,
    bench_closure,
    bench_validate,
    bench_core_search,
    bench_parity_search
);
criterion_main!(benches);
