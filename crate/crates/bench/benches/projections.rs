//! Benchmarks for the hot paths: the projection iteration itself, certificate
//! construction over the subcollection lattice, regularity estimation, the
//! power-iteration operator norm, and cycle segmentation.

use criterion::{criterion_group, criterion_main, Criterion};
use relaxproj::{
    bound_certificate, estimate_kappa, iterate_with, operator_norm, segment_cycles, Schedule,
    SubcollectionKappa, Vector,
};
use relaxproj_bench::{dense_matrix, direction_collection, hyperplane_collection, index_word};
use std::hint::black_box;

fn bench_iterate(c: &mut Criterion) {
    let collection = hyperplane_collection(15, 10, 42);
    let schedule = Schedule::random(1, 1.0).unwrap();
    let x0 = Vector::zeros(10);
    c.bench_function("iterate_3000_steps_15x10", |b| {
        b.iter(|| {
            let trace =
                iterate_with(black_box(&collection), &schedule, &x0, 3000, false).unwrap();
            black_box(trace.sup_norm)
        })
    });
}

fn bench_certificate(c: &mut Criterion) {
    let collection = hyperplane_collection(4, 4, 7);
    let directions = direction_collection(4, 4, 7);
    let mut group = c.benchmark_group("certificate");
    group.sample_size(10);
    group.bench_function("bound_certificate_ell4", |b| {
        b.iter(|| {
            let mut oracle = SubcollectionKappa::new(directions.clone(), 60, 7).unwrap();
            let cert =
                bound_certificate(black_box(&collection), 1.0, |idx| oracle.kappa_star(idx))
                    .unwrap();
            black_box(cert.constant)
        })
    });
    group.finish();
}

fn bench_kappa(c: &mut Criterion) {
    let pair = direction_collection(2, 4, 11);
    let mut group = c.benchmark_group("regularity");
    group.sample_size(10);
    group.bench_function("estimate_kappa_pair_d4", |b| {
        b.iter(|| {
            let report = estimate_kappa(black_box(&pair), 100, 11).unwrap();
            black_box(report.kappa)
        })
    });
    group.finish();
}

fn bench_operator_norm(c: &mut Criterion) {
    let m = dense_matrix(40, 13);
    c.bench_function("operator_norm_40x40", |b| {
        b.iter(|| black_box(operator_norm(black_box(&m), 1e-12)))
    });
}

fn bench_segmentation(c: &mut Criterion) {
    let word = index_word(2000, 4, 17);
    c.bench_function("segment_cycles_len2000_ell4", |b| {
        b.iter(|| {
            let seg = segment_cycles(black_box(&word), 4);
            black_box(seg.k)
        })
    });
}

criterion_group!(
    benches,
    bench_iterate,
    bench_certificate,
    bench_kappa,
    bench_operator_norm,
    bench_segmentation
);
criterion_main!(benches);
