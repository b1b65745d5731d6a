//! Single-worker pool against the default pool on the heavier kernels.
//! Build with `--no-default-features` to time the rayon-free code path.

use aniso::counting::{count_boxes, count_tree, AnisotropyParams, BoxSpec, TreeSpec};
use aniso::exec::with_workers;
use aniso::grid::Geometry;
use aniso::sets::SetSpec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn workers() -> Vec<(&'static str, Option<usize>)> {
    vec![("sequential", Some(1)), ("parallel", None)]
}

fn pair_counts(c: &mut Criterion) {
    let g = Geometry::new(2, 32.0, 512).unwrap();
    let f = SetSpec::Random { density: 0.3, seed: 1 }.build(g).unwrap();
    let spec = BoxSpec::new(AnisotropyParams::new(vec![1.0], vec![4.0]).unwrap()).unwrap();
    let mut group = c.benchmark_group("box n=1, 512²");
    for (name, w) in workers() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_workers(w, || count_boxes(black_box(&f), &spec, 1.0, 0.5).unwrap().value))
        });
    }
    group.finish();
}

fn box_squares(c: &mut Criterion) {
    let g = Geometry::new(4, 16.0, 32).unwrap();
    let f = SetSpec::Random { density: 0.5, seed: 2 }.build(g).unwrap();
    let spec = BoxSpec::new(AnisotropyParams::new(vec![1.0, 2.0], vec![3.0, 3.0]).unwrap()).unwrap();
    let mut group = c.benchmark_group("box n=2, 32⁴");
    group.sample_size(10);
    for (name, w) in workers() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_workers(w, || count_boxes(black_box(&f), &spec, 1.0, 0.5).unwrap().value))
        });
    }
    group.finish();
}

fn trees(c: &mut Criterion) {
    let g = Geometry::new(2, 32.0, 512).unwrap();
    let f = SetSpec::BallLattice { period: 1.0, radius: 0.4 }.build(g).unwrap();
    let spec = TreeSpec::star(AnisotropyParams::new(vec![1.0, 1.5, 2.0], vec![2.0, 2.0, 2.0]).unwrap()).unwrap();
    let mut group = c.benchmark_group("3-leaf star, 512²");
    group.sample_size(10);
    for (name, w) in workers() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_workers(w, || count_tree(black_box(&f), &spec, 1.0, 0.0).unwrap().value))
        });
    }
    group.finish();
}

criterion_group!(benches, pair_counts, box_squares, trees);
criterion_main!(benches);
