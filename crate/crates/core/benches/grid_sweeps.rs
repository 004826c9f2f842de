//! Grid-sweep benchmarks: the data-parallel path (`parallel::map_indexed`,
//! rayon behind the default `parallel` feature) against the sequential
//! reference (`parallel::map_indexed_seq`) on the workloads the norm
//! estimators actually run.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hamlab::grid::GridSpec;
use hamlab::hamiltonian::Hamiltonian;
use hamlab::maps::MapExpr;
use hamlab::norms;
use hamlab::parallel;
use hamlab::phase_space::Point;

fn annulus_points(n_theta: usize, n_action: usize) -> Vec<Point> {
    let mut v = Vec::with_capacity(n_theta * n_action);
    for i in 0..n_theta {
        for j in 0..n_action {
            v.push(Point::annulus(
                i as f64 / n_theta as f64,
                (j as f64 + 0.5) / n_action as f64,
            ));
        }
    }
    v
}

fn conjugator_flow() -> MapExpr {
    MapExpr::flow(
        Hamiltonian::AnnulusConjugator {
            frequency: 3,
            phase: 0.2,
            amplitude: 0.4,
            profile: Default::default(),
        },
        1.0,
    )
}

/// Displacement sweep (the inner loop of `c0_distance`) over flow
/// evaluations: parallel vs sequential collection.
fn bench_displacement_sweep(c: &mut Criterion) {
    let map = conjugator_flow();
    let mut group = c.benchmark_group("displacement_sweep");
    for (nt, na) in [(32usize, 8usize), (64, 16)] {
        let points = annulus_points(nt, na);
        let eval = |i: usize| {
            let p = &points[i];
            let q = map.evaluate(p).unwrap();
            hamlab::phase_space::riemannian_distance(p, &q).unwrap()
        };
        let n = points.len();
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| {
                parallel::map_indexed(n, eval)
                    .into_iter()
                    .fold(0.0_f64, f64::max)
            })
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| {
                parallel::map_indexed_seq(n, eval)
                    .into_iter()
                    .fold(0.0_f64, f64::max)
            })
        });
    }
    group.finish();
}

/// Whole-estimator comparison: `derivative_norm` of a twist (cheap per
/// point, collection overhead dominates) at two grid sizes.
fn bench_derivative_norm(c: &mut Criterion) {
    let map = MapExpr::Twist { strength: 1.0 };
    let mut group = c.benchmark_group("derivative_norm");
    for side in [64usize, 128] {
        let grid = GridSpec::new(side, side);
        group.bench_with_input(BenchmarkId::new("twist", side), &grid, |b, grid| {
            b.iter(|| norms::derivative_norm(&map, grid).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_displacement_sweep, bench_derivative_norm);
criterion_main!(benches);
