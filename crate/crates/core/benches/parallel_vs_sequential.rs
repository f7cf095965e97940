use std::hint::black_box;

use branchpoint::metric::config_hausdorff_distance_with;
use branchpoint::{
    build_gamma_with, gen, phase_change_scales, verify_interleaving_with, DistanceMatrix,
    Execution, Metric, NestedPair, PointCloud,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn nested(n: usize, seed: u64) -> (PointCloud, PointCloud) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = gen::random_cloud_styled(&mut rng, n, 2, gen::CoordStyle::Uniform);
    let x = gen::random_subcloud(&mut rng, &y, n * 3 / 4);
    (x, y)
}

fn config_distance(c: &mut Criterion) {
    let mut group = c.benchmark_group("config_hausdorff");
    for n in [12, 20] {
        let (x, y) = nested(n, 1);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| {
                    config_hausdorff_distance_with(
                        black_box(&x),
                        black_box(&y),
                        2,
                        Metric::Euclidean,
                        exec,
                    )
                })
            });
        }
    }
    group.finish();
}

fn hierarchy(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_gamma");
    for n in [25, 60] {
        let (_, y) = nested(n, 2);
        let dm = DistanceMatrix::new(&y, Metric::Euclidean);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| build_gamma_with(black_box(&dm), phase_change_scales(&dm), 1, exec))
            });
        }
    }
    group.finish();
}

fn interleaving(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_interleaving");
    group.sample_size(10);
    for n in [12, 20] {
        let (x, y) = nested(n, 3);
        let pair = NestedPair::new(x, y, 1, Metric::Euclidean, None).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| verify_interleaving_with(black_box(&pair), exec))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, config_distance, hierarchy, interleaving);
criterion_main!(benches);
