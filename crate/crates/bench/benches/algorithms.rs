use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ssac_bench::mixture;
use ssac_core::faulty::partition_sample;
use ssac_core::{
    cost, kmeans_pp, query_kmeans_core, query_kmeans_pp, solve_exact, D2Sampler, FaultyOracle, GroundTruth,
    PerfectOracle, PtasConfig,
};

fn seeding(c: &mut Criterion) {
    let (x, labels) = mixture(8, 250, 4, 1);
    let truth = GroundTruth::new(labels);
    c.bench_function("kmeans++ k=8 n=2000", |b| {
        b.iter_batched(
            || ChaCha8Rng::seed_from_u64(0),
            |mut rng| kmeans_pp(&x, 8, &mut rng).unwrap(),
            BatchSize::SmallInput,
        )
    });
    c.bench_function("query-kmeans++ k=8 n=2000", |b| {
        b.iter_batched(
            || (PerfectOracle::new(truth.clone()), ChaCha8Rng::seed_from_u64(0)),
            |(mut o, mut rng)| query_kmeans_pp(&x, 8, &mut o, &mut rng).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn sampling(c: &mut Criterion) {
    let (x, _) = mixture(4, 2500, 8, 2);
    let seeded = kmeans_pp(&x, 4, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    c.bench_function("cost n=10000 k=4 d=8", |b| b.iter(|| cost(&seeded.centers, &x).unwrap()));
    let sampler = D2Sampler::new(&seeded.centers, &x).unwrap();
    c.bench_function("D² draws x20000", |b| {
        b.iter_batched(
            || ChaCha8Rng::seed_from_u64(1),
            |mut rng| sampler.sample_many(20_000, &mut rng).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn ptas(c: &mut Criterion) {
    let (x, labels) = mixture(3, 40, 2, 3);
    let truth = GroundTruth::new(labels);
    let cfg = PtasConfig::new(3, 0.5).unwrap().with_scale(1.656e-5).unwrap();
    c.bench_function("query-kmeans core k=3 L=20000", |b| {
        b.iter_batched(
            || (PerfectOracle::new(truth.clone()), ChaCha8Rng::seed_from_u64(0)),
            |(mut o, mut rng)| query_kmeans_core(&x, &cfg, &mut o, &mut rng).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn faulty(c: &mut Criterion) {
    let (_, labels) = mixture(3, 60, 2, 4);
    let truth = GroundTruth::new(labels);
    let sample: Vec<usize> = (0..180).collect();
    c.bench_function("partition_sample 180 q=0.2", |b| {
        b.iter_batched(
            || FaultyOracle::new(truth.clone(), 0.2, 7).unwrap(),
            |mut o| partition_sample(&sample, 10, &mut o).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn exact(c: &mut Criterion) {
    let (x, _) = mixture(3, 4, 2, 5);
    c.bench_function("solve_exact n=12 k=3", |b| b.iter(|| solve_exact(&x, 3).unwrap()));
}

criterion_group!(benches, seeding, sampling, ptas, faulty, exact);
criterion_main!(benches);
