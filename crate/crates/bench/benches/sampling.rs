use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use haarforge_core::sampling::{
    gamma_sample_mt, randomness_budget_beta, randomness_budget_gaussian, sample_rounded_beta, sample_rounded_gaussian,
    BetaSamplerConfig, RandomTape,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn gaussian(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let m1 = 30;
    c.bench_function("rounded_gaussian/m1=30", |b| {
        b.iter_batched(
            || RandomTape::from_rng(&mut rng, randomness_budget_gaussian(m1)),
            |mut tape| sample_rounded_gaussian(m1, 16.0, &mut tape).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn gamma(c: &mut Criterion) {
    c.bench_function("gamma_mt/binary64", |b| b.iter(|| gamma_sample_mt(2.0, std::hint::black_box(0.3), 0.5)));
}

fn beta(c: &mut Criterion) {
    let mut group = c.benchmark_group("rounded_beta");
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for (m, alpha) in [(8u32, 1u64), (8, 4), (19, 4), (19, 1024)] {
        let cfg = BetaSamplerConfig::new(m, alpha).unwrap();
        let bits = randomness_budget_beta(m, alpha).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("m={m},a={alpha}")), &cfg, |b, cfg| {
            b.iter_batched(
                || RandomTape::from_rng(&mut rng, bits),
                |mut tape| sample_rounded_beta(cfg, &mut tape).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, gaussian, gamma, beta);
criterion_main!(benches);
