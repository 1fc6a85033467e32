use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use twoenv::{exact_expected_payoff, run, Prior, SimConfig, Strategy};

fn bench_run(c: &mut Criterion) {
    let prior: Prior = "uniform:1,3,7.50,12.25".parse().unwrap();
    let mut group = c.benchmark_group("run");
    let trials = 100_000;
    group.throughput(Throughput::Elements(trials));
    for strategy in ["never-switch", "random:1/3", "naive-bayesian"] {
        for workers in [1, 4] {
            let config = SimConfig::new(
                prior.clone(),
                strategy.parse().unwrap(),
                trials,
                42,
                workers,
            )
            .unwrap();
            group.bench_with_input(BenchmarkId::new(strategy, workers), &config, |b, config| {
                b.iter(|| run(black_box(config)).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_expected_payoff");
    for size in [1usize, 20, 200] {
        let bases = (1..=size)
            .map(|i| format!("{i}.{:02}", i % 100))
            .collect::<Vec<_>>()
            .join(",");
        let prior: Prior = format!("uniform:{bases}").parse().unwrap();
        let strategy: Strategy = "random:2/7".parse().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(size), &prior, |b, prior| {
            b.iter(|| exact_expected_payoff(black_box(prior), &strategy))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_run, bench_oracle);
criterion_main!(benches);
