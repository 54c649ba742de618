use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use postsel_bench::wine;
use postsel_core::bootstrap::{run_bootstrap, BootstrapConfig};
use postsel_core::lasso::lars_path;
use postsel_core::linmodel::sigma_full;
use postsel_core::stepwise::{run_stepwise, StepwiseConfig};

fn stepwise(c: &mut Criterion) {
    let ds = wine();
    let mut group = c.benchmark_group("stepwise");
    group.sample_size(10);
    group.bench_function("deterministic_columns", |b| {
        let config = StepwiseConfig::default().without_exact();
        b.iter(|| run_stepwise(&ds, &config).unwrap())
    });
    for reps in [999usize, 9_999] {
        group.bench_with_input(BenchmarkId::new("all_methods", reps), &reps, |b, &reps| {
            let config = StepwiseConfig {
                replicates: reps,
                ..StepwiseConfig::default()
            };
            b.iter(|| run_stepwise(&ds, &config).unwrap())
        });
    }
    group.finish();
}

fn lasso(c: &mut Criterion) {
    let ds = wine();
    c.bench_function("lars_path/wine", |b| b.iter(|| lars_path(&ds).unwrap()));
    c.bench_function("sigma_full/wine", |b| b.iter(|| sigma_full(&ds).unwrap()));

    let mut group = c.benchmark_group("bootstrap");
    group.sample_size(10);
    group.bench_function("wine_b100", |b| {
        let config = BootstrapConfig {
            resamples: 100,
            ..BootstrapConfig::default()
        };
        b.iter(|| run_bootstrap(&ds, &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, stepwise, lasso);
criterion_main!(benches);
