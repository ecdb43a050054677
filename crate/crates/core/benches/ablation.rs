//! Sequential vs rayon execution of the Monte-Carlo trial pool.
//!
//! The workload is a scaled-down Lorenz ablation (small reservoir, short
//! series) so a full comparison fits in a normal bench run:
//!
//! ```text
//! cargo bench -p delay-esn
//! ```

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use delay_esn::experiments::{
    run_ablation_sequential, run_ablation_with_jobs, AblationSpec, AblationSystem,
};
use delay_esn::reservoir::EsnConfig;

fn bench_spec() -> AblationSpec {
    AblationSpec {
        system: AblationSystem::LorenzX,
        m_grid: vec![1, 5],
        trials: 4,
        horizon: 50,
        train_len: 300,
        base_config: EsnConfig {
            reservoir_size: 100,
            connection_probability: 0.05,
            ..EsnConfig::default()
        },
        base_seed: 42,
        fix_data: false,
    }
}

fn ablation_executors(c: &mut Criterion) {
    let spec = bench_spec();
    let mut group = c.benchmark_group("ablation_trials");
    group.sample_size(10);

    group.bench_function("sequential", |b| {
        b.iter(|| run_ablation_sequential(black_box(&spec), None).unwrap())
    });
    group.bench_function("rayon_default_pool", |b| {
        b.iter(|| run_ablation_with_jobs(black_box(&spec), None, 0).unwrap())
    });
    group.bench_function("rayon_two_workers", |b| {
        b.iter(|| run_ablation_with_jobs(black_box(&spec), None, 2).unwrap())
    });
    group.finish();
}

fn single_training_run(c: &mut Criterion) {
    use delay_esn::systems::{integrate_lorenz, observe, LorenzParams, Observable};
    use delay_esn::training::train;

    let traj = integrate_lorenz(&LorenzParams::default(), [1.0, 1.0, 1.0], 0.1, 1000, 10, 1000)
        .unwrap();
    let series = observe(&traj, Observable::X, "lorenz_x");
    let config = EsnConfig {
        embedding_dimension: 5,
        seed: 7,
        ..EsnConfig::default()
    };

    c.bench_function("train_lorenz_n500", |b| {
        b.iter(|| train(black_box(&series), black_box(&config)).unwrap())
    });
}

criterion_group!(benches, ablation_executors, single_training_run);
criterion_main!(benches);
