use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use livens::convergence::{convergence_study, Reference};
use livens::models::{MassSpring, SpringPendulum};
use livens::parallel::{integrate_batch, ExecutionMode};
use livens::SolverSettings;

const MODES: [ExecutionMode; 2] = [ExecutionMode::Sequential, ExecutionMode::Parallel];

fn pendulum_sweep(c: &mut Criterion) {
    let model = SpringPendulum::default();
    let settings = SolverSettings::new(0.01, 1.0);
    let mut group = c.benchmark_group("pendulum_sweep");
    group.sample_size(10);
    for runs in [8usize, 32] {
        // perturbed azimuthal rates
        let initial: Vec<_> = (0..runs)
            .map(|k| {
                let (q0, mut v0) = model.default_initial_conditions();
                v0[2] += 0.01 * k as f64;
                (q0, v0)
            })
            .collect();
        for mode in MODES {
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), runs), &initial, |b, initial| {
                b.iter(|| integrate_batch(mode, &model, black_box(initial.clone()), &settings))
            });
        }
    }
    group.finish();
}

fn self_convergence(c: &mut Criterion) {
    let model = SpringPendulum::default();
    let (q0, v0) = model.default_initial_conditions();
    let base = SolverSettings::new(0.01, 1.0);
    let h_list = [0.04, 0.02, 0.01, 0.005];
    let mut group = c.benchmark_group("pendulum_convergence");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for mode in MODES {
        group.bench_function(format!("{mode:?}"), |b| {
            b.iter(|| convergence_study(&model, &q0, &v0, &base, black_box(&h_list), Reference::Refined, mode).unwrap())
        });
    }
    group.finish();
}

fn single_trajectory(c: &mut Criterion) {
    let model = MassSpring::default();
    let (q0, v0) = model.default_initial_conditions();
    let settings = SolverSettings::new(0.1, 10.0);
    c.bench_function("mass_spring_100_steps", |b| {
        b.iter(|| livens::integrate(&model, black_box(&q0), &v0, &settings).unwrap())
    });
}

criterion_group!(benches, single_trajectory, pendulum_sweep, self_convergence);
criterion_main!(benches);
