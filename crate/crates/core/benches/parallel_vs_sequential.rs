use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use farey_stairs::farey::farey_level;
use farey_stairs::omega::omega_approx;
use farey_stairs::spectrum::{default_q_grid, spectrum};
use farey_stairs::staircase::{CircleModel, CircleSolverConfig, IsingModel, IsingParams};
use farey_stairs::Executor;

fn executors() -> Vec<(&'static str, Executor)> {
    let n = std::thread::available_parallelism()
        .map_or(2, |n| n.get())
        .max(2);
    vec![
        ("sequential", Executor::Sequential),
        ("parallel", Executor::from_jobs(n)),
    ]
}

fn tongue_solves(c: &mut Criterion) {
    let fractions = farey_level(6).unwrap().entries;
    let mut group = c.benchmark_group("tongue_solves_level6");
    group.sample_size(10);
    for (name, exec) in executors() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let model = CircleModel::new(CircleSolverConfig::default()).unwrap();
                black_box(model.intervals(&fractions, exec).unwrap())
            })
        });
    }
    group.finish();
}

fn ising_gaps(c: &mut Criterion) {
    let model = IsingModel::with_p_max(IsingParams::new(2.0, 1.0).unwrap(), 20_000);
    omega_approx(&model, 1, Executor::Sequential).unwrap();
    let mut group = c.benchmark_group("ising_gaps_depth9");
    group.sample_size(10);
    for (name, exec) in executors() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(omega_approx(&model, 9, exec).unwrap()))
        });
    }
    group.finish();
}

fn q_sweep(c: &mut Criterion) {
    let model = IsingModel::new(IsingParams::new(2.0, 1.0).unwrap());
    let approx = omega_approx(&model, 10, Executor::Sequential).unwrap();
    let grid = default_q_grid();
    let mut group = c.benchmark_group("q_sweep_depth10");
    for (name, exec) in executors() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(spectrum(&approx, &grid, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, tongue_solves, ising_gaps, q_sweep);
criterion_main!(benches);
