use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use fkwave_core::analysis::{velocity_at, VelocityConfig};
use fkwave_core::evolution::{build_stencil, initial_front, step};
use fkwave_core::hull::{solve_hull, HullConfig};
use fkwave_core::{EvolutionConfig, GridParams, NonlinearitySpec};

fn fk2() -> NonlinearitySpec {
    NonlinearitySpec::frenkel_kontorova(2.0).unwrap()
}

fn bench_step(c: &mut Criterion) {
    let spec = fk2();
    let sigma = 1.8;
    let grid = GridParams::default();
    let pair = spec.equilibria(sigma).unwrap();
    let u0 = initial_front(&pair, &grid);
    let stencil = build_stencil(&spec, grid.h);
    let dt = stencil.dt_max();
    c.bench_function("step 4001 nodes", |b| {
        b.iter_batched(|| u0.clone(), |u| step(black_box(&u), &spec, sigma, dt, &stencil).unwrap(), BatchSize::SmallInput)
    });
}

fn bench_velocity(c: &mut Criterion) {
    let spec = fk2();
    let cfg = VelocityConfig {
        evolution: EvolutionConfig {
            grid: GridParams { h: 0.05, half_width: 40.0 },
            t_end: 50.0,
            recenter: true,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut g = c.benchmark_group("velocity");
    g.sample_size(10);
    g.bench_function("fk2 sigma 1.8, T 50", |b| b.iter(|| velocity_at(&spec, black_box(1.8), &cfg).unwrap()));
    g.finish();
}

fn bench_hull(c: &mut Criterion) {
    let spec = fk2();
    let cfg = HullConfig { m: 128, ..Default::default() };
    let mut g = c.benchmark_group("hull");
    g.sample_size(10);
    g.bench_function("fk2 p 0.5 sigma 3", |b| b.iter(|| solve_hull(&spec, 0.5, black_box(3.0), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, bench_step, bench_velocity, bench_hull);
criterion_main!(benches);
