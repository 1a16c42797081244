//! Hot-path benchmarks: the equilibrium solve, the two assemblies, the
//! unstable-set solve, and one nonlinear step.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use starspec_core::simulator::{init_sim, step, Perturbation};
use starspec_core::*;

fn bench_profile(c: &mut Criterion) {
    let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
    c.bench_function("solve_profile gamma=1.5 tol=1e-10", |b| {
        b.iter(|| solve_profile(&eos, 1.0, 1e-10).unwrap())
    });
}

fn bench_assembly(c: &mut Criterion) {
    let eos = EquationOfState::polytrope(1.0, 1.25).unwrap();
    let p = solve_profile(&eos, 1.0, 1e-10).unwrap();
    c.bench_function("assemble_eulerian 400 cells", |b| {
        b.iter(|| assemble_eulerian(&p, 0.1, 0.1, 400).unwrap())
    });
    c.bench_function("assemble_mass_coord 400 cells", |b| {
        b.iter(|| assemble_mass_coord(&p, 0.1, 0.1, 400).unwrap())
    });
}

fn bench_spectral(c: &mut Criterion) {
    let eos = EquationOfState::polytrope(1.0, 1.25).unwrap();
    let p = solve_profile(&eos, 1.0, 1e-10).unwrap();
    let triple = assemble_eulerian(&p, 0.1, 0.1, 400).unwrap();
    c.bench_function("inertia_nminus 400 cells", |b| {
        b.iter(|| inertia_nminus(&triple).unwrap())
    });
    c.bench_function("solve_qep tau=1 400 cells", |b| {
        b.iter(|| solve_qep(&triple, 1.0).unwrap())
    });
}

fn bench_simulator(c: &mut Criterion) {
    let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
    let p = solve_profile(&eos, 1.0, 1e-10).unwrap();
    let state = init_sim(
        &p,
        200,
        0.1,
        0.1,
        Perturbation::Displacement {
            amplitude: 1e-3,
            mode: 1,
        },
    )
    .unwrap();
    c.bench_function("simulator step N=200", |b| {
        b.iter_batched(
            || state.clone(),
            |mut s| step(&mut s, 1e-3).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_profile,
    bench_assembly,
    bench_spectral,
    bench_simulator
);
criterion_main!(benches);
