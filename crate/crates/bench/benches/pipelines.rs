use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fracvar_core::approx::{build_reduced_lagrangian, solve_reduced_herglotz, ExpansionSpec, SolverSettings};
use fracvar_core::expr::{builtin_problem, BuiltinParams};
use fracvar_core::herglotz::{el_residual, solve_z};
use fracvar_core::noether::{constant_of_motion, cyclic_trajectory};
use fracvar_core::{Grid, HerglotzProblem, SampledFunction};

fn problem(name: &str, n: usize) -> HerglotzProblem {
    let spec = builtin_problem(name, &BuiltinParams::default()).unwrap();
    HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, n).unwrap()).unwrap()
}

fn pipelines(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipelines");
    group.sample_size(20);

    let p = problem("example2", 2001);
    let x = vec![SampledFunction::from_fn(&p.grid, |t| t * t)];
    group.bench_function("residual/example2/2001", |b| {
        b.iter(|| el_residual(&p, &solve_z(&p, black_box(&x)).unwrap()).unwrap())
    });

    let p3 = problem("example3", 2001);
    let red = build_reduced_lagrangian(&p3.lagrangian, ExpansionSpec::new(1, 0.0, 0.5).unwrap(), 0.0).unwrap();
    group.bench_function("solve/example3/2001", |b| {
        b.iter(|| solve_reduced_herglotz(black_box(&red), &p3, &SolverSettings::default()).unwrap())
    });

    let pn = problem("noether_gamma", 2001);
    group.bench_function("noether/cyclic/2001", |b| {
        b.iter(|| {
            let (_, traj) = cyclic_trajectory(black_box(&pn), &SolverSettings::default()).unwrap();
            constant_of_motion(&pn, &traj, 0).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, pipelines);
criterion_main!(benches);
