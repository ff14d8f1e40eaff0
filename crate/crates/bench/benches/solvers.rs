use std::hint::black_box;

use bose2d::asymptotics::{run_sweep, SweepSpec};
use bose2d::lower_bound::{optimize_lower_bound, ScheduleConstants};
use bose2d::scattering::minimize_functional;
use bose2d::suites::{random_dyson_case, rng, run_dyson_case};
use bose2d::upper_bound::optimize_b;
use bose2d::{solve_radial, RadialPotential};
use bose2d_bench::{gas, square_well_solution, stepped_potential};
use criterion::{criterion_group, criterion_main, Criterion};

fn scattering(c: &mut Criterion) {
    let well = RadialPotential::square_well(4.0, 1.0).unwrap();
    let stepped = stepped_potential();
    c.bench_function("solve_radial/square_well", |b| b.iter(|| solve_radial(black_box(&well), 1.0, 2).unwrap()));
    c.bench_function("solve_radial/stepped", |b| b.iter(|| solve_radial(black_box(&stepped), 1.0, 2).unwrap()));
    c.bench_function("minimize_functional/4096", |b| {
        b.iter(|| minimize_functional(black_box(&well), 10.0, 1.0, 2, 4096).unwrap())
    });
}

fn bounds(c: &mut Criterion) {
    let sol = square_well_solution();
    let g = gas(&sol, 1e-40);
    c.bench_function("optimize_b/1e-40", |b| b.iter(|| optimize_b(black_box(&g), &sol).unwrap()));
    let g = gas(&sol, 1e-300);
    let sched = ScheduleConstants::default();
    c.bench_function("optimize_lower_bound/1e-300", |b| {
        b.iter(|| optimize_lower_bound(black_box(&g), sol.ln_a(), 1.0, &sched).unwrap())
    });
}

fn pipelines(c: &mut Criterion) {
    let case = random_dyson_case(&mut rng(0));
    c.bench_function("dyson/64_angles", |b| b.iter(|| run_dyson_case(black_box(&case), 1.0, 64).unwrap()));
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let spec = SweepSpec::new(RadialPotential::hard_disc(1.0).unwrap(), 1.0);
    group.bench_function("default_hard_disc", |b| b.iter(|| run_sweep(black_box(&spec)).unwrap()));
    group.finish();
}

criterion_group!(benches, scattering, bounds, pipelines);
criterion_main!(benches);
