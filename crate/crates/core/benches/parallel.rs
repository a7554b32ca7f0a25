use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use madm::baselines::{exhaustive_best, worst_position};
use madm::channels::{GridSpec, RisSpec};
use madm::robust::{monte_carlo_cones, solve_robust};
use madm::scenario::Scenario;
use madm::Execution;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn oracle_scenario() -> Scenario {
    let mut s = Scenario::default();
    s.grid = GridSpec { nx: 4, nz: 4, spacing: s.wavelength() / 2.0 };
    s.ris = RisSpec { my: 4, mz: 4, eta: s.ris.eta };
    s.solver.n_a = 4;
    s
}

fn exhaustive(c: &mut Criterion) {
    let s = oracle_scenario();
    let ch = s.channels().unwrap();
    let prob = s.problem(&ch);
    let mut g = c.benchmark_group("exhaustive_4x4_na4");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(exhaustive_best(&prob, exec).unwrap()))
        });
    }
    g.finish();
}

fn worst(c: &mut Criterion) {
    let mut s = Scenario::default();
    s.solver.n_a = 8;
    let ch = s.channels().unwrap();
    let prob = s.problem(&ch);
    let mut g = c.benchmark_group("worst_position_64_trials");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(worst_position(&prob, 64, 1, exec).unwrap()))
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut s = Scenario::default();
    s.solver.n_a = 20;
    let ch = s.channels().unwrap();
    let prob = s.problem(&ch);
    let (state, _) = solve_robust(&prob, &s.robust).unwrap();
    let mut g = c.benchmark_group("monte_carlo_1e5");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(monte_carlo_cones(&prob, &state, &s.robust, 100_000, 7, exec)))
        });
    }
    g.finish();
}

criterion_group!(benches, exhaustive, worst, monte_carlo);
criterion_main!(benches);
