use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lnq::simulator::{run_experiment_with, Execution, SimulationScenario};

fn execution(c: &mut Criterion) {
    let mut group = c.benchmark_group("power_multiplicative_sigma_0.3");
    group.sample_size(20);
    for reps in [1_000, 10_000] {
        let scenario = SimulationScenario::power_multiplicative(0.3, reps, 2015).unwrap();
        for (name, mode) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, reps), &scenario, |b, s| {
                b.iter(|| run_experiment_with(s, mode))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, execution);
criterion_main!(benches);
