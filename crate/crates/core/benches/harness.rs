use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use samplebench::harness::{run_invitro, ExperimentConfig};
use samplebench::par::Execution;

fn invitro(c: &mut Criterion) {
    let config = ExperimentConfig {
        models: 4,
        traces_per_log: 500,
        samples_per_ratio: 3,
        ..ExperimentConfig::default()
    };
    let mut group = c.benchmark_group("invitro");
    group.sample_size(10);
    for (name, execution) in [("serial", Execution::Serial), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &execution, |b, &execution| {
            b.iter(|| run_invitro(&config, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, invitro);
criterion_main!(benches);
