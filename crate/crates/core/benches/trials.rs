use std::hint::black_box;

use beltgrip::dynamics;
use beltgrip::harness::{self, bundled, PerturbationModel, SuccessSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn trials(c: &mut Criterion) {
    let scenario = bundled::cube_light_grip();
    let perturbation = PerturbationModel::none(7).with_mu_jitter(0.2);
    let success = SuccessSpec::dx(0.02);

    let mut group = c.benchmark_group("trials");
    group.sample_size(10);
    for n in [8usize, 32] {
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| harness::run_trials_sequential(&scenario, &perturbation, black_box(n), &success).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| harness::run_trials_parallel(&scenario, &perturbation, black_box(n), &success).unwrap())
        });
    }
    group.finish();
}

fn single_run(c: &mut Criterion) {
    let scenario = bundled::sphere_reorient();
    c.bench_function("simulate/sphere_reorient", |b| {
        b.iter(|| dynamics::run(&scenario, &scenario.schedule, scenario.dt, scenario.t_end, |_, _, _| {}).unwrap())
    });
}

criterion_group!(benches, trials, single_run);
criterion_main!(benches);
