//! Sequential vs data-parallel execution of the two embarrassingly parallel
//! workloads: a spectrum sweep and the kernel grid.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qbwg::kernels::kernel_grid_with;
use qbwg::par::Execution;
use qbwg::spectrum::{spectrum_sweep, SweepAxis};
use qbwg::SystemParams;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sweep(c: &mut Criterion) {
    let base = SystemParams::reference(1.4);
    let mut g = c.benchmark_group("spectrum_sweep_dz_41");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| spectrum_sweep(&base, SweepAxis::DeltaZ, 0.0, 2.0, 41, exec).unwrap())
        });
    }
    g.finish();
}

fn grid(c: &mut Criterion) {
    let p = SystemParams::reference(1.0);
    let mut g = c.benchmark_group("kernel_grid_5000");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| kernel_grid_with(&p, 0.01, 5000, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, grid);
criterion_main!(benches);
