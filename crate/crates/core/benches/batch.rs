//! Sequential against rayon-parallel batch evaluation on the three batched workloads.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dualwalk::chain::AcceptanceChoice;
use dualwalk::gates;
use dualwalk::lab::{self, sample, SweepSpec};
use dualwalk::walk::MhWalk;
use dualwalk::{Execution, Tolerances};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn shots(c: &mut Criterion) {
    let probs: Vec<f64> = (1..=64).map(|k| k as f64 / 2080.0).collect();
    let mut g = c.benchmark_group("sample_with_retries_1e6");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sample::sample_with_retries(black_box(&probs), 0.7, 1_000_000, 42, exec))
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let tol = Tolerances::default();
    let spec = SweepSpec::default();
    let mut g = c.benchmark_group("reproduce_fig1");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| lab::reproduce_fig1(black_box(&spec), &tol, exec).unwrap())
        });
    }
    g.finish();
}

fn gate_columns(c: &mut Criterion) {
    let inst = lab::random_instance(8, 7, AcceptanceChoice::Metropolis).unwrap();
    let walk = MhWalk::new(&inst.t, &inst.a, &Tolerances::default()).unwrap();
    let seq = gates::assemble_w(3, &walk).unwrap();
    let inputs: Vec<usize> = gates::walk_block_inputs(3).into_iter().step_by(16).collect();
    let mut g = c.benchmark_group("walk_gate_columns_m3");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| seq.columns(black_box(&inputs), exec)));
    }
    g.finish();
}

criterion_group!(benches, shots, sweep, gate_columns);
criterion_main!(benches);
