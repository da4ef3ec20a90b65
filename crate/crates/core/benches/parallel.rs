use criterion::{criterion_group, criterion_main, Criterion};
use fockwit::criteria::{verify_f_bound_with, CriterionId, EvalConfig, FGrid};
use fockwit::par::Exec;
use fockwit::sweep::{run_sweep, soundness_sweep, SweepFamily, SweepRange};
use std::hint::black_box;

fn soundness(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..64).collect();
    let ids = [
        CriterionId::LSum,
        CriterionId::HzCross { m: 1, n: 1 },
        CriterionId::HzPair { m: 2, n: 2 },
        CriterionId::K { grid: 16 },
    ];
    let mut group = c.benchmark_group("soundness_sweep");
    for exec in [Exec::Sequential, Exec::Parallel] {
        let config = EvalConfig {
            exec,
            ..EvalConfig::default()
        };
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| {
                soundness_sweep(black_box(&seeds), &[1, 2, 5, 10], &[5, 5], &ids, &config).unwrap()
            })
        });
    }
    group.finish();
}

fn f_grid(c: &mut Criterion) {
    let grid = FGrid::default();
    let mut group = c.benchmark_group("f_grid");
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| verify_f_bound_with(black_box(&grid), exec).unwrap())
        });
    }
    group.finish();
}

fn tmsv_sweep(c: &mut Criterion) {
    let range = SweepRange {
        from: 0.05,
        to: 0.9,
        step: 0.01,
    };
    let mut group = c.benchmark_group("tmsv_sweep");
    for exec in [Exec::Sequential, Exec::Parallel] {
        let config = EvalConfig {
            exec,
            ..EvalConfig::default()
        };
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| {
                run_sweep(
                    SweepFamily::Tmsv,
                    range,
                    CriterionId::K { grid: 16 },
                    None,
                    &config,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, soundness, f_grid, tmsv_sweep);
criterion_main!(benches);
