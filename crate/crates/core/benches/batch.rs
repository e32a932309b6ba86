use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use effective_forms::classify::classify;
use effective_forms::exec::Execution;
use effective_forms::multilinear::{pullback, KForm};
use effective_forms::normal_forms::{has_parameter, representative};
use effective_forms::sampling::{effective_basis, random_effective_form};
use effective_forms::witness::{random_sp, solve_conjugacy, SolverOptions};
use effective_forms::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn witness_restarts(c: &mut Criterion) {
    let dst: KForm<f64> = representative(2, Some(&1.25)).unwrap();
    let src = pullback(&random_sp(3, 0.5), &dst).unwrap();
    let mut group = c.benchmark_group("witness_restarts");
    group.sample_size(10);
    for (name, execution) in MODES {
        // Every restart runs: the acceptance thresholds are unreachable.
        let opts = SolverOptions {
            restarts: 8,
            batch: 8,
            accept_residual: 0.0,
            execution,
            ..SolverOptions::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| solve_conjugacy(&src, &dst, &opts).unwrap())
        });
    }
    group.finish();
}

fn orbit_sweep(c: &mut Criterion) {
    let basis = effective_basis::<Rational>(6, 3);
    let forms: Vec<KForm<Rational>> = (0..256)
        .map(|i| random_effective_form(&mut ChaCha8Rng::seed_from_u64(i), &basis, 3))
        .collect();
    let mut group = c.benchmark_group("orbit_sweep");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| execution.map(forms.len(), |i| classify(&forms[i]).unwrap().family))
        });
    }
    group.finish();
}

fn conjugate_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("conjugate_recovery");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                execution.map(8, |k| {
                    let family = k as u8 + 1;
                    let dst: KForm<f64> = representative(family, has_parameter(family).then_some(1.25).as_ref()).unwrap();
                    let src = pullback(&random_sp(k as u64, 0.5), &dst).unwrap();
                    let opts = SolverOptions {
                        execution: Execution::Sequential,
                        ..SolverOptions::default()
                    };
                    solve_conjugacy(&src, &dst, &opts).unwrap().converged
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, witness_restarts, orbit_sweep, conjugate_sweep);
criterion_main!(benches);
