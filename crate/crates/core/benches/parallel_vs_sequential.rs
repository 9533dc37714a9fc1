use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qseries::askey_wilson::{aw_weight_complex, AwParams};
use qseries::harness::{run, RunConfig};
use qseries::par::ExecMode;
use qseries::quadrature::{integrate_with, QuadOptions};

const MODES: [(&str, ExecMode); 2] = [("parallel", ExecMode::Parallel), ("sequential", ExecMode::Sequential)];

fn check_suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("check");
    g.sample_size(10);
    for (name, mode) in MODES {
        let cfg = RunConfig {
            samples: 5,
            mode,
            ..RunConfig::default()
        };
        g.bench_with_input(BenchmarkId::new("all-identities", name), &cfg, |b, cfg| b.iter(|| black_box(run(cfg).unwrap())));
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    // near the polydisc edge the weight is sharply peaked, so refinement goes deep
    let p = AwParams::real(0.95, 0.9, -0.9, 0.5, 0.9).unwrap();
    let mut g = c.benchmark_group("aw-weight-integral");
    for (name, mode) in MODES {
        let opts = QuadOptions {
            target: 1e-13,
            mode,
            ..QuadOptions::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| black_box(integrate_with(|t| aw_weight_complex(t, &p), opts).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, check_suite, quadrature);
criterion_main!(benches);
