use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pft_core::dynamics::{disorder_fidelities, fidelity_sweep};
use pft_core::fock::basis::{FockModel, ModeIndex, Statistics};
use pft_core::fock::state::PolynomialFunction;
use pft_core::fock::transfer::best_transfer_fidelity;
use pft_core::{mirror_site, CouplingProfile, ExecMode, LatticeDims};

const MODES: [(&str, ExecMode); 2] = [
    ("sequential", ExecMode::Sequential),
    ("parallel", ExecMode::Parallel),
];

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("fidelity_sweep_40x40x40");
    let dims = LatticeDims::new(&[40, 40, 40]).unwrap();
    let src = dims.origin();
    let tgt = mirror_site(&src, &dims).unwrap();
    let grid: Vec<f64> = (1..=512).map(|k| k as f64 * 2.0 * PI / 512.0).collect();
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| fidelity_sweep(&dims, &[1.0; 3], &src, &tgt, black_box(&grid), mode).unwrap())
        });
    }
    group.finish();
}

fn disorder(c: &mut Criterion) {
    let mut group = c.benchmark_group("disorder_8x8_256_samples");
    let dims = LatticeDims::new(&[8, 8]).unwrap();
    let seeds: Vec<u64> = (0..256).collect();
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                disorder_fidelities(
                    &dims,
                    &[1.0, 1.0],
                    &dims.origin(),
                    black_box(0.01),
                    &seeds,
                    mode,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn best_time(c: &mut Criterion) {
    let mut group = c.benchmark_group("uniform_best_time_3x3_n2");
    group.sample_size(20);
    let model =
        FockModel::new(LatticeDims::new(&[3, 3]).unwrap(), Statistics::Boson, false).unwrap();
    let profiles = [
        CouplingProfile::uniform(0, 3, 1.0).unwrap(),
        CouplingProfile::uniform(1, 3, 1.0).unwrap(),
    ];
    let corner = ModeIndex::spinless(&[1, 1]);
    let f = PolynomialFunction::linear(&corner).product(&PolynomialFunction::linear(&corner));
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                best_transfer_fidelity(&model, &profiles, &f, 2.0 * PI, black_box(256), mode)
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, disorder, best_time);
criterion_main!(benches);
