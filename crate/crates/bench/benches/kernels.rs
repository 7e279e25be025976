use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use magnon_core::coherence::report;
use magnon_core::magnon_state::{build_state, permanent_direct, permanent_ryser};
use magnon_core::reduced_density::{eigh, reduce, reduce_single_mode};
use magnon_core::thermo::sweep;
use magnon_core::{GridSpec, GridVariable, MagnonStateSpec, MomentumVector, SubsystemSpec};
use num_complex::Complex64;

fn phase_matrix(m: usize) -> Vec<Complex64> {
    (0..m * m)
        .map(|i| Complex64::from_polar(1.0, 0.37 * i as f64))
        .collect()
}

fn spec(chain: usize, indices: Vec<usize>) -> MagnonStateSpec {
    MagnonStateSpec::new(MomentumVector::new(chain, indices).unwrap(), 1.0).unwrap()
}

fn permanents(c: &mut Criterion) {
    let mut g = c.benchmark_group("permanent");
    for m in [3, 5, 6] {
        let a = phase_matrix(m);
        g.bench_with_input(BenchmarkId::new("direct", m), &a, |b, a| {
            b.iter(|| permanent_direct(black_box(a), m))
        });
        g.bench_with_input(BenchmarkId::new("ryser", m), &a, |b, a| {
            b.iter(|| permanent_ryser(black_box(a), m))
        });
    }
    g.finish();
}

fn states(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_state");
    for (chain, k) in [(12, vec![1, 3]), (12, vec![1, 2, 5]), (14, vec![1, 2, 4, 6])] {
        let s = spec(chain, k);
        g.bench_function(BenchmarkId::new(format!("N{chain}"), s.magnons()), |b| {
            b.iter(|| build_state(black_box(&s)).unwrap())
        });
    }
    g.finish();
}

fn reductions(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduce");
    let state = build_state(&spec(14, vec![1, 2, 4])).unwrap();
    for n in [4, 7] {
        let sub = SubsystemSpec::prefix(14, n).unwrap();
        g.bench_with_input(BenchmarkId::new("partial_trace", n), &sub, |b, sub| {
            b.iter(|| reduce(black_box(&state), sub).unwrap())
        });
    }
    g.bench_function("single_mode_closed_form_N1000_n8", |b| {
        b.iter(|| reduce_single_mode(1000, black_box(8), 100, 0.3).unwrap())
    });
    g.finish();
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigh");
    let rho = reduce(
        &build_state(&spec(14, vec![1, 3, 6])).unwrap(),
        &SubsystemSpec::prefix(14, 9).unwrap(),
    )
    .unwrap();
    let block = rho.blocks().iter().max_by_key(|b| b.dim()).unwrap();
    g.bench_function(BenchmarkId::new("largest_block", block.dim()), |b| {
        b.iter(|| eigh(black_box(block.matrix())).unwrap())
    });
    g.bench_function("coherence_report", |b| b.iter(|| report(black_box(&rho)).unwrap()));
    g.finish();
}

fn thermo(c: &mut Criterion) {
    let grid = GridSpec {
        variable: GridVariable::Beta,
        start: -5.0,
        end: 5.0,
        samples: 10_001,
    };
    c.bench_function("thermo_sweep_10001", |b| {
        b.iter(|| sweep(black_box(grid), 1.0).unwrap())
    });
}

criterion_group!(benches, permanents, states, reductions, spectra, thermo);
criterion_main!(benches);
