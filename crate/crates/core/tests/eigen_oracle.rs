//! Hermitian eigensolver against nalgebra's symmetric eigendecomposition.

use magnon_core::reduced_density::{eigenvalues_hermitian, eigh, reduce_single_mode};
use magnon_core::CMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn nalgebra_spectrum(m: &CMatrix) -> Vec<f64> {
    let dim = m.dim();
    let dense = DMatrix::from_fn(dim, dim, |i, j| m[(i, j)]);
    let mut values: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectra_agree(dim in 1usize..=40, seed in any::<u64>()) {
        let m = random_hermitian(dim, seed);
        let ours = eigenvalues_hermitian(&m).unwrap();
        let theirs = nalgebra_spectrum(&m);
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal_and_solve(dim in 1usize..=24, seed in any::<u64>()) {
        let m = random_hermitian(dim, seed);
        let e = eigh(&m).unwrap();
        for j in 0..dim {
            let v = e.vectors.column(j);
            let mv = m.mul_vec(&v);
            let residual: f64 = mv.iter().zip(&v).map(|(a, b)| (a - e.values[j] * b).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(residual < 1e-10);
            for k in 0..=j {
                let w = e.vectors.column(k);
                let dot: Complex64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                let expected = if j == k { 1.0 } else { 0.0 };
                prop_assert!((dot - expected).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn reduced_blocks_match_nalgebra() {
    for (chain, n, m, k) in [(10, 5, 3, 0.7), (12, 6, 4, 2.0), (9, 9, 3, 1.1)] {
        let rho = reduce_single_mode(chain, n, m, k).unwrap();
        for b in rho.blocks() {
            let ours = eigenvalues_hermitian(b.matrix()).unwrap();
            let theirs = nalgebra_spectrum(b.matrix());
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-12, "({chain},{n},{m}) q={}: {x} vs {y}", b.q());
            }
        }
    }
}
