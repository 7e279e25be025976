//! Multi-magnon pure states of the periodic ferromagnetic Heisenberg chain.
//!
//! An `m`-magnon state lives on the `C(N, m)` configurations with `m` spins
//! up. Its amplitude on a configuration `l` is the permanent of the phase
//! matrix `[exp(i k_a l_b)]`, normalized over all configurations.
//!
//! The full `2^N` embedding and [`apply_hamiltonian`] exist to check the
//! compact representation against the Hamiltonian directly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::combinat::{binomial_u64, enumerate_combinations, rank_combination, SiteList};
use crate::error::{Error, Result};

/// Largest magnon count accepted by [`amplitude_f`].
pub const MAX_PERMANENT_ORDER: usize = 20;

/// Orders up to this use explicit permutation enumeration.
pub const DIRECT_PERMANENT_MAX: usize = 6;

/// Memory caps for state construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Cap on `C(N, m)` amplitudes (and on reduced-block sizes).
    pub max_amplitudes: u64,
    /// Largest chain embedded into the full `2^N` space.
    pub max_full_sites: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_amplitudes: 10_000_000,
            max_full_sites: 14,
        }
    }
}

impl Budget {
    pub(crate) fn check_amplitudes(&self, n: usize, m: usize) -> Result<usize> {
        let count = binomial_u64(n as u64, m as u64)
            .filter(|&c| c <= self.max_amplitudes)
            .ok_or_else(|| {
                Error::infeasible(format!(
                    "C({n}, {m}) amplitudes exceed the budget of {}",
                    self.max_amplitudes
                ))
            })?;
        Ok(count as usize)
    }

    pub(crate) fn check_full(&self, n: usize) -> Result<()> {
        if n > self.max_full_sites || n > 30 {
            return Err(Error::infeasible(format!(
                "2^{n} full-space vector exceeds the budget of 2^{}",
                self.max_full_sites
            )));
        }
        Ok(())
    }
}

/// Magnon energy `8 J sin^2(k / 2)` above the all-down ground state.
pub fn dispersion(coupling: f64, k: f64) -> f64 {
    let s = (0.5 * k).sin();
    8.0 * coupling * s * s
}

/// Allowed wavenumbers `2 pi n / N`, `n = 0..N`.
pub fn momentum_grid(chain: usize) -> Vec<f64> {
    (0..chain).map(|n| grid_value(n, chain)).collect()
}

fn grid_value(index: usize, chain: usize) -> f64 {
    2.0 * PI * index as f64 / chain as f64
}

/// Quantized momenta of an `m`-magnon state, stored as grid indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentumVector {
    chain: usize,
    indices: Vec<usize>,
}

impl MomentumVector {
    pub fn new(chain: usize, indices: Vec<usize>) -> Result<Self> {
        if chain == 0 {
            return Err(Error::domain("chain length must be positive"));
        }
        if let Some(&bad) = indices.iter().find(|&&n| n >= chain) {
            return Err(Error::domain(format!(
                "momentum index {bad} is off the grid 0..{chain}"
            )));
        }
        Ok(MomentumVector { chain, indices })
    }

    /// `m` copies of the same grid index.
    pub fn single_mode(chain: usize, index: usize, m: usize) -> Result<Self> {
        Self::new(chain, vec![index; m])
    }

    pub fn chain(&self) -> usize {
        self.chain
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.indices.iter().map(|&n| grid_value(n, self.chain)).collect()
    }

    /// The common index when every magnon shares one mode.
    pub fn single_mode_index(&self) -> Option<usize> {
        let first = *self.indices.first()?;
        self.indices.iter().all(|&n| n == first).then_some(first)
    }
}

/// Parameters of an `m`-magnon state.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnonStateSpec {
    chain: usize,
    momentum: MomentumVector,
    coupling: f64,
}

impl MagnonStateSpec {
    pub fn new(momentum: MomentumVector, coupling: f64) -> Result<Self> {
        let chain = momentum.chain();
        let m = momentum.len();
        if m == 0 || m > chain {
            return Err(Error::domain(format!("magnon count {m} must lie in [1, {chain}]")));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::domain(format!("coupling J = {coupling} must be positive")));
        }
        Ok(MagnonStateSpec {
            chain,
            momentum,
            coupling,
        })
    }

    pub fn chain(&self) -> usize {
        self.chain
    }

    pub fn magnons(&self) -> usize {
        self.momentum.len()
    }

    pub fn momentum(&self) -> &MomentumVector {
        &self.momentum
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `-J N + sum_j eps(k_j)`: exact for one magnon, approximate when dilute.
    pub fn dilute_energy(&self) -> f64 {
        let ground = -self.coupling * self.chain as f64;
        ground
            + self
                .momentum
                .values()
                .iter()
                .map(|&k| dispersion(self.coupling, k))
                .sum::<f64>()
    }
}

/// Where an [`AmplitudeTable`] came from.
#[derive(Debug, Clone, PartialEq)]
pub enum StateOrigin {
    Magnon(MagnonStateSpec),
    /// `q` magnons sharing wavenumber `k` on an `n`-site block.
    SingleMode {
        wavenumber: f64,
    },
    /// Tensor product of two tables.
    Product,
}

/// Normalized amplitudes over `C(N, m)`, in lexicographic site-list order.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    chain: usize,
    magnons: usize,
    origin: StateOrigin,
    amplitudes: Vec<Complex64>,
    normalization: f64,
}

impl AmplitudeTable {
    pub fn chain(&self) -> usize {
        self.chain
    }

    pub fn magnons(&self) -> usize {
        self.magnons
    }

    pub fn origin(&self) -> &StateOrigin {
        &self.origin
    }

    pub fn spec(&self) -> Option<&MagnonStateSpec> {
        match &self.origin {
            StateOrigin::Magnon(spec) => Some(spec),
            _ => None,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The factor `G` multiplying the raw amplitudes.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn basis(&self) -> Vec<SiteList> {
        enumerate_combinations(self.chain, self.magnons).expect("table dimensions are valid")
    }

    pub fn amplitude_of(&self, l: &SiteList) -> Result<Complex64> {
        if l.len() != self.magnons {
            return Err(Error::domain(format!(
                "{l} has {} sites, state has {} magnons",
                l.len(),
                self.magnons
            )));
        }
        let r = rank_combination(l, self.chain)?;
        Ok(self.amplitudes[r as usize])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product with `other` placed on sites `N1 + 1 ..= N1 + N2`.
    pub fn tensor(&self, other: &AmplitudeTable) -> Result<AmplitudeTable> {
        self.tensor_with(other, &Budget::default())
    }

    pub fn tensor_with(&self, other: &AmplitudeTable, budget: &Budget) -> Result<AmplitudeTable> {
        let chain = self.chain + other.chain;
        let magnons = self.magnons + other.magnons;
        let dim = budget.check_amplitudes(chain, magnons)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for (left, a) in self.basis().iter().zip(&self.amplitudes) {
            for (right, b) in other.basis().iter().zip(&other.amplitudes) {
                let sites: Vec<usize> = left
                    .sites()
                    .iter()
                    .copied()
                    .chain(right.sites().iter().map(|s| s + self.chain))
                    .collect();
                let r = rank_combination(&SiteList::from_sorted_unchecked(sites), chain)?;
                amplitudes[r as usize] = a * b;
            }
        }
        Ok(AmplitudeTable {
            chain,
            magnons,
            origin: StateOrigin::Product,
            amplitudes,
            normalization: self.normalization * other.normalization,
        })
    }
}

fn roots_of_unity(chain: usize) -> Vec<Complex64> {
    (0..chain)
        .map(|r| Complex64::from_polar(1.0, grid_value(r, chain)))
        .collect()
}

/// Row-major `m x m` matrix `A[a][b] = exp(i k_a l_b)`, taken from the exact
/// root-of-unity table so that equal phases are bitwise equal.
fn phase_matrix(k: &MomentumVector, l: &SiteList, roots: &[Complex64]) -> Vec<Complex64> {
    let chain = k.chain();
    let mut out = Vec::with_capacity(k.len() * l.len());
    for &n in k.indices() {
        for &site in l.sites() {
            out.push(roots[(n * site) % chain]);
        }
    }
    out
}

/// Permanent by explicit enumeration of `S_m` (Heap's algorithm).
pub fn permanent_direct(matrix: &[Complex64], m: usize) -> Complex64 {
    assert_eq!(matrix.len(), m * m, "permanent_direct: matrix is not {m}x{m}");
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let term = |perm: &[usize]| -> Complex64 {
        perm.iter()
            .enumerate()
            .map(|(col, &row)| matrix[row * m + col])
            .product()
    };
    let mut perm: Vec<usize> = (0..m).collect();
    let mut counters = vec![0usize; m];
    let mut acc = term(&perm);
    let mut i = 1;
    while i < m {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            acc += term(&perm);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    acc
}

/// Permanent by Ryser's inclusion-exclusion formula, visiting column subsets
/// in Gray-code order so each step updates the row sums by one column.
pub fn permanent_ryser(matrix: &[Complex64], m: usize) -> Complex64 {
    assert_eq!(matrix.len(), m * m, "permanent_ryser: matrix is not {m}x{m}");
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    assert!(m < 64, "permanent_ryser: order {m} too large");
    let mut row_sums = vec![Complex64::new(0.0, 0.0); m];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << m) {
        let col = step.trailing_zeros() as usize;
        gray ^= 1 << col;
        let sign = if gray >> col & 1 == 1 { 1.0 } else { -1.0 };
        for (row, sum) in row_sums.iter_mut().enumerate() {
            *sum += sign * matrix[row * m + col];
        }
        let prod: Complex64 = row_sums.iter().product();
        // (-1)^(m - |S|)
        if (m - gray.count_ones() as usize) % 2 == 0 {
            acc += prod;
        } else {
            acc -= prod;
        }
    }
    acc
}

fn permanent(matrix: &[Complex64], m: usize) -> Complex64 {
    if m <= DIRECT_PERMANENT_MAX {
        permanent_direct(matrix, m)
    } else {
        permanent_ryser(matrix, m)
    }
}

/// `f_kl = sum over permutations pi of exp(i k_pi . l)`.
pub fn amplitude_f(k: &MomentumVector, l: &SiteList) -> Result<Complex64> {
    check_order(k, l)?;
    Ok(amplitude_f_with_roots(k, l, &roots_of_unity(k.chain())))
}

fn check_order(k: &MomentumVector, l: &SiteList) -> Result<()> {
    if k.len() != l.len() {
        return Err(Error::domain(format!(
            "{} momenta but {} occupied sites",
            k.len(),
            l.len()
        )));
    }
    if k.len() > MAX_PERMANENT_ORDER {
        return Err(Error::infeasible(format!(
            "permanent of order {} exceeds the limit {MAX_PERMANENT_ORDER}",
            k.len()
        )));
    }
    if l.sites().last().is_some_and(|&s| s > k.chain()) {
        return Err(Error::domain(format!("{l} does not fit a chain of {}", k.chain())));
    }
    Ok(())
}

fn amplitude_f_with_roots(k: &MomentumVector, l: &SiteList, roots: &[Complex64]) -> Complex64 {
    permanent(&phase_matrix(k, l, roots), k.len())
}

fn raw_amplitudes(k: &MomentumVector, budget: &Budget) -> Result<(Vec<Complex64>, f64)> {
    let chain = k.chain();
    let m = k.len();
    if m > chain {
        return Err(Error::domain(format!("{m} magnons on {chain} sites")));
    }
    if m > MAX_PERMANENT_ORDER {
        return Err(Error::infeasible(format!(
            "permanent of order {m} exceeds the limit {MAX_PERMANENT_ORDER}"
        )));
    }
    budget.check_amplitudes(chain, m)?;
    let roots = roots_of_unity(chain);
    let basis = enumerate_combinations(chain, m)?;
    let raw: Vec<Complex64> = basis.par_iter().map(|l| amplitude_f_with_roots(k, l, &roots)).collect();
    let norm_sq: f64 = raw.iter().map(|f| f.norm_sqr()).sum();
    if norm_sq < 1e-20 {
        return Err(Error::NullState { norm_sq });
    }
    Ok((raw, norm_sq))
}

/// `G = (sum_l |f_kl|^2)^(-1/2)` over all `C(N, m)` configurations.
pub fn normalization(k: &MomentumVector) -> Result<f64> {
    let (_, norm_sq) = raw_amplitudes(k, &Budget::default())?;
    Ok(norm_sq.sqrt().recip())
}

pub fn build_state(spec: &MagnonStateSpec) -> Result<AmplitudeTable> {
    build_state_with(spec, &Budget::default())
}

/// Normalized state with amplitude `G f_kl` on each configuration `l`.
pub fn build_state_with(spec: &MagnonStateSpec, budget: &Budget) -> Result<AmplitudeTable> {
    let (raw, norm_sq) = raw_amplitudes(spec.momentum(), budget)?;
    let g = norm_sq.sqrt().recip();
    Ok(AmplitudeTable {
        chain: spec.chain(),
        magnons: spec.magnons(),
        origin: StateOrigin::Magnon(spec.clone()),
        amplitudes: raw.into_iter().map(|f| f * g).collect(),
        normalization: g,
    })
}

/// `q` magnons in mode `k` on `n` sites: `exp(i k sum(l)) / sqrt(C(n, q))`.
///
/// `k` is any real wavenumber; for a subsystem of a larger chain it is the
/// parent chain's mode.
pub fn single_mode_state(n: usize, q: usize, k: f64) -> Result<AmplitudeTable> {
    single_mode_state_with(n, q, k, &Budget::default())
}

pub fn single_mode_state_with(n: usize, q: usize, k: f64, budget: &Budget) -> Result<AmplitudeTable> {
    if q > n {
        return Err(Error::domain(format!("{q} magnons on {n} sites")));
    }
    let dim = budget.check_amplitudes(n, q)?;
    let g = (dim as f64).sqrt().recip();
    let amplitudes = enumerate_combinations(n, q)?
        .iter()
        .map(|l| Complex64::from_polar(g, k * l.sum() as f64))
        .collect();
    Ok(AmplitudeTable {
        chain: n,
        magnons: q,
        origin: StateOrigin::SingleMode { wavenumber: k },
        amplitudes,
        normalization: g,
    })
}

/// A vector in the full `2^N` spin space; bit `l - 1` set means site `l` is up.
#[derive(Debug, Clone, PartialEq)]
pub struct FullStateVector {
    chain: usize,
    magnons: Option<usize>,
    entries: Vec<Complex64>,
}

impl FullStateVector {
    /// Wraps arbitrary entries; `entries.len()` must equal `2^chain`.
    pub fn new(chain: usize, entries: Vec<Complex64>) -> Result<Self> {
        if chain >= usize::BITS as usize || entries.len() != 1usize << chain {
            return Err(Error::domain(format!(
                "{} entries do not match a chain of {chain} sites",
                entries.len()
            )));
        }
        Ok(FullStateVector {
            chain,
            magnons: None,
            entries,
        })
    }

    /// The fully polarized `|down ... down>` state.
    pub fn all_down(chain: usize) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); 1 << chain];
        entries[0] = Complex64::new(1.0, 0.0);
        Ok(FullStateVector {
            chain,
            magnons: Some(0),
            entries,
        })
    }

    pub fn chain(&self) -> usize {
        self.chain
    }

    /// Magnon number, known when built from an [`AmplitudeTable`].
    pub fn magnons(&self) -> Option<usize> {
        self.magnons
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FullStateVector) -> Complex64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|| self - scale * other ||`.
    pub fn distance_scaled(&self, other: &FullStateVector, scale: f64) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b * scale).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn embed_full(state: &AmplitudeTable) -> Result<FullStateVector> {
    embed_full_with(state, &Budget::default())
}

pub fn embed_full_with(state: &AmplitudeTable, budget: &Budget) -> Result<FullStateVector> {
    budget.check_full(state.chain)?;
    let mut entries = vec![Complex64::new(0.0, 0.0); 1 << state.chain];
    for (l, a) in state.basis().iter().zip(&state.amplitudes) {
        entries[l.to_bitmask() as usize] = *a;
    }
    Ok(FullStateVector {
        chain: state.chain,
        magnons: Some(state.magnons),
        entries,
    })
}

pub fn apply_hamiltonian(v: &FullStateVector, coupling: f64) -> Result<FullStateVector> {
    apply_hamiltonian_with(v, coupling, &Budget::default())
}

/// `H v` for `H = -J sum_l sigma_l . sigma_{l+1}` with periodic closure,
/// using `sigma_a . sigma_b = 2 SWAP(a, b) - 1`.
pub fn apply_hamiltonian_with(v: &FullStateVector, coupling: f64, budget: &Budget) -> Result<FullStateVector> {
    let chain = v.chain;
    budget.check_full(chain)?;
    if chain < 2 {
        return Err(Error::domain("the Hamiltonian needs at least two sites"));
    }
    let bonds: Vec<(usize, usize)> = (0..chain).map(|l| (l, (l + 1) % chain)).collect();
    let entries = (0..v.entries.len())
        .into_par_iter()
        .map(|mask| {
            let here = v.entries[mask];
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, b) in &bonds {
                if (mask >> a & 1) == (mask >> b & 1) {
                    acc += here;
                } else {
                    let swapped = mask ^ (1 << a) ^ (1 << b);
                    acc += 2.0 * v.entries[swapped] - here;
                }
            }
            -coupling * acc
        })
        .collect();
    Ok(FullStateVector {
        chain,
        magnons: v.magnons,
        entries,
    })
}

/// `|| H v - E v ||`.
pub fn eigen_residual(v: &FullStateVector, coupling: f64, energy: f64) -> Result<f64> {
    let hv = apply_hamiltonian(v, coupling)?;
    Ok(hv.distance_scaled(v, energy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion(1.0, 0.0), 0.0);
        assert!((dispersion(1.0, PI) - 8.0).abs() < 1e-14);
        assert!((dispersion(1.0, 2.0 * PI / 3.0) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn momentum_grid_examples() {
        let g = momentum_grid(2);
        assert_eq!(g, vec![0.0, PI]);
        let g = momentum_grid(4);
        for (a, b) in g.iter().zip([0.0, PI / 2.0, PI, 1.5 * PI]) {
            assert!((a - b).abs() < 1e-15);
        }
        for n in 1..20 {
            assert!(momentum_grid(n).iter().all(|&k| (0.0..2.0 * PI).contains(&k)));
        }
    }

    #[test]
    fn momentum_vector_rejects_off_grid() {
        assert!(MomentumVector::new(4, vec![4]).is_err());
        assert!(MomentumVector::new(0, vec![]).is_err());
        let k = MomentumVector::new(6, vec![1, 5]).unwrap();
        let v = k.values();
        assert!((v[1] - 2.0 * PI * 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(k.single_mode_index(), None);
        assert_eq!(
            MomentumVector::single_mode(6, 2, 3).unwrap().single_mode_index(),
            Some(2)
        );
    }

    #[test]
    fn spec_validation() {
        let k = MomentumVector::new(4, vec![]).unwrap();
        assert!(MagnonStateSpec::new(k, 1.0).is_err());
        let k = MomentumVector::new(4, vec![1]).unwrap();
        assert!(MagnonStateSpec::new(k.clone(), 0.0).is_err());
        assert!(MagnonStateSpec::new(k, -1.0).is_err());
    }

    #[test]
    fn f_single_magnon() {
        let k = MomentumVector::new(7, vec![3]).unwrap();
        for site in 1..=7 {
            let l = SiteList::new(vec![site], 7).unwrap();
            let expected = Complex64::from_polar(1.0, 2.0 * PI * 3.0 / 7.0 * site as f64);
            assert!(close(amplitude_f(&k, &l).unwrap(), expected, 1e-14));
        }
    }

    #[test]
    fn f_clashing_pair_cancels() {
        // e^{i(0*1 + pi*2)} + e^{i(0*2 + pi*1)} = 1 - 1
        let k = MomentumVector::new(4, vec![0, 2]).unwrap();
        let l = SiteList::new(vec![1, 2], 4).unwrap();
        assert!(amplitude_f(&k, &l).unwrap().norm() < 1e-15);
    }

    #[test]
    fn f_single_mode_closed_form() {
        // f = m! e^{i k0 sum(l)}
        let k = MomentumVector::single_mode(9, 2, 4).unwrap();
        let k0 = 2.0 * PI * 2.0 / 9.0;
        for l in enumerate_combinations(9, 4).unwrap() {
            let expected = Complex64::from_polar(24.0, k0 * l.sum() as f64);
            assert!(close(amplitude_f(&k, &l).unwrap(), expected, 1e-12));
        }
    }

    #[test]
    fn f_errors() {
        let k = MomentumVector::new(30, vec![1; 21]).unwrap();
        let l = SiteList::prefix(21);
        assert!(matches!(amplitude_f(&k, &l), Err(Error::Infeasible(_))));
        let k = MomentumVector::new(5, vec![1, 2]).unwrap();
        assert!(matches!(amplitude_f(&k, &SiteList::prefix(3)), Err(Error::Domain(_))));
    }

    #[test]
    fn ryser_matches_direct_on_small_matrices() {
        let k = MomentumVector::new(11, vec![1, 4, 4, 7, 9, 10]).unwrap();
        let roots = roots_of_unity(11);
        for l in enumerate_combinations(11, 6).unwrap().iter().step_by(17) {
            let a = phase_matrix(&k, l, &roots);
            let d = permanent_direct(&a, 6);
            let r = permanent_ryser(&a, 6);
            assert!((d - r).norm() <= 1e-10 * d.norm().max(1.0), "{d} vs {r}");
        }
    }

    #[test]
    fn permanent_of_all_ones_is_factorial() {
        for m in 0..=8 {
            let ones = vec![Complex64::new(1.0, 0.0); m * m];
            let fact: f64 = (1..=m).map(|i| i as f64).product();
            assert!((permanent_ryser(&ones, m).re - fact).abs() < 1e-9);
            if m <= 7 {
                assert!((permanent_direct(&ones, m).re - fact).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let k = MomentumVector::new(9, vec![4]).unwrap();
        assert!((normalization(&k).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        // single mode: G = 1 / (m! sqrt(C(N, m)))
        let k = MomentumVector::single_mode(8, 3, 3).unwrap();
        let expected = 1.0 / (6.0 * 56f64.sqrt());
        assert!((normalization(&k).unwrap() - expected).abs() < 1e-15);

        // Direct summation of |f|^2 over C(4,2) for k = {0, pi}:
        // f({1,2}) = 0, f({1,3}) = -2, f({1,4}) = 0, f({2,3}) = 0, f({2,4}) = 2, f({3,4}) = 0.
        let k = MomentumVector::new(4, vec![0, 2]).unwrap();
        assert!((normalization(&k).unwrap() - 1.0 / 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn build_state_examples() {
        let spec = MagnonStateSpec::new(MomentumVector::new(2, vec![0]).unwrap(), 1.0).unwrap();
        let s = build_state(&spec).unwrap();
        assert_eq!(s.len(), 2);
        for a in s.amplitudes() {
            assert!(close(*a, Complex64::new(FRAC_1_SQRT_2, 0.0), 1e-15));
        }

        let spec = MagnonStateSpec::new(MomentumVector::single_mode(4, 1, 2).unwrap(), 1.0).unwrap();
        let s = build_state(&spec).unwrap();
        assert_eq!(s.len(), 6);
        for a in s.amplitudes() {
            assert!((a.norm() - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn build_state_respects_budget() {
        let spec = MagnonStateSpec::new(MomentumVector::single_mode(20, 1, 10).unwrap(), 1.0).unwrap();
        let tight = Budget {
            max_amplitudes: 1000,
            ..Budget::default()
        };
        assert!(matches!(build_state_with(&spec, &tight), Err(Error::Infeasible(_))));
    }

    #[test]
    fn single_mode_examples() {
        let s = single_mode_state(5, 0, 1.3).unwrap();
        assert_eq!(s.amplitudes(), &[Complex64::new(1.0, 0.0)]);
        let s = single_mode_state(4, 2, 0.0).unwrap();
        assert_eq!(s.len(), 6);
        for a in s.amplitudes() {
            assert!(close(*a, Complex64::new(1.0 / 6f64.sqrt(), 0.0), 1e-15));
        }
        assert!(single_mode_state(3, 4, 0.0).is_err());
    }

    #[test]
    fn embed_examples() {
        let spec = MagnonStateSpec::new(MomentumVector::new(2, vec![0]).unwrap(), 1.0).unwrap();
        let v = embed_full(&build_state(&spec).unwrap()).unwrap();
        let e = v.entries();
        assert_eq!(e[0], Complex64::new(0.0, 0.0));
        assert_eq!(e[3], Complex64::new(0.0, 0.0));
        assert!((e[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((e[2].re - FRAC_1_SQRT_2).abs() < 1e-15);

        let spec = MagnonStateSpec::new(MomentumVector::new(9, vec![1, 5, 7]).unwrap(), 1.0).unwrap();
        let v = embed_full(&build_state(&spec).unwrap()).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        for (mask, a) in v.entries().iter().enumerate() {
            if a.norm() > 0.0 {
                assert_eq!(mask.count_ones(), 3);
            }
        }
        let spec = MagnonStateSpec::new(MomentumVector::new(15, vec![1]).unwrap(), 1.0).unwrap();
        assert!(matches!(
            embed_full(&build_state(&spec).unwrap()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn ground_state_energy() {
        for n in 2..=10 {
            let v = FullStateVector::all_down(n).unwrap();
            assert!(eigen_residual(&v, 1.5, -1.5 * n as f64).unwrap() < 1e-12);
        }
    }

    #[test]
    fn one_magnon_eigenvalue_small_chain() {
        let spec = MagnonStateSpec::new(MomentumVector::new(6, vec![2]).unwrap(), 0.7).unwrap();
        let v = embed_full(&build_state(&spec).unwrap()).unwrap();
        let e = spec.dilute_energy();
        assert!((e - (-0.7 * 6.0 + 8.0 * 0.7 * (PI / 3.0).sin().powi(2))).abs() < 1e-14);
        assert!(eigen_residual(&v, 0.7, e).unwrap() < 1e-12);
    }

    #[test]
    fn hamiltonian_needs_two_sites() {
        let v = FullStateVector::all_down(1).unwrap();
        assert!(matches!(apply_hamiltonian(&v, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tensor_multiplies_amplitudes() {
        let a = single_mode_state(3, 1, 0.4).unwrap();
        let b = single_mode_state(2, 1, 1.1).unwrap();
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.chain(), 5);
        assert_eq!(t.magnons(), 2);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-14);
        let l = SiteList::new(vec![2, 5], 5).unwrap();
        let expected = a.amplitudes()[1] * b.amplitudes()[1];
        assert!(close(t.amplitude_of(&l).unwrap(), expected, 1e-15));
        let l = SiteList::new(vec![1, 2], 5).unwrap();
        assert_eq!(t.amplitude_of(&l).unwrap(), Complex64::new(0.0, 0.0));
    }
}
