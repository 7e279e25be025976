//! Reduced density operators of chain subsystems.
//!
//! Tracing out the complement of a subsystem never mixes sectors with a
//! different number of magnons inside the subsystem, so the result is
//! stored as one Hermitian block per admissible magnon count `q`.

mod hermitian;
mod oracle;

use rayon::prelude::*;

pub use hermitian::{
    eigenvalues_hermitian, eigh, CMatrix, HermitianEigen, CONVERGENCE_THRESHOLD, HERMITIAN_INPUT_TOLERANCE,
};
pub use oracle::{oracle_partial_trace, OracleReduction};

use crate::combinat::{
    admissible_q, binomial_u64, enumerate_combinations, hypergeometric_pmf_unchecked, rank_combination, SiteList,
};
use crate::error::{Error, Result};
use crate::magnon_state::{single_mode_state_with, AmplitudeTable, Budget};

/// Tolerance on `|tr(rho) - 1|`.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Tolerance on `|rho_ij - conj(rho_ji)|` within a block.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// The sites kept after tracing out the rest of an `N`-site chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemSpec {
    parent_chain: usize,
    sites: SiteList,
}

impl SubsystemSpec {
    pub fn new(parent_chain: usize, sites: Vec<usize>) -> Result<Self> {
        let sites = SiteList::new(sites, parent_chain)?;
        if sites.is_empty() {
            return Err(Error::domain("a subsystem needs at least one site"));
        }
        Ok(SubsystemSpec { parent_chain, sites })
    }

    /// Sites `1..=n`.
    pub fn prefix(parent_chain: usize, n: usize) -> Result<Self> {
        if n == 0 || n > parent_chain {
            return Err(Error::domain(format!(
                "subsystem size {n} must lie in [1, {parent_chain}]"
            )));
        }
        Ok(SubsystemSpec {
            parent_chain,
            sites: SiteList::prefix(n),
        })
    }

    pub fn parent_chain(&self) -> usize {
        self.parent_chain
    }

    pub fn sites(&self) -> &SiteList {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn complement_sites(&self) -> Vec<usize> {
        let inside = self.sites.sites();
        (1..=self.parent_chain)
            .filter(|s| inside.binary_search(s).is_err())
            .collect()
    }

    /// The traced-out sites as a subsystem of their own.
    pub fn complement(&self) -> Result<SubsystemSpec> {
        Self::new(self.parent_chain, self.complement_sites())
    }
}

/// One magnon-number sector of a reduced density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityBlock {
    q: usize,
    basis: Vec<SiteList>,
    matrix: CMatrix,
}

impl DensityBlock {
    /// `basis` must be the lexicographic `q`-subsets of the subsystem's local
    /// labels `1..=n`, matching `matrix` row for row.
    pub fn new(q: usize, basis: Vec<SiteList>, matrix: CMatrix) -> Result<Self> {
        if basis.len() != matrix.dim() {
            return Err(Error::domain(format!(
                "{} basis labels for a {}-dimensional block",
                basis.len(),
                matrix.dim()
            )));
        }
        if basis.iter().any(|l| l.len() != q) {
            return Err(Error::domain(format!(
                "basis labels of block q = {q} have the wrong size"
            )));
        }
        Ok(DensityBlock { q, basis, matrix })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Local site labels, `1..=n` inside the subsystem.
    pub fn basis(&self) -> &[SiteList] {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn weight(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// Density matrix of a subsystem, block diagonal in the local magnon number.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDensityMatrix {
    subsystem: SubsystemSpec,
    blocks: Vec<DensityBlock>,
}

impl BlockDensityMatrix {
    /// Assembles and validates a density matrix from its blocks.
    pub fn new(subsystem: SubsystemSpec, blocks: Vec<DensityBlock>) -> Result<Self> {
        let n = subsystem.len();
        for pair in blocks.windows(2) {
            if pair[0].q >= pair[1].q {
                return Err(Error::domain("blocks must be sorted by strictly increasing q"));
            }
        }
        for b in &blocks {
            if b.q > n || Some(b.dim() as u64) != binomial_u64(n as u64, b.q as u64) {
                return Err(Error::domain(format!(
                    "block q = {} has dimension {}, expected C({n}, {})",
                    b.q,
                    b.dim(),
                    b.q
                )));
            }
        }
        let rho = BlockDensityMatrix { subsystem, blocks };
        rho.validate()?;
        Ok(rho)
    }

    /// Hermitian blocks, unit trace, no eigenvalue below `-PSD_TOLERANCE`.
    pub fn validate(&self) -> Result<()> {
        for b in &self.blocks {
            let defect = b.matrix.hermiticity_defect();
            if defect > HERMITIAN_TOLERANCE {
                return Err(Error::internal(format!(
                    "block q = {} is not Hermitian (defect {defect:e})",
                    b.q
                )));
            }
            if !b.matrix.is_bounded_below(PSD_TOLERANCE) {
                return Err(Error::internal(format!(
                    "block q = {} has an eigenvalue below -{PSD_TOLERANCE:e}",
                    b.q
                )));
            }
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::internal(format!("trace is {trace}, not 1")));
        }
        Ok(())
    }

    pub fn subsystem(&self) -> &SubsystemSpec {
        &self.subsystem
    }

    pub fn blocks(&self) -> &[DensityBlock] {
        &self.blocks
    }

    pub fn block(&self, q: usize) -> Option<&DensityBlock> {
        self.blocks.iter().find(|b| b.q == q)
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(DensityBlock::weight).sum()
    }

    /// `(q, tr block_q)` for every stored block.
    pub fn block_weights(&self) -> Vec<(usize, f64)> {
        self.blocks.iter().map(|b| (b.q, b.weight())).collect()
    }

    /// Number of basis states spanned by the stored blocks.
    pub fn basis_dimension(&self) -> usize {
        self.blocks.iter().map(DensityBlock::dim).sum()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.matrix.as_slice())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Spectrum of every block, merged and sorted descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut all = Vec::with_capacity(self.basis_dimension());
        for b in &self.blocks {
            all.extend(eigenvalues_hermitian(&b.matrix)?);
        }
        all.sort_by(|a, b| b.total_cmp(a));
        Ok(all)
    }

    /// Largest entrywise difference; a block missing on one side counts as zero.
    pub fn max_abs_diff(&self, other: &BlockDensityMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            match other.block(b.q) {
                Some(o) if o.dim() == b.dim() => {
                    for (x, y) in b.matrix.as_slice().iter().zip(o.matrix.as_slice()) {
                        worst = worst.max((x - y).norm());
                    }
                }
                _ => worst = worst.max(b.matrix.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max)),
            }
        }
        for o in &other.blocks {
            if self.block(o.q).is_none() {
                worst = worst.max(o.matrix.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// `lambda * self + (1 - lambda) * other`; both must share one block layout.
    pub fn mix(&self, other: &BlockDensityMatrix, lambda: f64) -> Result<BlockDensityMatrix> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::domain(format!("mixing weight {lambda} outside [0, 1]")));
        }
        if self.subsystem.len() != other.subsystem.len()
            || self.blocks.iter().map(|b| b.q).ne(other.blocks.iter().map(|b| b.q))
        {
            return Err(Error::domain(
                "cannot mix density matrices with different block layouts",
            ));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| DensityBlock {
                q: a.q,
                basis: a.basis.clone(),
                matrix: a.matrix.scaled(lambda).add(&b.matrix.scaled(1.0 - lambda)),
            })
            .collect();
        BlockDensityMatrix::new(self.subsystem.clone(), blocks)
    }

    /// Same matrix with every off-diagonal element removed.
    pub(crate) fn diagonal_part(&self) -> BlockDensityMatrix {
        let blocks = self
            .blocks
            .iter()
            .map(|b| DensityBlock {
                q: b.q,
                basis: b.basis.clone(),
                matrix: CMatrix::from_fn(
                    b.dim(),
                    |i, j| {
                        if i == j {
                            b.matrix[(i, i)]
                        } else {
                            Default::default()
                        }
                    },
                ),
            })
            .collect();
        BlockDensityMatrix {
            subsystem: self.subsystem.clone(),
            blocks,
        }
    }

    pub(crate) fn from_parts_unchecked(subsystem: SubsystemSpec, blocks: Vec<DensityBlock>) -> Self {
        BlockDensityMatrix { subsystem, blocks }
    }
}

fn check_block_budget(n: usize, q: usize, budget: &Budget) -> Result<usize> {
    let dim = binomial_u64(n as u64, q as u64)
        .filter(|&d| d.saturating_mul(d) <= budget.max_amplitudes)
        .ok_or_else(|| {
            Error::infeasible(format!(
                "a C({n}, {q})-dimensional block exceeds the budget of {} entries",
                budget.max_amplitudes
            ))
        })?;
    Ok(dim as usize)
}

pub fn reduce(state: &AmplitudeTable, sub: &SubsystemSpec) -> Result<BlockDensityMatrix> {
    reduce_with(state, sub, &Budget::default())
}

/// Partial trace over the complement of `sub`:
/// `rho_A[q](l_A, l_A') = sum over l_B of psi(l_A + l_B) conj(psi(l_A' + l_B))`.
pub fn reduce_with(state: &AmplitudeTable, sub: &SubsystemSpec, budget: &Budget) -> Result<BlockDensityMatrix> {
    let chain = state.chain();
    if sub.parent_chain() != chain {
        return Err(Error::domain(format!(
            "subsystem of a {}-site chain applied to a {chain}-site state",
            sub.parent_chain()
        )));
    }
    let m = state.magnons();
    let n = sub.len();
    let range = admissible_q(chain, n, m)?;
    for q in range.iter() {
        check_block_budget(n, q, budget)?;
    }
    let inside = sub.sites().sites();
    let outside = sub.complement_sites();
    let amplitudes = state.amplitudes();

    let blocks = range
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|q| -> Result<DensityBlock> {
            let local = enumerate_combinations(n, q)?;
            let env = enumerate_combinations(chain - n, m - q)?;
            // psi[a][b]: amplitude of local config a joined with environment config b.
            let mut psi = Vec::with_capacity(local.len() * env.len());
            let mut merged = Vec::with_capacity(m);
            for a in &local {
                for b in &env {
                    merged.clear();
                    merged.extend(a.sites().iter().map(|&i| inside[i - 1]));
                    merged.extend(b.sites().iter().map(|&i| outside[i - 1]));
                    merged.sort_unstable();
                    let r = rank_combination(&SiteList::from_sorted_unchecked(merged.clone()), chain)?;
                    psi.push(amplitudes[r as usize]);
                }
            }
            let width = env.len();
            let dim = local.len();
            let mut matrix = CMatrix::zeros(dim);
            for i in 0..dim {
                let row_i = &psi[i * width..(i + 1) * width];
                for j in i..dim {
                    let row_j = &psi[j * width..(j + 1) * width];
                    let z: num_complex::Complex64 = row_i.iter().zip(row_j).map(|(x, y)| x * y.conj()).sum();
                    matrix[(i, j)] = z;
                    matrix[(j, i)] = z.conj();
                }
                matrix[(i, i)].im = 0.0;
            }
            Ok(DensityBlock {
                q,
                basis: local,
                matrix,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rho = BlockDensityMatrix::from_parts_unchecked(sub.clone(), blocks);
    rho.validate()?;
    Ok(rho)
}

pub fn reduce_single_mode(chain: usize, n: usize, m: usize, k: f64) -> Result<BlockDensityMatrix> {
    reduce_single_mode_with(chain, n, m, k, &Budget::default())
}

/// Closed form for `m` magnons sharing wavenumber `k`, reduced to the prefix
/// `{1..n}`: `sum_q p(q) |psi_nqk><psi_nqk|` with hypergeometric `p(q)`.
pub fn reduce_single_mode_with(
    chain: usize,
    n: usize,
    m: usize,
    k: f64,
    budget: &Budget,
) -> Result<BlockDensityMatrix> {
    let range = admissible_q(chain, n, m)?;
    let sub = SubsystemSpec::prefix(chain, n)?;
    let mut blocks = Vec::new();
    for q in range.iter() {
        check_block_budget(n, q, budget)?;
        let p = hypergeometric_pmf_unchecked(chain, n, m, q);
        let psi = single_mode_state_with(n, q, k, budget)?;
        let mut matrix = CMatrix::outer(psi.amplitudes(), p);
        for i in 0..matrix.dim() {
            matrix[(i, i)].im = 0.0;
        }
        blocks.push(DensityBlock {
            q,
            basis: psi.basis(),
            matrix,
        });
    }
    let rho = BlockDensityMatrix::from_parts_unchecked(sub, blocks);
    rho.validate()?;
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::hypergeometric_pmf;
    use crate::magnon_state::{build_state, embed_full, MagnonStateSpec, MomentumVector};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn state(chain: usize, k: Vec<usize>) -> AmplitudeTable {
        build_state(&MagnonStateSpec::new(MomentumVector::new(chain, k).unwrap(), 1.0).unwrap()).unwrap()
    }

    #[test]
    fn single_site_reduction_is_diagonal() {
        for (chain, k) in [(5, vec![1, 3]), (7, vec![2, 2, 5]), (4, vec![1])] {
            let s = state(chain, k);
            for site in 1..=chain {
                let rho = reduce(&s, &SubsystemSpec::new(chain, vec![site]).unwrap()).unwrap();
                assert!(rho.blocks().iter().all(|b| b.dim() == 1));
                assert!((rho.trace() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_chain_reduction_is_the_projector() {
        let s = state(6, vec![1, 4]);
        let rho = reduce(&s, &SubsystemSpec::prefix(6, 6).unwrap()).unwrap();
        assert_eq!(rho.blocks().len(), 1);
        let expected = CMatrix::outer(s.amplitudes(), 1.0);
        let b = rho.block(2).unwrap();
        for (x, y) in b.matrix().as_slice().iter().zip(expected.as_slice()) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_reduction_matches_oracle() {
        let s = state(8, vec![1, 3]);
        let sub = SubsystemSpec::prefix(8, 3).unwrap();
        let rho = reduce(&s, &sub).unwrap();
        let oracle = oracle_partial_trace(&embed_full(&s).unwrap(), &sub).unwrap();
        assert!(rho.max_abs_diff(&oracle.matrix) < 1e-10);
        assert!(oracle.off_block_residual < 1e-14);
    }

    #[test]
    fn single_mode_weights_example() {
        let rho = reduce_single_mode(4, 2, 2, 0.0).unwrap();
        let w = rho.block_weights();
        let expected = [(0, 1.0 / 6.0), (1, 2.0 / 3.0), (2, 1.0 / 6.0)];
        for ((q, got), (eq, want)) in w.iter().zip(expected) {
            assert_eq!(*q, eq);
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_closed_form_matches_general_path() {
        for chain in 2..=8 {
            for index in [0, 1, chain / 2] {
                for m in 1..=chain.min(3) {
                    let s = state(chain, vec![index; m]);
                    let k = 2.0 * PI * index as f64 / chain as f64;
                    for n in 1..=chain {
                        let general = reduce(&s, &SubsystemSpec::prefix(chain, n).unwrap()).unwrap();
                        let closed = reduce_single_mode(chain, n, m, k).unwrap();
                        assert!(general.max_abs_diff(&closed) < 1e-10, "N={chain} n={n} m={m} k={index}");
                        for (q, w) in closed.block_weights() {
                            assert!((w - hypergeometric_pmf(chain, n, m, q).unwrap()).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn single_mode_full_chain_is_pure() {
        let rho = reduce_single_mode(5, 5, 2, 0.3).unwrap();
        assert_eq!(rho.blocks().len(), 1);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subsystem_validation() {
        assert!(SubsystemSpec::new(4, vec![]).is_err());
        assert!(SubsystemSpec::new(4, vec![2, 2]).is_err());
        assert!(SubsystemSpec::prefix(4, 0).is_err());
        assert!(SubsystemSpec::prefix(4, 5).is_err());
        let sub = SubsystemSpec::new(6, vec![2, 5]).unwrap();
        assert_eq!(sub.complement_sites(), vec![1, 3, 4, 6]);
        let s = state(5, vec![1]);
        assert!(matches!(reduce(&s, &sub), Err(Error::Domain(_))));
    }

    #[test]
    fn reduction_respects_block_budget() {
        let s = state(12, vec![1, 2, 3, 4]);
        let tight = Budget {
            max_amplitudes: 100,
            ..Budget::default()
        };
        let sub = SubsystemSpec::prefix(12, 8).unwrap();
        assert!(matches!(reduce_with(&s, &sub, &tight), Err(Error::Infeasible(_))));
    }

    #[test]
    fn block_matrix_constructor_validates() {
        let sub = SubsystemSpec::prefix(3, 1).unwrap();
        let half = |z: f64| CMatrix::from_row_major(vec![Complex64::new(z, 0.0)]).unwrap();
        let blocks = vec![
            DensityBlock::new(0, vec![SiteList::prefix(0)], half(0.5)).unwrap(),
            DensityBlock::new(1, vec![SiteList::prefix(1)], half(0.5)).unwrap(),
        ];
        assert!(BlockDensityMatrix::new(sub.clone(), blocks).is_ok());
        let bad_trace = vec![DensityBlock::new(0, vec![SiteList::prefix(0)], half(0.7)).unwrap()];
        assert!(matches!(
            BlockDensityMatrix::new(sub.clone(), bad_trace),
            Err(Error::InternalConsistency(_))
        ));
        let negative = vec![
            DensityBlock::new(0, vec![SiteList::prefix(0)], half(1.5)).unwrap(),
            DensityBlock::new(1, vec![SiteList::prefix(1)], half(-0.5)).unwrap(),
        ];
        assert!(matches!(
            BlockDensityMatrix::new(sub, negative),
            Err(Error::InternalConsistency(_))
        ));
    }
}
