//! Brute-force partial trace in the full `2^N` space.
//!
//! Works on bitmasks only; it shares no indexing code with
//! [`reduce`](super::reduce), so the two can be compared.

use num_complex::Complex64;

use super::{BlockDensityMatrix, CMatrix, DensityBlock, SubsystemSpec};
use crate::combinat::{admissible_q, enumerate_combinations};
use crate::error::{Error, Result};
use crate::magnon_state::FullStateVector;

/// Result of [`oracle_partial_trace`].
#[derive(Debug, Clone)]
pub struct OracleReduction {
    pub matrix: BlockDensityMatrix,
    /// Largest element of the dense reduced matrix that falls outside the
    /// kept magnon-number blocks.
    pub off_block_residual: f64,
}

/// Spreads the low bits of `local` onto the (0-based) bit positions `slots`.
fn scatter(local: usize, slots: &[usize]) -> usize {
    slots
        .iter()
        .enumerate()
        .filter(|(i, _)| local >> i & 1 == 1)
        .fold(0, |acc, (_, &bit)| acc | 1 << bit)
}

/// Dense `2^n x 2^n` partial trace, then projection onto magnon-number blocks.
///
/// Blocks kept are the admissible `q` when the vector's magnon number is
/// known, otherwise every `q` in `0..=n`.
pub fn oracle_partial_trace(v: &FullStateVector, sub: &SubsystemSpec) -> Result<OracleReduction> {
    let chain = v.chain();
    if sub.parent_chain() != chain {
        return Err(Error::domain(format!(
            "subsystem of a {}-site chain applied to a {chain}-site vector",
            sub.parent_chain()
        )));
    }
    if chain > 14 {
        return Err(Error::infeasible(format!(
            "oracle partial trace limited to 14 sites, got {chain}"
        )));
    }
    let inside: Vec<usize> = sub.sites().sites().iter().map(|s| s - 1).collect();
    let outside: Vec<usize> = sub.complement_sites().iter().map(|s| s - 1).collect();
    let n = inside.len();
    let dim = 1usize << n;
    let env_dim = 1usize << outside.len();
    let entries = v.entries();

    let env_masks: Vec<usize> = (0..env_dim).map(|b| scatter(b, &outside)).collect();
    let local_masks: Vec<usize> = (0..dim).map(|a| scatter(a, &inside)).collect();
    let mut dense = vec![Complex64::new(0.0, 0.0); dim * dim];
    for a in 0..dim {
        for a2 in 0..dim {
            dense[a * dim + a2] = env_masks
                .iter()
                .map(|&b| entries[local_masks[a] | b] * entries[local_masks[a2] | b].conj())
                .sum();
        }
    }

    let kept: Vec<usize> = match v.magnons() {
        Some(m) => admissible_q(chain, n, m)?.iter().collect(),
        None => (0..=n).collect(),
    };
    let mut blocks = Vec::with_capacity(kept.len());
    let mut in_block = vec![false; dim * dim];
    for &q in &kept {
        let basis = enumerate_combinations(n, q)?;
        let masks: Vec<usize> = basis
            .iter()
            .map(|l| l.sites().iter().fold(0, |acc, &i| acc | 1 << (i - 1)))
            .collect();
        let matrix = CMatrix::from_fn(basis.len(), |i, j| {
            in_block[masks[i] * dim + masks[j]] = true;
            dense[masks[i] * dim + masks[j]]
        });
        blocks.push(DensityBlock::new(q, basis, matrix)?);
    }
    let off_block_residual = dense
        .iter()
        .zip(&in_block)
        .filter(|(_, &inside)| !inside)
        .map(|(z, _)| z.norm())
        .fold(0.0, f64::max);

    Ok(OracleReduction {
        matrix: BlockDensityMatrix::new(sub.clone(), blocks)?,
        off_block_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnon_state::{build_state, embed_full, MagnonStateSpec, MomentumVector};

    #[test]
    fn all_down_reduces_to_vacuum() {
        let v = FullStateVector::all_down(6).unwrap();
        let r = oracle_partial_trace(&v, &SubsystemSpec::prefix(6, 3).unwrap()).unwrap();
        assert_eq!(r.matrix.blocks().len(), 1);
        assert_eq!(r.matrix.blocks()[0].q(), 0);
        assert!((r.matrix.blocks()[0].matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert_eq!(r.off_block_residual, 0.0);
    }

    #[test]
    fn one_magnon_pair_reduces_to_half_half() {
        let spec = MagnonStateSpec::new(MomentumVector::new(2, vec![0]).unwrap(), 1.0).unwrap();
        let v = embed_full(&build_state(&spec).unwrap()).unwrap();
        let r = oracle_partial_trace(&v, &SubsystemSpec::prefix(2, 1).unwrap()).unwrap();
        let w = r.matrix.block_weights();
        assert_eq!(w.len(), 2);
        assert!((w[0].1 - 0.5).abs() < 1e-15 && (w[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_magnon_number_keeps_every_block() {
        let mut entries = vec![Complex64::new(0.0, 0.0); 8];
        entries[0b000] = Complex64::new(0.6, 0.0);
        entries[0b101] = Complex64::new(0.0, 0.8);
        let v = FullStateVector::new(3, entries).unwrap();
        let r = oracle_partial_trace(&v, &SubsystemSpec::new(3, vec![1, 2]).unwrap()).unwrap();
        assert_eq!(r.matrix.blocks().len(), 3);
        // The two components differ on the traced site, so no coherence survives.
        assert_eq!(r.off_block_residual, 0.0);
        assert!((r.matrix.block(0).unwrap().weight() - 0.36).abs() < 1e-15);
        assert!((r.matrix.block(1).unwrap().weight() - 0.64).abs() < 1e-15);
    }

    #[test]
    fn non_contiguous_subsystem_matches_general_reduction() {
        let spec = MagnonStateSpec::new(MomentumVector::new(7, vec![1, 2, 6]).unwrap(), 1.0).unwrap();
        let s = build_state(&spec).unwrap();
        let sub = SubsystemSpec::new(7, vec![2, 4, 7]).unwrap();
        let r = oracle_partial_trace(&embed_full(&s).unwrap(), &sub).unwrap();
        let general = super::super::reduce(&s, &sub).unwrap();
        assert!(general.max_abs_diff(&r.matrix) < 1e-12);
    }
}
