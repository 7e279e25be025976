//! Coherence quantifiers in the site-occupation basis.
//!
//! All logarithms are natural. Block storage means cross-sector elements
//! are zero by construction and every measure is a sum over blocks.

use std::fmt;
use std::str::FromStr;

use crate::combinat::{admissible_q, hypergeometric_distribution, ln_binomial, xlnx_neg};
use crate::error::{Error, Result};
use crate::magnon_state::AmplitudeTable;
use crate::reduced_density::{eigenvalues_hermitian, BlockDensityMatrix};

/// Eigenvalues below this contribute nothing to the von Neumann entropy.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoherenceMeasure {
    /// l1-norm of coherence.
    L1,
    /// Relative entropy of coherence.
    RelativeEntropy,
    /// `ln(1 + C_l1)`.
    LogL1,
}

impl CoherenceMeasure {
    pub const ALL: [CoherenceMeasure; 3] = [
        CoherenceMeasure::L1,
        CoherenceMeasure::RelativeEntropy,
        CoherenceMeasure::LogL1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoherenceMeasure::L1 => "l1",
            CoherenceMeasure::RelativeEntropy => "r",
            CoherenceMeasure::LogL1 => "ln",
        }
    }
}

impl fmt::Display for CoherenceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoherenceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoherenceMeasure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown coherence measure '{s}' (expected l1, r or ln)")))
    }
}

/// All measures for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub c_l1: f64,
    /// Nats.
    pub c_r: f64,
    /// Nats.
    pub c_ln: f64,
    pub effective_dimension: f64,
    pub basis_dimension: usize,
}

impl CoherenceReport {
    pub fn get(&self, measure: CoherenceMeasure) -> f64 {
        match measure {
            CoherenceMeasure::L1 => self.c_l1,
            CoherenceMeasure::RelativeEntropy => self.c_r,
            CoherenceMeasure::LogL1 => self.c_ln,
        }
    }
}

/// The diagonal of `rho` in the site-occupation basis.
pub fn incoherent_part(rho: &BlockDensityMatrix) -> BlockDensityMatrix {
    rho.diagonal_part()
}

/// Sum of `|rho_ij|` over off-diagonal elements.
pub fn c_l1(rho: &BlockDensityMatrix) -> f64 {
    rho.blocks().iter().map(|b| b.matrix().off_diagonal_l1()).sum()
}

/// `ln ||rho||_l1 = ln(1 + C_l1)`.
pub fn c_ln(rho: &BlockDensityMatrix) -> f64 {
    c_l1(rho).ln_1p()
}

/// `||rho||_l1`, the sum of `|rho_ij|` over all elements.
pub fn effective_dimension(rho: &BlockDensityMatrix) -> f64 {
    let diagonal: f64 = rho
        .blocks()
        .iter()
        .flat_map(|b| b.matrix().diagonal())
        .map(f64::abs)
        .sum();
    diagonal + c_l1(rho)
}

/// Shannon entropy of the diagonal.
pub fn diagonal_entropy(rho: &BlockDensityMatrix) -> f64 {
    rho.blocks()
        .iter()
        .flat_map(|b| b.matrix().diagonal())
        .map(xlnx_neg)
        .sum()
}

/// `-tr(rho ln rho)`, diagonalizing block by block.
pub fn von_neumann_entropy(rho: &BlockDensityMatrix) -> Result<f64> {
    let mut s = 0.0;
    for b in rho.blocks() {
        s += eigenvalues_hermitian(b.matrix())?
            .into_iter()
            .filter(|&x| x >= ENTROPY_EIGENVALUE_FLOOR)
            .map(xlnx_neg)
            .sum::<f64>();
    }
    Ok(s)
}

/// `S(rho_I) - S(rho)`.
pub fn c_r(rho: &BlockDensityMatrix) -> Result<f64> {
    let mut acc = 0.0;
    for b in rho.blocks() {
        let m = b.matrix();
        // 1x1 and diagonal blocks contribute nothing; skip the eigensolver so
        // they come out as exact zeros.
        if m.off_diagonal_l1() == 0.0 {
            continue;
        }
        let incoherent: f64 = m.diagonal().into_iter().map(xlnx_neg).sum();
        let coherent: f64 = eigenvalues_hermitian(m)?
            .into_iter()
            .filter(|&x| x >= ENTROPY_EIGENVALUE_FLOOR)
            .map(xlnx_neg)
            .sum();
        acc += incoherent - coherent;
    }
    Ok(acc)
}

pub fn report(rho: &BlockDensityMatrix) -> Result<CoherenceReport> {
    let l1 = c_l1(rho);
    Ok(CoherenceReport {
        c_l1: l1,
        c_r: c_r(rho)?,
        c_ln: l1.ln_1p(),
        effective_dimension: effective_dimension(rho),
        basis_dimension: rho.basis_dimension(),
    })
}

/// Measures of a pure state straight from its amplitudes.
pub fn pure_report(state: &AmplitudeTable) -> CoherenceReport {
    let moduli: Vec<f64> = state.amplitudes().iter().map(|a| a.norm()).collect();
    let l1_sum: f64 = moduli.iter().sum();
    let norm_sq: f64 = moduli.iter().map(|x| x * x).sum();
    let l1 = l1_sum * l1_sum - norm_sq;
    CoherenceReport {
        c_l1: l1,
        c_r: moduli.iter().map(|x| xlnx_neg(x * x)).sum(),
        c_ln: l1.ln_1p(),
        effective_dimension: l1_sum * l1_sum,
        basis_dimension: state.len(),
    }
}

/// `(C_r, C_l1)` of a maximally coherent state of dimension `d`: `(ln d, d - 1)`.
pub fn max_coherence(d: u64) -> Result<(f64, f64)> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    Ok(((d as f64).ln(), (d - 1) as f64))
}

/// `sum_q p(q) C(|psi_nqk>)` for the single-mode reduced state.
///
/// The pure block states are maximally coherent, so `C` is `C(n,q) - 1` for
/// `L1` and `ln C(n,q)` for the two logarithmic measures. The wavenumber only
/// sets phases and does not enter.
pub fn averaged_coherence_single_mode(
    chain: usize,
    n: usize,
    m: usize,
    _k: f64,
    measure: CoherenceMeasure,
) -> Result<f64> {
    let dist = hypergeometric_distribution(chain, n, m)?;
    let value = |q: usize| -> f64 {
        let ln_d = ln_binomial(n as u64, q as u64);
        match measure {
            CoherenceMeasure::L1 => ln_d.exp_m1(),
            CoherenceMeasure::RelativeEntropy | CoherenceMeasure::LogL1 => ln_d,
        }
    };
    Ok(dist.into_iter().map(|(q, p)| p * value(q)).sum())
}

/// Averaged closed forms of a single-mode reduction next to the exact
/// `C_ln = ln sum_q p(q) C(n, q)` of the mixed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeAverages {
    pub c_l1: f64,
    pub c_r: f64,
    /// `sum_q p(q) ln C(n, q)`.
    pub c_ln_averaged: f64,
    /// `ln(1 + C_l1)` of the reduced state.
    pub c_ln_exact: f64,
    /// `c_ln_exact - c_ln_averaged >= 0` (Jensen).
    pub c_ln_gap: f64,
}

pub fn single_mode_averages(chain: usize, n: usize, m: usize) -> Result<SingleModeAverages> {
    admissible_q(chain, n, m)?;
    let c_l1 = averaged_coherence_single_mode(chain, n, m, 0.0, CoherenceMeasure::L1)?;
    let c_r = averaged_coherence_single_mode(chain, n, m, 0.0, CoherenceMeasure::RelativeEntropy)?;
    let c_ln_exact = c_l1.ln_1p();
    Ok(SingleModeAverages {
        c_l1,
        c_r,
        c_ln_averaged: c_r,
        c_ln_exact,
        c_ln_gap: c_ln_exact - c_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnon_state::{build_state, single_mode_state, MagnonStateSpec, MomentumVector};
    use crate::reduced_density::{reduce, reduce_single_mode, SubsystemSpec};
    use std::f64::consts::LN_2;

    fn full(state: &AmplitudeTable) -> BlockDensityMatrix {
        reduce(state, &SubsystemSpec::prefix(state.chain(), state.chain()).unwrap()).unwrap()
    }

    #[test]
    fn measure_names_round_trip() {
        for m in CoherenceMeasure::ALL {
            assert_eq!(m.name().parse::<CoherenceMeasure>().unwrap(), m);
        }
        assert!("x".parse::<CoherenceMeasure>().is_err());
    }

    #[test]
    fn incoherent_part_examples() {
        let rho = reduce_single_mode(6, 3, 2, 0.4).unwrap();
        let inc = incoherent_part(&rho);
        assert_eq!(incoherent_part(&inc), inc);
        assert!((inc.trace() - 1.0).abs() < 1e-14);
        assert_eq!(c_l1(&inc), 0.0);

        let pure = full(&single_mode_state(4, 2, 0.9).unwrap());
        let inc = incoherent_part(&pure);
        for b in inc.blocks() {
            for i in 0..b.dim() {
                assert!((b.matrix()[(i, i)].re - 1.0 / 6.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_mode_pure_state_is_maximally_coherent() {
        let spec = MagnonStateSpec::new(MomentumVector::single_mode(4, 1, 2).unwrap(), 1.0).unwrap();
        let rho = full(&build_state(&spec).unwrap());
        let r = report(&rho).unwrap();
        assert!((r.c_l1 - 5.0).abs() < 1e-12);
        assert!((r.c_r - 6f64.ln()).abs() < 1e-12);
        assert!((r.c_ln - 6f64.ln()).abs() < 1e-12);
        assert!((r.effective_dimension - 6.0).abs() < 1e-12);
        assert_eq!(r.basis_dimension, 6);
    }

    #[test]
    fn single_site_is_incoherent() {
        let spec = MagnonStateSpec::new(MomentumVector::new(6, vec![1, 4]).unwrap(), 1.0).unwrap();
        let s = build_state(&spec).unwrap();
        let rho = reduce(&s, &SubsystemSpec::new(6, vec![3]).unwrap()).unwrap();
        let r = report(&rho).unwrap();
        assert_eq!((r.c_l1, r.c_r, r.c_ln), (0.0, 0.0, 0.0));
        assert_eq!(r.effective_dimension, 1.0);
    }

    #[test]
    fn reduced_single_mode_averages() {
        let rho = reduce_single_mode(4, 2, 2, 0.0).unwrap();
        assert!((c_l1(&rho) - 2.0 / 3.0).abs() < 1e-12);
        assert!((c_r(&rho).unwrap() - 2.0 / 3.0 * LN_2).abs() < 1e-12);
        let avg = averaged_coherence_single_mode(4, 2, 2, 0.0, CoherenceMeasure::RelativeEntropy).unwrap();
        assert!((avg - 2.0 / 3.0 * LN_2).abs() < 1e-15);

        // (8, 4, 2): p = (6, 16, 6) / 28 over q = 0, 1, 2
        let rho = reduce_single_mode(8, 4, 2, 1.1).unwrap();
        let expected: f64 = [(1.0, 6.0 / 28.0), (4.0, 16.0 / 28.0), (6.0, 6.0 / 28.0)]
            .iter()
            .map(|(d, p): &(f64, f64)| p * d.ln())
            .sum();
        assert!((c_r(&rho).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn averaged_single_site_vanishes() {
        for measure in CoherenceMeasure::ALL {
            assert_eq!(averaged_coherence_single_mode(9, 1, 4, 0.2, measure).unwrap(), 0.0);
        }
    }

    #[test]
    fn max_coherence_examples() {
        assert_eq!(max_coherence(1).unwrap(), (0.0, 0.0));
        assert_eq!(max_coherence(2).unwrap(), (LN_2, 1.0));
        let (r, l1) = max_coherence(6).unwrap();
        assert!((r - 6f64.ln()).abs() < 1e-15 && l1 == 5.0);
        assert!(max_coherence(0).is_err());
    }

    #[test]
    fn pure_report_matches_density_route() {
        let spec = MagnonStateSpec::new(MomentumVector::new(7, vec![0, 2, 3]).unwrap(), 1.0).unwrap();
        let s = build_state(&spec).unwrap();
        let a = pure_report(&s);
        let b = report(&full(&s)).unwrap();
        assert!((a.c_l1 - b.c_l1).abs() < 1e-10);
        assert!((a.c_r - b.c_r).abs() < 1e-10);
        assert!((a.c_ln - b.c_ln).abs() < 1e-12);
        assert!((a.effective_dimension - b.effective_dimension).abs() < 1e-10);
    }

    #[test]
    fn ln_gap_is_nonnegative() {
        let avg = single_mode_averages(4, 2, 2).unwrap();
        // ln(1 + 2/3) - (2/3) ln 2
        assert!((avg.c_ln_gap - ((5.0f64 / 3.0).ln() - 2.0 / 3.0 * LN_2)).abs() < 1e-15);
        for (chain, n, m) in [(10, 4, 3), (12, 6, 6), (20, 1, 5), (9, 9, 4)] {
            assert!(single_mode_averages(chain, n, m).unwrap().c_ln_gap >= -1e-15);
        }
        // Single q: no gap.
        assert!(single_mode_averages(9, 9, 4).unwrap().c_ln_gap.abs() < 1e-14);
    }
}
