//! Self-check suite: every invariant family of the toolkit, evaluated on a
//! configurable chain with seeded random inputs and reported with its worst
//! residual.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coherence::{self, c_l1, c_r, effective_dimension, incoherent_part, pure_report, report, CoherenceMeasure};
use crate::combinat::{
    admissible_q, binary_entropy, binomial, binomial_u64, enumerate_combinations, hypergeometric_distribution,
    hypergeometric_pmf, ln_binomial, rank_combination, unrank_combination, SiteList,
};
use crate::error::{Error, Result};
use crate::magnon_state::{
    build_state, eigen_residual, embed_full, permanent_direct, permanent_ryser, single_mode_state, AmplitudeTable,
    MagnonStateSpec, MomentumVector,
};
use crate::reduced_density::{
    oracle_partial_trace, reduce, reduce_single_mode, BlockDensityMatrix, CMatrix, DensityBlock, SubsystemSpec,
};
use crate::thermo::{
    beta_c, beta_decomposition, coherence_density, energy_from_beta, finite_size_coherence_density, heat_capacity,
    schottky_peak,
};

/// Largest chain the suite accepts; the oracle works in the full `2^N` space.
pub const MAX_VERIFY_CHAIN: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub chain: usize,
    pub magnons: usize,
    pub coupling: f64,
    /// Random specs drawn per randomized family.
    pub trials: usize,
    pub seed: u64,
    /// Appends a family that always fails.
    pub force_fail: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            chain: 8,
            magnons: 2,
            coupling: 1.0,
            trials: 50,
            seed: 2024,
            force_fail: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub module: &'static str,
    pub family: &'static str,
    pub checks: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when the family aborted with an error.
    pub note: Option<String>,
}

impl fmt::Display for FamilyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}.{}: max residual {:.3e} (tolerance {:.1e}, {} checks)",
            if self.passed { "PASS" } else { "FAIL" },
            self.module,
            self.family,
            self.max_residual,
            self.tolerance,
            self.checks
        )?;
        if let Some(note) = &self.note {
            write!(f, " [{note}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub families: Vec<FamilyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(|f| f.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FamilyResult> {
        self.families.iter().filter(|f| !f.passed)
    }
}

/// Worst residual over a family's checks; NaN counts as a failure.
#[derive(Default)]
struct Tally {
    checks: usize,
    worst: f64,
    nan: bool,
}

impl Tally {
    fn record(&mut self, residual: f64) {
        self.checks += 1;
        if residual.is_nan() {
            self.nan = true;
        } else {
            self.worst = self.worst.max(residual);
        }
    }

    fn violation(&mut self, violated: bool) {
        self.record(if violated { 1.0 } else { 0.0 });
    }
}

type FamilyFn = fn(&VerifyConfig, &mut ChaCha8Rng, &mut Tally) -> Result<()>;

struct Family {
    module: &'static str,
    name: &'static str,
    tolerance: f64,
    run: FamilyFn,
}

const FAMILIES: &[Family] = &[
    Family {
        module: "combinat",
        name: "hypergeometric-normalization",
        tolerance: 1e-12,
        run: hypergeometric_normalization,
    },
    Family {
        module: "combinat",
        name: "hypergeometric-symmetry",
        tolerance: 1e-12,
        run: hypergeometric_symmetry,
    },
    Family {
        module: "combinat",
        name: "binomial-paths",
        tolerance: 1e-10,
        run: binomial_paths,
    },
    Family {
        module: "combinat",
        name: "combination-enumeration",
        tolerance: 0.0,
        run: combination_enumeration,
    },
    Family {
        module: "magnon_state",
        name: "normalization",
        tolerance: 1e-10,
        run: state_normalization,
    },
    Family {
        module: "magnon_state",
        name: "permanent-consistency",
        tolerance: 1e-10,
        run: permanent_consistency,
    },
    Family {
        module: "magnon_state",
        name: "single-mode-consistency",
        tolerance: 1e-10,
        run: single_mode_consistency,
    },
    Family {
        module: "magnon_state",
        name: "one-magnon-eigenstate",
        tolerance: 1e-12,
        run: one_magnon_eigenstate,
    },
    Family {
        module: "magnon_state",
        name: "dilute-residual-trend",
        tolerance: 0.0,
        run: dilute_residual_trend,
    },
    Family {
        module: "magnon_state",
        name: "translation-covariance",
        tolerance: 1e-12,
        run: translation_covariance,
    },
    Family {
        module: "reduced_density",
        name: "oracle-equivalence",
        tolerance: 1e-10,
        run: oracle_equivalence,
    },
    Family {
        module: "reduced_density",
        name: "block-weight-law",
        tolerance: 1e-10,
        run: block_weight_law,
    },
    Family {
        module: "reduced_density",
        name: "purity-bound",
        tolerance: 1e-10,
        run: purity_bound,
    },
    Family {
        module: "reduced_density",
        name: "complementarity",
        tolerance: 1e-8,
        run: complementarity,
    },
    Family {
        module: "reduced_density",
        name: "contiguity-irrelevance",
        tolerance: 1e-10,
        run: contiguity_irrelevance,
    },
    Family {
        module: "coherence",
        name: "zero-iff-diagonal",
        tolerance: 0.0,
        run: zero_iff_diagonal,
    },
    Family {
        module: "coherence",
        name: "upper-bounds",
        tolerance: 1e-10,
        run: upper_bounds,
    },
    Family {
        module: "coherence",
        name: "single-site-incoherence",
        tolerance: 1e-14,
        run: single_site_incoherence,
    },
    Family {
        module: "coherence",
        name: "contractivity",
        tolerance: 1e-12,
        run: contractivity,
    },
    Family {
        module: "coherence",
        name: "convexity",
        tolerance: 1e-12,
        run: convexity,
    },
    Family {
        module: "coherence",
        name: "averaged-identity",
        tolerance: 1e-10,
        run: averaged_identity,
    },
    Family {
        module: "coherence",
        name: "ln-additivity",
        tolerance: 1e-10,
        run: ln_additivity,
    },
    Family {
        module: "thermo",
        name: "inverse-pair",
        tolerance: 1e-12,
        run: inverse_pair,
    },
    Family {
        module: "thermo",
        name: "heat-capacity-limits",
        tolerance: 1e-12,
        run: heat_capacity_limits,
    },
    Family {
        module: "thermo",
        name: "negative-temperature",
        tolerance: 0.0,
        run: negative_temperature,
    },
    Family {
        module: "thermo",
        name: "energy-monotonicity",
        tolerance: 0.0,
        run: energy_monotonicity,
    },
    Family {
        module: "thermo",
        name: "two-level-correspondence",
        tolerance: 1e-6,
        run: two_level_correspondence,
    },
    Family {
        module: "thermo",
        name: "schottky-peak",
        tolerance: 1e-4,
        run: schottky_location,
    },
    Family {
        module: "thermo",
        name: "schottky-scale-invariance",
        tolerance: 1e-10,
        run: schottky_scale_invariance,
    },
    Family {
        module: "thermo",
        name: "intensivity",
        tolerance: 0.0,
        run: intensivity,
    },
    Family {
        module: "thermo",
        name: "beta-decomposition",
        tolerance: 0.0,
        run: decomposition,
    },
];

/// Names of every family, as `module.family`, in report order.
pub fn family_names() -> Vec<String> {
    FAMILIES.iter().map(|f| format!("{}.{}", f.module, f.name)).collect()
}

pub fn run_suite(config: &VerifyConfig) -> Result<VerifyReport> {
    if !(2..=MAX_VERIFY_CHAIN).contains(&config.chain) {
        return Err(Error::domain(format!(
            "verification chain must have 2..={MAX_VERIFY_CHAIN} sites, got {}",
            config.chain
        )));
    }
    if config.magnons == 0 || config.magnons > config.chain {
        return Err(Error::domain(format!(
            "verification needs 1..={} magnons, got {}",
            config.chain, config.magnons
        )));
    }
    if !(config.coupling > 0.0 && config.coupling.is_finite()) || config.trials == 0 {
        return Err(Error::domain(
            "verification needs a positive coupling and at least one trial",
        ));
    }
    let mut families: Vec<FamilyResult> = FAMILIES
        .iter()
        .enumerate()
        .map(|(i, family)| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(i as u64));
            let mut tally = Tally::default();
            let outcome = (family.run)(config, &mut rng, &mut tally);
            let note = outcome.err().map(|e| format!("{}: {e}", e.category()));
            FamilyResult {
                module: family.module,
                family: family.name,
                checks: tally.checks,
                max_residual: if tally.nan { f64::NAN } else { tally.worst },
                tolerance: family.tolerance,
                passed: note.is_none() && !tally.nan && tally.worst <= family.tolerance,
                note,
            }
        })
        .collect();
    if config.force_fail {
        families.push(FamilyResult {
            module: "harness",
            family: "forced-failure",
            checks: 1,
            max_residual: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
            note: Some("failure requested".into()),
        });
    }
    Ok(VerifyReport {
        config: config.clone(),
        families,
    })
}

fn random_momentum(rng: &mut impl Rng, chain: usize, m: usize) -> Result<MomentumVector> {
    MomentumVector::new(chain, (0..m).map(|_| rng.random_range(0..chain)).collect())
}

fn random_subsystem(rng: &mut impl Rng, chain: usize) -> Result<SubsystemSpec> {
    let n = rng.random_range(1..=chain);
    let mut sites: Vec<usize> = sample(rng, chain, n).into_iter().map(|s| s + 1).collect();
    sites.sort_unstable();
    SubsystemSpec::new(chain, sites)
}

/// A state built from random wavenumbers; redraws on completely destructive
/// interference.
fn random_state(rng: &mut impl Rng, chain: usize, m: usize, coupling: f64) -> Result<AmplitudeTable> {
    loop {
        let spec = MagnonStateSpec::new(random_momentum(rng, chain, m)?, coupling)?;
        match build_state(&spec) {
            Err(Error::NullState { .. }) => continue,
            other => return other,
        }
    }
}

fn full_chain(state: &AmplitudeTable) -> Result<BlockDensityMatrix> {
    reduce(state, &SubsystemSpec::prefix(state.chain(), state.chain())?)
}

/// Density matrix on `n` sites with every block `X X^dagger` for a random
/// complex `X`, normalized to unit trace.
fn random_density(rng: &mut impl Rng, n: usize) -> Result<BlockDensityMatrix> {
    let mut blocks = Vec::with_capacity(n + 1);
    for q in 0..=n {
        let basis = enumerate_combinations(n, q)?;
        let dim = basis.len();
        let x: Vec<Complex64> = (0..dim * dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut m = CMatrix::from_fn(dim, |i, j| {
            (0..dim).map(|r| x[i * dim + r] * x[j * dim + r].conj()).sum()
        });
        for i in 0..dim {
            for j in 0..i {
                m[(i, j)] = m[(j, i)].conj();
            }
            m[(i, i)].im = 0.0;
        }
        blocks.push((q, basis, m));
    }
    let total: f64 = blocks.iter().map(|(_, _, m)| m.trace().re).sum();
    let blocks = blocks
        .into_iter()
        .map(|(q, basis, m)| DensityBlock::new(q, basis, m.scaled(1.0 / total)))
        .collect::<Result<Vec<_>>>()?;
    BlockDensityMatrix::new(SubsystemSpec::prefix(n, n)?, blocks)
}

fn hypergeometric_scan() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for chain in [1, 2, 7, 16] {
        for n in 1..=chain {
            for m in 0..=chain {
                out.push((chain, n, m));
            }
        }
    }
    for chain in [60, 200] {
        for n in (1..=chain).step_by(7) {
            for m in (0..=chain).step_by(11) {
                out.push((chain, n, m));
            }
        }
    }
    out
}

fn hypergeometric_normalization(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for (chain, n, m) in hypergeometric_scan() {
        let total: f64 = hypergeometric_distribution(chain, n, m)?.iter().map(|(_, p)| p).sum();
        t.record((total - 1.0).abs());
    }
    Ok(())
}

fn hypergeometric_symmetry(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for (chain, n, m) in hypergeometric_scan() {
        if m == 0 {
            continue;
        }
        for q in admissible_q(chain, n, m)?.iter() {
            t.record((hypergeometric_pmf(chain, n, m, q)? - hypergeometric_pmf(chain, m, n, q)?).abs());
        }
    }
    Ok(())
}

fn binomial_paths(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for n in 0..=64u64 {
        for k in 0..=n {
            let exact = binomial(n, k)?.to_f64();
            t.record((ln_binomial(n, k).exp() - exact).abs() / exact);
        }
    }
    Ok(())
}

fn combination_enumeration(config: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let n = config.chain;
    for m in 0..=n {
        let all = enumerate_combinations(n, m)?;
        t.violation(Some(all.len() as u64) != binomial_u64(n as u64, m as u64));
        t.violation(all.windows(2).any(|w| w[0].sites() >= w[1].sites()));
        for (r, l) in all.iter().enumerate() {
            let round = unrank_combination(r as u64, n, m)?;
            t.violation(rank_combination(l, n)? != r as u64 || &round != l);
        }
    }
    Ok(())
}

fn state_normalization(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..config.trials {
        let s = random_state(rng, config.chain, config.magnons, config.coupling)?;
        t.record((s.norm_sqr().sqrt() - 1.0).abs());
    }
    for index in 0..config.chain {
        let k = TAU * index as f64 / config.chain as f64;
        t.record((single_mode_state(config.chain, config.magnons, k)?.norm_sqr().sqrt() - 1.0).abs());
    }
    Ok(())
}

fn phase_matrix(k: &[f64], sites: &[usize]) -> Vec<Complex64> {
    k.iter()
        .flat_map(|&ka| sites.iter().map(move |&l| Complex64::from_polar(1.0, ka * l as f64)))
        .collect()
}

fn permanent_consistency(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let chain = config.chain.max(6);
    for m in 2..=6 {
        for _ in 0..config.trials {
            let k = random_momentum(rng, chain, m)?.values();
            let sites = unrank_combination(
                rng.random_range(0..binomial_u64(chain as u64, m as u64).unwrap_or(1)),
                chain,
                m,
            )?;
            let a = phase_matrix(&k, sites.sites());
            let direct = permanent_direct(&a, m);
            let ryser = permanent_ryser(&a, m);
            t.record((direct - ryser).norm() / direct.norm().max(1.0));
        }
    }
    Ok(())
}

/// Worst entry of `|a - phase * b|` with the phase fixed at the largest entry of `b`.
fn phase_aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let pivot = (0..b.len())
        .max_by(|&i, &j| b[i].norm().total_cmp(&b[j].norm()))
        .unwrap_or(0);
    let phase = if b.is_empty() || b[pivot].norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        a[pivot] / b[pivot] / (a[pivot] / b[pivot]).norm()
    };
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}

fn single_mode_consistency(config: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for index in 0..config.chain {
        let momentum = MomentumVector::single_mode(config.chain, index, config.magnons)?;
        let k = momentum.values()[0];
        let built = build_state(&MagnonStateSpec::new(momentum, config.coupling)?)?;
        let closed = single_mode_state(config.chain, config.magnons, k)?;
        t.record(phase_aligned_distance(built.amplitudes(), closed.amplitudes()));
    }
    Ok(())
}

fn one_magnon_eigenstate(config: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for chain in 4..=config.chain.max(4) {
        for index in 0..chain {
            let spec = MagnonStateSpec::new(MomentumVector::new(chain, vec![index])?, config.coupling)?;
            let v = embed_full(&build_state(&spec)?)?;
            t.record(eigen_residual(&v, config.coupling, spec.dilute_energy())?);
        }
    }
    Ok(())
}

/// Residual of the two-magnon state with indices (1, 2) on each chain length.
pub(crate) fn dilute_residuals(coupling: f64, chains: &[usize]) -> Result<Vec<f64>> {
    chains
        .iter()
        .map(|&chain| {
            let spec = MagnonStateSpec::new(MomentumVector::new(chain, vec![1, 2])?, coupling)?;
            let v = embed_full(&build_state(&spec)?)?;
            eigen_residual(&v, coupling, spec.dilute_energy())
        })
        .collect()
}

fn dilute_residual_trend(config: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let r = dilute_residuals(config.coupling, &[8, 10, 12, 14])?;
    for w in r.windows(2) {
        t.record((w[1] - w[0]).max(0.0));
    }
    Ok(())
}

fn shift_sites(l: &SiteList, chain: usize) -> Result<SiteList> {
    let mut sites: Vec<usize> = l.sites().iter().map(|&s| s % chain + 1).collect();
    sites.sort_unstable();
    SiteList::new(sites, chain)
}

fn translation_covariance(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for trial in 0..config.trials {
        let s = if trial % 2 == 0 {
            let spec = MagnonStateSpec::new(
                MomentumVector::single_mode(config.chain, rng.random_range(0..config.chain), config.magnons)?,
                config.coupling,
            )?;
            build_state(&spec)?
        } else {
            random_state(rng, config.chain, config.magnons, config.coupling)?
        };
        let k_total: f64 = s
            .spec()
            .map(|spec| spec.momentum().values().iter().sum())
            .unwrap_or(0.0);
        let factor = Complex64::from_polar(1.0, k_total);
        for (l, a) in s.basis().iter().zip(s.amplitudes()) {
            let shifted = s.amplitude_of(&shift_sites(l, config.chain)?)?;
            t.record((shifted - factor * a).norm());
            t.record((shifted.norm() - a.norm()).abs());
        }
    }
    Ok(())
}

fn oracle_equivalence(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..config.trials {
        let s = random_state(rng, config.chain, config.magnons, config.coupling)?;
        let sub = random_subsystem(rng, config.chain)?;
        let oracle = oracle_partial_trace(&embed_full(&s)?, &sub)?;
        t.record(reduce(&s, &sub)?.max_abs_diff(&oracle.matrix));
        t.record(oracle.off_block_residual);
    }
    Ok(())
}

fn block_weight_law(config: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let (chain, m) = (config.chain, config.magnons);
    let spec = MagnonStateSpec::new(MomentumVector::single_mode(chain, 1, m)?, config.coupling)?;
    let s = build_state(&spec)?;
    for n in 1..=chain {
        let closed = reduce_single_mode(chain, n, m, spec.momentum().values()[0])?;
        let general = reduce(&s, &SubsystemSpec::prefix(chain, n)?)?;
        for rho in [&closed, &general] {
            for (q, w) in rho.block_weights() {
                t.record((w - hypergeometric_pmf(chain, n, m, q)?).abs());
            }
        }
    }
    Ok(())
}

fn purity_bound(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..config.trials {
        let s = random_state(rng, config.chain, config.magnons, config.coupling)?;
        let sub = random_subsystem(rng, config.chain)?;
        let rho = reduce(&s, &sub)?;
        let purity = rho.purity();
        let populated = rho.block_weights().iter().filter(|(_, w)| *w > 1e-12).count();
        if sub.len() == config.chain || admissible_q(config.chain, sub.len(), config.magnons)?.is_single_point() {
            t.record((purity - 1.0).abs());
        } else {
            t.record((purity - 1.0).max(0.0));
            // Two populated blocks already force a mixed state.
            if populated > 1 {
                t.violation(purity >= 1.0 - 1e-12);
            }
        }
    }
    Ok(())
}

fn nonzero_spectrum(rho: &BlockDensityMatrix) -> Result<Vec<f64>> {
    Ok(rho.eigenvalues()?.into_iter().filter(|&x| x > 1e-10).collect())
}

fn complementarity(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..config.trials {
        let s = random_state(rng, config.chain, config.magnons, config.coupling)?;
        let v = embed_full(&s)?;
        let sub = random_subsystem(rng, config.chain)?;
        if sub.len() == config.chain {
            continue;
        }
        let a = nonzero_spectrum(&oracle_partial_trace(&v, &sub)?.matrix)?;
        let b = nonzero_spectrum(&oracle_partial_trace(&v, &sub.complement()?)?.matrix)?;
        if a.len() != b.len() {
            t.record(f64::INFINITY);
            continue;
        }
        t.record(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    }
    Ok(())
}

fn contiguity_irrelevance(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let (chain, m) = (config.chain, config.magnons);
    let spec = MagnonStateSpec::new(MomentumVector::single_mode(chain, 1, m)?, config.coupling)?;
    let s = build_state(&spec)?;
    for _ in 0..config.trials {
        let sub = random_subsystem(rng, chain)?;
        let scattered = reduce(&s, &sub)?;
        let contiguous = reduce(&s, &SubsystemSpec::prefix(chain, sub.len())?)?;
        for (a, b) in scattered.blocks().iter().zip(contiguous.blocks()) {
            t.violation(a.q() != b.q());
            for (x, y) in a.matrix().as_slice().iter().zip(b.matrix().as_slice()) {
                t.record((x.norm() - y.norm()).abs());
            }
        }
        t.violation(scattered.blocks().len() != contiguous.blocks().len());
    }
    Ok(())
}

fn zero_iff_diagonal(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let n_max = config.chain.min(6);
    for trial in 0..config.trials {
        let rho = random_density(rng, 2 + trial % (n_max - 1))?;
        let coherent = report(&rho)?;
        let diagonal = report(&incoherent_part(&rho))?;
        for measure in CoherenceMeasure::ALL {
            t.record(diagonal.get(measure).abs());
            t.violation(coherent.get(measure) <= 0.0);
        }
    }
    Ok(())
}

fn upper_bounds(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..config.trials {
        let s = random_state(rng, config.chain, config.magnons, config.coupling)?;
        let rho = reduce(&s, &random_subsystem(rng, config.chain)?)?;
        let r = report(&rho)?;
        let d = r.basis_dimension as f64;
        t.record((r.c_r - d.ln()).max(0.0));
        t.record((r.c_l1 - (d - 1.0)).max(0.0));
    }
    for index in 0..config.chain {
        let spec = MagnonStateSpec::new(
            MomentumVector::single_mode(config.chain, index, config.magnons)?,
            config.coupling,
        )?;
        let r = report(&full_chain(&build_state(&spec)?)?)?;
        let (max_r, max_l1) = coherence::max_coherence(r.basis_dimension as u64)?;
        t.record((r.c_r - max_r).abs());
        t.record((r.c_l1 - max_l1).abs() / max_l1.max(1.0));
    }
    Ok(())
}

fn single_site_incoherence(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..config.trials.div_ceil(config.chain) {
        let s = random_state(rng, config.chain, config.magnons, config.coupling)?;
        for site in 1..=config.chain {
            let r = report(&reduce(&s, &SubsystemSpec::new(config.chain, vec![site])?)?)?;
            for measure in CoherenceMeasure::ALL {
                t.record(r.get(measure).abs());
            }
        }
    }
    for k in [0.0, 0.7, 2.1] {
        let r = report(&reduce_single_mode(config.chain, 1, config.magnons, k)?)?;
        for measure in CoherenceMeasure::ALL {
            t.record(r.get(measure).abs());
        }
    }
    Ok(())
}

fn contractivity(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..config.trials {
        let s = random_state(rng, config.chain, config.magnons, config.coupling)?;
        let parent = pure_report(&s);
        let child = report(&reduce(&s, &random_subsystem(rng, config.chain)?)?)?;
        for measure in CoherenceMeasure::ALL {
            t.record((child.get(measure) - parent.get(measure)).max(0.0));
        }
    }
    Ok(())
}

fn convexity(config: &VerifyConfig, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let n_max = config.chain.min(6);
    for trial in 0..config.trials {
        let n = 2 + trial % (n_max - 1);
        let a = random_density(rng, n)?;
        let b = random_density(rng, n)?;
        let (ra, rb) = (report(&a)?, report(&b)?);
        for lambda in [0.25, 0.5, 0.75] {
            let mixed = report(&a.mix(&b, lambda)?)?;
            for measure in [CoherenceMeasure::L1, CoherenceMeasure::RelativeEntropy] {
                let chord = lambda * ra.get(measure) + (1.0 - lambda) * rb.get(measure);
                t.record((mixed.get(measure) - chord).max(0.0));
            }
        }
    }
    Ok(())
}

fn averaged_identity(config: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let (chain, m) = (config.chain, config.magnons);
    for n in 1..=chain {
        let rho = reduce_single_mode(chain, n, m, 0.9)?;
        let dist = hypergeometric_distribution(chain, n, m)?;
        let l1: f64 = dist
            .iter()
            .map(|&(q, p)| p * (binomial_u64(n as u64, q as u64).unwrap() as f64 - 1.0))
            .sum();
        let r: f64 = dist.iter().map(|&(q, p)| p * ln_binomial(n as u64, q as u64)).sum();
        t.record((c_l1(&rho) - l1).abs());
        t.record((c_r(&rho)? - r).abs());
    }
    Ok(())
}

fn ln_additivity(config: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let half = config.chain / 2;
    for (n1, q1, n2, q2) in [(half, 1, config.chain - half, 1), (3, 1, 4, 2), (4, 2, 2, 1)] {
        if n1 == 0 || n2 == 0 || q1 > n1 || q2 > n2 || n1 + n2 > MAX_VERIFY_CHAIN {
            continue;
        }
        let a = single_mode_state(n1, q1, 0.4)?;
        let b = single_mode_state(n2, q2, 1.3)?;
        let (ra, rb) = (report(&full_chain(&a)?)?, report(&full_chain(&b)?)?);
        let product = full_chain(&a.tensor(&b)?)?;
        let rp = report(&product)?;
        t.record((effective_dimension(&product) - ra.effective_dimension * rb.effective_dimension).abs());
        t.record((rp.c_l1 - ((1.0 + ra.c_l1) * (1.0 + rb.c_l1) - 1.0)).abs());
        t.record((rp.c_ln - (ra.c_ln + rb.c_ln)).abs());
    }
    Ok(())
}

fn inverse_pair(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for epsilon0 in [0.3, 1.0, 4.0] {
        for i in 0..1000 {
            let u = epsilon0 * (0.01 + 0.98 * i as f64 / 999.0);
            t.record((energy_from_beta(beta_c(u, epsilon0)?, epsilon0) - u).abs());
        }
    }
    Ok(())
}

fn heat_capacity_limits(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for epsilon0 in [0.5, 2.0] {
        for i in -400..=400 {
            let c = heat_capacity(i as f64 / 20.0 / epsilon0, epsilon0);
            t.record((-c).max(0.0));
        }
        t.record(heat_capacity(0.0, epsilon0).abs());
        t.record(heat_capacity(50.0 / epsilon0, epsilon0).abs());
        t.record(heat_capacity(-50.0 / epsilon0, epsilon0).abs());
    }
    Ok(())
}

fn negative_temperature(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let epsilon0 = 1.7;
    for i in 1..1000 {
        let u = epsilon0 * i as f64 / 1000.0;
        t.violation((u > epsilon0 / 2.0) != (beta_c(u, epsilon0)? < 0.0));
    }
    Ok(())
}

fn energy_monotonicity(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let epsilon0 = 1.0;
    let u: Vec<f64> = (-3000..=3000)
        .map(|i| energy_from_beta(i as f64 / 100.0, epsilon0))
        .collect();
    for w in u.windows(2) {
        t.violation(w[1] >= w[0]);
    }
    Ok(())
}

fn two_level_correspondence(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let h = 1e-5;
    for epsilon0 in [0.5, 1.0, 3.0] {
        // Heat capacity against du/dT, on both temperature branches.
        for i in 1..=200 {
            let temperature = epsilon0 * i as f64 / 40.0;
            for sign in [1.0, -1.0] {
                let temp = sign * temperature;
                let du = energy_from_beta(1.0 / (temp + h), epsilon0) - energy_from_beta(1.0 / (temp - h), epsilon0);
                t.record((du / (2.0 * h) - heat_capacity(1.0 / temp, epsilon0)).abs());
            }
        }
        // Coherence temperature against ds/du.
        for i in 5..=95 {
            let u = epsilon0 * i as f64 / 100.0;
            let ds = coherence_density(u + h, epsilon0)? - coherence_density(u - h, epsilon0)?;
            t.record((ds / (2.0 * h) - beta_c(u, epsilon0)?).abs());
        }
    }
    Ok(())
}

/// Reference location of the heat-capacity maximum in `eps0 * beta`.
const SCHOTTKY_X: f64 = 2.39936;

fn schottky_location(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for epsilon0 in [0.25, 1.0, 5.0] {
        t.record((epsilon0 * schottky_peak(epsilon0)?.beta - SCHOTTKY_X).abs());
    }
    Ok(())
}

fn schottky_scale_invariance(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    let reference = schottky_peak(1.0)?;
    for epsilon0 in [0.1, 0.5, 2.0, 7.0, 40.0] {
        let peak = schottky_peak(epsilon0)?;
        t.record((peak.heat_capacity - reference.heat_capacity).abs());
        t.record((peak.beta * epsilon0 - reference.beta).abs());
    }
    Ok(())
}

fn intensivity(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for (chain, n, m) in [(20, 10, 2), (40, 20, 4), (30, 10, 6), (50, 25, 20)] {
        let limit = binary_entropy(m as f64 / chain as f64)?;
        let mut previous = f64::INFINITY;
        for scale in [1, 2, 4, 8] {
            let gap = (finite_size_coherence_density(chain * scale, n * scale, m * scale)? - limit).abs();
            t.violation(gap >= previous);
            previous = gap;
        }
    }
    Ok(())
}

fn decomposition(_: &VerifyConfig, _: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for (chain, n, m) in [(60, 20, 6), (40, 40, 10), (200, 50, 30)] {
        let d = beta_decomposition(chain, n, m, 1.0, 1)?;
        t.record((d.residual - d.truncation_bound).max(0.0));
    }
    Ok(())
}
