//! Coherence thermodynamics of the single-mode magnon state.
//!
//! With every magnon in one mode of energy `eps0`, the coherence per site is
//! the binary entropy of the filling `u / eps0`, so coherence temperature,
//! energy density and heat capacity take the two-level (Schottky) forms.
//! Energies are per site throughout.

use crate::combinat::{admissible_q, binary_entropy, hypergeometric_distribution, ln_binomial, xlnx_neg};
use crate::error::{Error, Result};
use rayon::prelude::*;

/// Golden-section tolerance on `eps0 * beta` for [`schottky_peak`].
pub const SCHOTTKY_TOLERANCE: f64 = 1e-10;

fn check_epsilon0(epsilon0: f64) -> Result<()> {
    if !(epsilon0 > 0.0 && epsilon0.is_finite()) {
        return Err(Error::domain(format!("magnon energy {epsilon0} must be positive")));
    }
    Ok(())
}

/// `U = sum_q p(q) q eps0`, which equals `n m eps0 / N`.
pub fn internal_energy(chain: usize, n: usize, m: usize, epsilon0: f64) -> Result<f64> {
    Ok(hypergeometric_distribution(chain, n, m)?
        .into_iter()
        .map(|(q, p)| p * q as f64 * epsilon0)
        .sum())
}

/// `s(u / eps0)`.
pub fn coherence_density(u: f64, epsilon0: f64) -> Result<f64> {
    check_epsilon0(epsilon0)?;
    if !(0.0..=epsilon0).contains(&u) {
        return Err(Error::domain(format!("energy density {u} outside [0, {epsilon0}]")));
    }
    binary_entropy(u / epsilon0)
}

/// Inverse coherence temperature `(1 / eps0) ln(eps0 / u - 1)`.
///
/// Diverges to `+inf` at `u = 0` and to `-inf` at `u = eps0`.
pub fn beta_c(u: f64, epsilon0: f64) -> Result<f64> {
    check_epsilon0(epsilon0)?;
    if u == 0.0 {
        return Err(Error::Divergence { positive: true });
    }
    if u == epsilon0 {
        return Err(Error::Divergence { positive: false });
    }
    if !(0.0..=epsilon0).contains(&u) {
        return Err(Error::domain(format!("energy density {u} outside [0, {epsilon0}]")));
    }
    Ok(((epsilon0 - u) / u).ln() / epsilon0)
}

/// `eps0 / (exp(eps0 beta) + 1)`.
pub fn energy_from_beta(beta: f64, epsilon0: f64) -> f64 {
    let x = epsilon0 * beta;
    if x > 0.0 {
        let t = (-x).exp();
        epsilon0 * t / (1.0 + t)
    } else {
        epsilon0 / (x.exp() + 1.0)
    }
}

/// `(eps0 beta)^2 e^{-eps0 beta} / (1 + e^{-eps0 beta})^2`, even in `beta`.
pub fn heat_capacity(beta: f64, epsilon0: f64) -> f64 {
    schottky_shape((epsilon0 * beta).abs())
}

fn schottky_shape(x: f64) -> f64 {
    let t = (-x).exp();
    x * x * t / ((1.0 + t) * (1.0 + t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchottkyPeak {
    pub beta: f64,
    pub heat_capacity: f64,
}

/// Maximum of [`heat_capacity`] over `beta > 0`, by golden-section search.
pub fn schottky_peak(epsilon0: f64) -> Result<SchottkyPeak> {
    check_epsilon0(epsilon0)?;
    // The shape is unimodal on (0, inf) with its maximum inside [1, 4].
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1.0f64, 4.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (schottky_shape(c), schottky_shape(d));
    while b - a > SCHOTTKY_TOLERANCE {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = schottky_shape(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = schottky_shape(d);
        }
    }
    let x = 0.5 * (a + b);
    Ok(SchottkyPeak {
        beta: x / epsilon0,
        heat_capacity: heat_capacity(x / epsilon0, epsilon0),
    })
}

/// Entropies of the single-mode reduced state `sum_q p(q) |psi_q><psi_q|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeEntropies {
    /// von Neumann entropy: the Shannon entropy of `p`.
    pub entropy: f64,
    /// Entropy of the diagonal: `H(p) + sum_q p(q) ln C(n, q)`.
    pub incoherent_entropy: f64,
    /// Relative entropy of coherence: `sum_q p(q) ln C(n, q)`.
    pub coherence: f64,
}

pub fn single_mode_entropies(chain: usize, n: usize, m: usize) -> Result<SingleModeEntropies> {
    let mut entropy = 0.0;
    let mut coherence = 0.0;
    for (q, p) in hypergeometric_distribution(chain, n, m)? {
        entropy += xlnx_neg(p);
        coherence += p * ln_binomial(n as u64, q as u64);
    }
    Ok(SingleModeEntropies {
        entropy,
        incoherent_entropy: entropy + coherence,
        coherence,
    })
}

/// Centered finite-difference derivatives with respect to `U`, taken by
/// stepping the magnon number at fixed `(eps0, n, N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaDecomposition {
    /// `dS(rho)/dU`.
    pub beta: f64,
    /// `dS(rho_I)/dU`.
    pub beta_i: f64,
    /// `dC_r/dU`.
    pub beta_c: f64,
    /// `|beta - beta_i + beta_c|`.
    pub residual: f64,
    /// Estimated truncation error of the three derivatives combined, plus
    /// the rounding floor of the differences.
    pub truncation_bound: f64,
    /// `U(m + step) - U(m - step)`.
    pub energy_step: f64,
}

/// Decomposes `beta = beta_I - beta_C` at `(N, n, m)` with magnon step `step`.
///
/// Needs `m - 2 step >= 0` and `m + 2 step <= N`; the outer points feed the
/// third-difference truncation estimate.
pub fn beta_decomposition(chain: usize, n: usize, m: usize, epsilon0: f64, step: usize) -> Result<BetaDecomposition> {
    check_epsilon0(epsilon0)?;
    if step == 0 || m < 2 * step || m + 2 * step > chain {
        return Err(Error::domain(format!(
            "magnon number {m} cannot be stepped by +-{} within [0, {chain}]",
            2 * step
        )));
    }
    admissible_q(chain, n, m)?;
    let stencil: Vec<usize> = [m - 2 * step, m - step, m + step, m + 2 * step].to_vec();
    let mut s = [0.0; 4];
    let mut s_i = [0.0; 4];
    let mut c = [0.0; 4];
    let mut u = [0.0; 4];
    for (j, &mj) in stencil.iter().enumerate() {
        let e = single_mode_entropies(chain, n, mj)?;
        s[j] = e.entropy;
        s_i[j] = e.incoherent_entropy;
        c[j] = e.coherence;
        u[j] = internal_energy(chain, n, mj, epsilon0)?;
    }
    let du = u[2] - u[1];
    let derivative = |f: &[f64; 4]| (f[2] - f[1]) / du;
    // Centered-difference error h^2 f'''/6, with f''' from the 5-point stencil
    // (the centre value cancels).
    let truncation = |f: &[f64; 4]| (f[3] - 2.0 * f[2] + 2.0 * f[1] - f[0]).abs() / (6.0 * du);
    let rounding = |f: &[f64; 4]| 8.0 * f64::EPSILON * f.iter().map(|x| x.abs()).fold(0.0, f64::max) / du.abs();

    let beta = derivative(&s);
    let beta_i = derivative(&s_i);
    let beta_c = derivative(&c);
    let truncation_bound = [&s, &s_i, &c].iter().map(|f| truncation(f) + rounding(f)).sum();
    Ok(BetaDecomposition {
        beta,
        beta_i,
        beta_c,
        residual: (beta - beta_i + beta_c).abs(),
        truncation_bound,
        energy_step: du,
    })
}

/// `(1 / n) sum_q p(q) ln C(n, q)`, tending to `s(m / N)` at fixed ratios.
pub fn finite_size_coherence_density(chain: usize, n: usize, m: usize) -> Result<f64> {
    Ok(single_mode_entropies(chain, n, m)?.coherence / n as f64)
}

/// One row of a thermodynamic sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub beta_c: f64,
    pub u: f64,
    pub heat_capacity: f64,
    pub epsilon0: f64,
}

impl ThermoPoint {
    pub fn at_beta(beta: f64, epsilon0: f64) -> Self {
        ThermoPoint {
            beta_c: beta,
            u: energy_from_beta(beta, epsilon0),
            heat_capacity: heat_capacity(beta, epsilon0),
            epsilon0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridVariable {
    /// Inverse coherence temperature.
    Beta,
    /// Energy density; endpoints must lie strictly inside `(0, eps0)`.
    EnergyDensity,
}

/// `samples` evenly spaced values from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub variable: GridVariable,
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.samples < 2 || !(self.start < self.end) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::domain(format!(
                "grid needs start < end and at least 2 samples, got [{}, {}] x {}",
                self.start, self.end, self.samples
            )));
        }
        let span = self.end - self.start;
        let last = (self.samples - 1) as f64;
        Ok((0..self.samples)
            .map(|i| {
                if i + 1 == self.samples {
                    self.end
                } else {
                    self.start + span * i as f64 / last
                }
            })
            .collect())
    }
}

/// Sampled thermodynamic curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoCurve {
    pub grid_spec: GridSpec,
    pub points: Vec<ThermoPoint>,
}

/// Evaluates the curve on `grid` in parallel; rows keep the grid order.
pub fn sweep(grid: GridSpec, epsilon0: f64) -> Result<ThermoCurve> {
    check_epsilon0(epsilon0)?;
    let values = grid.values()?;
    let points = values
        .into_par_iter()
        .map(|x| match grid.variable {
            GridVariable::Beta => Ok(ThermoPoint::at_beta(x, epsilon0)),
            GridVariable::EnergyDensity => {
                let beta = beta_c(x, epsilon0)?;
                Ok(ThermoPoint {
                    beta_c: beta,
                    u: x,
                    heat_capacity: heat_capacity(beta, epsilon0),
                    epsilon0,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThermoCurve {
        grid_spec: grid,
        points,
    })
}
