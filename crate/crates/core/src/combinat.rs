//! Combinatorics over spin-up site lists.
//!
//! Every matrix in this crate is indexed by [`SiteList`]s in lexicographic
//! order, as produced by [`enumerate_combinations`] and numbered by
//! [`rank_combination`]. Sites are 1-based.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Largest `n` for which [`binomial`] returns an exact value.
pub const EXACT_BINOMIAL_LIMIT: u64 = 64;

/// A binomial coefficient, exact where cheap and always as a natural log.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialValue {
    pub exact: Option<BigUint>,
    pub log_value: f64,
}

impl BinomialValue {
    /// Value as a double; `exp(log_value)` when the exact integer is absent.
    pub fn to_f64(&self) -> f64 {
        match &self.exact {
            Some(v) => v.to_f64().unwrap_or(f64::INFINITY),
            None => self.log_value.exp(),
        }
    }
}

/// `C(n, k)`: exact big integer for `n <= 64`, log-space only beyond.
pub fn binomial(n: u64, k: u64) -> Result<BinomialValue> {
    if k > n {
        return Err(Error::domain(format!("binomial: k = {k} exceeds n = {n}")));
    }
    if n <= EXACT_BINOMIAL_LIMIT {
        let exact = binomial_big(n, k);
        let log_value = exact.to_f64().expect("C(64, k) fits in f64").ln();
        Ok(BinomialValue {
            exact: Some(exact),
            log_value,
        })
    } else {
        Ok(BinomialValue {
            exact: None,
            log_value: ln_binomial_sum(n, k),
        })
    }
}

fn binomial_big(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// `ln C(n, k)` as a plain float; exact-then-log for small `n`.
///
/// Panics if `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_binomial: k = {k} exceeds n = {n}");
    if n <= EXACT_BINOMIAL_LIMIT {
        // C(64, 32) < 2^63, so the u64 path is exact here.
        (binomial_u64(n, k).expect("C(n, k) fits in u64 for n <= 64") as f64).ln()
    } else {
        ln_binomial_sum(n, k)
    }
}

/// `sum_i ln((n - k + i) / i)`. Each term is correctly rounded; the
/// `ln Γ(n+1) - ln Γ(k+1) - ln Γ(n-k+1)` form loses ~1e-12 to cancellation
/// at n ~ 200.
fn ln_binomial_sum(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// `C(n, k)` in machine integers, or `None` on overflow (or `k > n`).
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step.
        acc = acc * (n as u128 - k as u128 + i) / i;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// A strictly increasing list of 1-based site indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteList(Vec<usize>);

impl SiteList {
    /// Validates that `sites` is strictly increasing and inside `[1, n]`.
    pub fn new(sites: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&first) = sites.first() {
            if first < 1 {
                return Err(Error::domain("site indices start at 1"));
            }
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!("site list {sites:?} is not strictly increasing")));
        }
        if let Some(&last) = sites.last() {
            if last > n {
                return Err(Error::domain(format!("site {last} lies outside a chain of {n} sites")));
            }
        }
        Ok(SiteList(sites))
    }

    /// Contiguous prefix `{1, ..., n}`.
    pub fn prefix(n: usize) -> Self {
        SiteList((1..=n).collect())
    }

    pub(crate) fn from_sorted_unchecked(sites: Vec<usize>) -> Self {
        debug_assert!(sites.windows(2).all(|w| w[0] < w[1]));
        SiteList(sites)
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Bitmask with bit `l - 1` set for each site `l`.
    pub fn to_bitmask(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &l| acc | (1u64 << (l - 1)))
    }

    pub fn from_bitmask(mask: u64) -> Self {
        SiteList((0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect())
    }
}

impl fmt::Display for SiteList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// All `m`-subsets of `{1..n}` in lexicographic order.
pub fn enumerate_combinations(n: usize, m: usize) -> Result<Vec<SiteList>> {
    if m > n {
        return Err(Error::domain(format!("cannot choose {m} sites out of {n}")));
    }
    let count = binomial_u64(n as u64, m as u64)
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| Error::infeasible(format!("C({n}, {m}) overflows")))?;
    let mut out = Vec::with_capacity(count);
    let mut cur: Vec<usize> = (1..=m).collect();
    loop {
        out.push(SiteList(cur.clone()));
        // Rightmost entry that can still be incremented.
        let Some(i) = (0..m).rev().find(|&i| cur[i] < n - (m - 1 - i)) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..m {
            cur[j] = cur[j - 1] + 1;
        }
    }
    debug_assert_eq!(out.len(), count);
    Ok(out)
}

/// Position of `l` in the lexicographic enumeration of `n`-site combinations.
pub fn rank_combination(l: &SiteList, n: usize) -> Result<u64> {
    let m = l.len();
    if l.sites().last().is_some_and(|&s| s > n) {
        return Err(Error::domain(format!("{l} does not fit a chain of {n} sites")));
    }
    let mut rank = 0u64;
    let mut prev = 0usize;
    for (i, &site) in l.sites().iter().enumerate() {
        for v in prev + 1..site {
            rank += binomial_u64((n - v) as u64, (m - i - 1) as u64)
                .ok_or_else(|| Error::infeasible("rank overflows u64"))?;
        }
        prev = site;
    }
    Ok(rank)
}

/// Inverse of [`rank_combination`].
pub fn unrank_combination(rank: u64, n: usize, m: usize) -> Result<SiteList> {
    let total =
        binomial_u64(n as u64, m as u64).ok_or_else(|| Error::infeasible(format!("C({n}, {m}) overflows u64")))?;
    if m > n || rank >= total {
        return Err(Error::domain(format!("rank {rank} outside [0, C({n}, {m}) = {total})")));
    }
    let mut rest = rank;
    let mut sites = Vec::with_capacity(m);
    let mut v = 1usize;
    for i in 0..m {
        loop {
            let block = binomial_u64((n - v) as u64, (m - i - 1) as u64).unwrap_or(u64::MAX);
            if rest < block {
                break;
            }
            rest -= block;
            v += 1;
        }
        sites.push(v);
        v += 1;
    }
    Ok(SiteList(sites))
}

/// Admissible number of magnons `q` found in an `n`-site subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissibleRange {
    pub q_min: usize,
    pub q_max: usize,
}

impl AdmissibleRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.q_min..=self.q_max
    }

    pub fn contains(&self, q: usize) -> bool {
        (self.q_min..=self.q_max).contains(&q)
    }

    pub fn is_single_point(&self) -> bool {
        self.q_min == self.q_max
    }
}

/// `Q = [max(0, m - (N - n)), min(n, m)]`.
pub fn admissible_q(chain: usize, n: usize, m: usize) -> Result<AdmissibleRange> {
    if n < 1 || n > chain || m > chain {
        return Err(Error::domain(format!(
            "admissible_q needs 1 <= n <= N and m <= N, got N = {chain}, n = {n}, m = {m}"
        )));
    }
    Ok(AdmissibleRange {
        q_min: m.saturating_sub(chain - n),
        q_max: n.min(m),
    })
}

/// Probability of `q` magnons in an `n`-site subsystem of an `N`-site chain
/// carrying `m` magnons: `C(N-n, m-q) C(n, q) / C(N, m)`.
pub fn hypergeometric_pmf(chain: usize, n: usize, m: usize, q: usize) -> Result<f64> {
    let range = admissible_q(chain, n, m)?;
    if !range.contains(q) {
        return Err(Error::domain(format!(
            "q = {q} outside admissible range [{}, {}]",
            range.q_min, range.q_max
        )));
    }
    Ok(hypergeometric_pmf_unchecked(chain, n, m, q))
}

pub(crate) fn hypergeometric_pmf_unchecked(chain: usize, n: usize, m: usize, q: usize) -> f64 {
    let (big, n64, m64, q64) = (chain as u64, n as u64, m as u64, q as u64);
    let log_p = ln_binomial(big - n64, m64 - q64) + ln_binomial(n64, q64) - ln_binomial(big, m64);
    log_p.exp()
}

/// `(q, p(q))` over the admissible range.
pub fn hypergeometric_distribution(chain: usize, n: usize, m: usize) -> Result<Vec<(usize, f64)>> {
    let range = admissible_q(chain, n, m)?;
    Ok(range
        .iter()
        .map(|q| (q, hypergeometric_pmf_unchecked(chain, n, m, q)))
        .collect())
}

/// Binary Shannon entropy in nats, with `s(0) = s(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    Ok(xlnx_neg(x) + xlnx_neg(1.0 - x))
}

/// `-x ln x` with the `0 ln 0 = 0` convention.
pub(crate) fn xlnx_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}
