//! Integer formulas: dimensions, index counts, degree thresholds, the
//! degree decomposition `d = uε + (r+k)vδ`, and Deng's explicit bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::binomial;

pub use crate::wronskian::kprime;

/// Numeric parameters. `m_inf`, `big_m` and `big_r` are supplied by the
/// caller; nothing here computes them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSet {
    pub n: u64,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub k: u64,
    pub delta: u64,
    #[serde(default)]
    pub epsilon: u64,
    #[serde(default = "one")]
    pub u: u64,
    #[serde(default = "one")]
    pub v: u64,
    #[serde(default)]
    pub m_inf: u64,
    #[serde(default, rename = "M")]
    pub big_m: u64,
    #[serde(default, rename = "R")]
    pub big_r: u64,
}

fn one() -> u64 {
    1
}

impl ParamSet {
    pub fn new(n: u64, big_n: u64, k: u64, delta: u64) -> Self {
        ParamSet {
            n,
            big_n,
            k,
            delta,
            u: 1,
            v: 1,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if self.u == 0 || self.v == 0 {
            return Err(Error::InvalidInput("u and v must be at least 1".into()));
        }
        Ok(())
    }

    /// `N ≥ n ≥ 2` and `k ≥ N − 1`.
    pub fn hypotheses_hold(&self) -> bool {
        self.big_n >= self.n && self.n >= 2 && self.k + 1 >= self.big_n
    }

    fn v_delta(&self) -> u128 {
        self.v as u128 * self.delta as u128
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeDecomposition {
    pub d: u64,
    pub epsilon: u64,
    pub r: u64,
}

impl DegreeDecomposition {
    /// Checks `d = uε + (r+k)vδ`, `m_∞ ≤ ε < m_∞ + vδ` and `r ≥ R`.
    pub fn is_valid_for(&self, params: &ParamSet) -> bool {
        let vd = params.v_delta();
        let lhs = params.u as u128 * self.epsilon as u128 + (self.r as u128 + params.k as u128) * vd;
        lhs == self.d as u128
            && params.m_inf <= self.epsilon
            && (self.epsilon as u128) < params.m_inf as u128 + vd
            && self.r >= params.big_r
    }
}

/// `n + k(n−1)`, as a signed value so that it also makes sense for the
/// dimensions `0` and `−1` of small strata.
pub fn jet_dim(n: i64, k: i64) -> i64 {
    n + k * (n - 1)
}

/// `(#𝕀, #𝕀_x) = (C(N+δ, δ), C(N_x−1+δ, δ))`.
pub fn index_counts(big_n: u64, delta: u64, n_x: u64) -> Result<(BigInt, BigInt)> {
    if n_x == 0 || n_x > big_n + 1 {
        return Err(Error::InvalidInput(format!("N_x = {n_x} must lie in 1..={}", big_n + 1)));
    }
    Ok((
        binomial((big_n + delta) as usize, delta as usize),
        binomial((n_x - 1 + delta) as usize, delta as usize),
    ))
}

/// One inequality `lhs > rhs` (or `lhs ≥ rhs` for `basic`) with its margin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
}

impl Condition {
    fn strict(lhs: impl Into<BigInt>, rhs: impl Into<BigInt>) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        Condition {
            holds: lhs > rhs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumCondition {
    pub size_j: u64,
    pub dim_x_j: i64,
    pub jet_dim: i64,
    /// `None` when the stratum is empty.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub hypotheses: bool,
    /// `δ ≥ n(k+1)`.
    pub basic: bool,
    /// `n + k(n−1) + k − δ − 1`, negative exactly when `basic` holds.
    pub estimation_margin: i64,
    /// `C(N−n+δ, δ) > jet_dim(n,k) + k`; absent when `N < n`.
    pub optimal1: Option<Condition>,
    /// `δ + 1 > jet_dim(dim X_J, k)` over every nonempty stratum.
    pub optimal2: bool,
    pub strata: Vec<StratumCondition>,
    /// `δ + 1 − max_J jet_dim(dim X_J, k)`; positive iff `optimal2`.
    pub benoist_margin: i64,
}

pub fn delta_conditions(params: &ParamSet) -> Result<DeltaReport> {
    params.validate()?;
    let (n, k, delta) = (params.n as i64, params.k as i64, params.delta as i64);
    let basic = delta >= n * (k + 1);
    let estimation_margin = jet_dim(n, k) + k - delta - 1;
    let optimal1 = (params.big_n >= params.n).then(|| {
        let count = binomial((params.big_n - params.n + params.delta) as usize, params.delta as usize);
        Condition::strict(count, jet_dim(n, k) + k)
    });
    let mut strata = Vec::new();
    let mut worst: Option<i64> = None;
    for size_j in 0..=params.big_n + 1 {
        let dim_x_j = (n - size_j as i64).max(-1);
        let jd = jet_dim(dim_x_j, k);
        let holds = (dim_x_j >= 0).then(|| delta + 1 > jd);
        if dim_x_j >= 0 {
            worst = Some(worst.map_or(jd, |w: i64| w.max(jd)));
        }
        strata.push(StratumCondition {
            size_j,
            dim_x_j,
            jet_dim: jd,
            holds,
        });
    }
    let benoist_margin = delta + 1 - worst.unwrap_or(i64::MIN / 2);
    Ok(DeltaReport {
        hypotheses: params.hypotheses_hold(),
        basic,
        estimation_margin,
        optimal1,
        optimal2: strata.iter().all(|s| s.holds != Some(false)),
        strata,
        benoist_margin,
    })
}

fn overflow() -> Error {
    Error::InvalidInput("integer overflow".into())
}

/// `⌈(M(k+1)(uε + kvδ) + 1) / v⌉`.
pub fn r_threshold(v: u64, u: u64, big_m: u64, k: u64, epsilon: u64, delta: u64) -> Result<u64> {
    if v == 0 {
        return Err(Error::InvalidInput("v must be at least 1".into()));
    }
    let inner = (u as u128)
        .checked_mul(epsilon as u128)
        .and_then(|a| a.checked_add((k as u128).checked_mul(v as u128)?.checked_mul(delta as u128)?))
        .ok_or_else(overflow)?;
    let num = (big_m as u128)
        .checked_mul(k as u128 + 1)
        .and_then(|a| a.checked_mul(inner))
        .and_then(|a| a.checked_add(1))
        .ok_or_else(overflow)?;
    u64::try_from(num.div_ceil(v as u128)).map_err(|_| overflow())
}

pub fn r_threshold_for(params: &ParamSet) -> Result<u64> {
    r_threshold(params.v, params.u, params.big_m, params.k, params.epsilon, params.delta)
}

/// Largest `r_threshold` as `ε` runs over `m_∞ ≤ ε < m_∞ + vδ`. Any `R` at
/// least this large works for every `ε` a decomposition can produce.
pub fn r_window_max(params: &ParamSet) -> Result<u64> {
    let vd = u64::try_from(params.v_delta()).map_err(|_| overflow())?;
    if vd == 0 {
        return Err(Error::InvalidInput("v*delta must be positive".into()));
    }
    // r_threshold is monotone in ε, so the top of the window is the maximum.
    r_threshold(params.v, params.u, params.big_m, params.k, params.m_inf + vd - 1, params.delta)
}

/// `m(k+1)(uε + kvδ) − v·r`.
pub fn twist_exponent(params: &ParamSet, m: u64, r: u64) -> i128 {
    let (k, u, v) = (params.k as i128, params.u as i128, params.v as i128);
    let inner = u * params.epsilon as i128 + k * v * params.delta as i128;
    m as i128 * (k + 1) * inner - v * r as i128
}

/// `d_0 = u(m_∞ + vδ) + (R + k)vδ`.
pub fn d0(params: &ParamSet) -> Result<u64> {
    let vd = params.v_delta();
    let total = (params.u as u128)
        .checked_mul(params.m_inf as u128 + vd)
        .and_then(|a| a.checked_add((params.big_r as u128 + params.k as u128).checked_mul(vd)?))
        .ok_or_else(overflow)?;
    u64::try_from(total).map_err(|_| overflow())
}

/// Writes `d = uε + (r+k)vδ` with `ε` in the window `[m_∞, m_∞ + vδ)`.
pub fn decompose_degree(params: &ParamSet, d: u64) -> Result<DegreeDecomposition> {
    params.validate()?;
    let vd = params.v_delta();
    if vd == 0 {
        return Err(Error::InvalidInput("v*delta must be positive".into()));
    }
    let modulus = i128::try_from(vd).map_err(|_| overflow())?;
    let g = (params.u as i128).gcd(&modulus);
    if g != 1 {
        return Err(Error::Gcd(g as u64));
    }
    let threshold = d0(params)?;
    if d < threshold {
        return Err(Error::TooSmall { d, d0: threshold });
    }
    let u_inv = (params.u as i128).extended_gcd(&modulus).x.mod_floor(&modulus);
    let residue = ((d as i128).mod_floor(&modulus) * u_inv).mod_floor(&modulus);
    let m_inf = params.m_inf as i128;
    let epsilon = m_inf + (residue - m_inf).mod_floor(&modulus);
    let rest = d as i128 - params.u as i128 * epsilon;
    debug_assert_eq!(rest.mod_floor(&modulus), 0);
    let t = rest / modulus;
    let r = t - params.k as i128;
    Ok(DegreeDecomposition {
        d,
        epsilon: epsilon as u64,
        r: r as u64,
    })
}

/// `(d_0, cap)` with `d_0 = n^{n+1}(n+1)^{n+2}(n³+2n²+2n−1) + n³+3n²+3n`
/// and `cap = (n+1)^{2n+6}`.
pub fn deng_bound(n: u64) -> Result<(BigInt, BigInt)> {
    if n < 2 {
        return Err(Error::InvalidInput("the explicit bound needs n >= 2".into()));
    }
    let b = BigInt::from(n);
    let b1 = &b + 1u32;
    let e = n as u32;
    let poly = &b * &b * &b + 2u32 * &b * &b + 2u32 * &b - 1u32;
    let d0 = num_traits::pow(b.clone(), (e + 1) as usize) * num_traits::pow(b1.clone(), (e + 2) as usize) * poly
        + &b * &b * &b
        + 3u32 * &b * &b
        + 3u32 * &b;
    let cap = num_traits::pow(b1, (2 * e + 6) as usize);
    debug_assert!(d0 <= cap);
    Ok((d0, cap))
}

/// `big` as `u64` when it fits, for compact JSON.
pub fn small(big: &BigInt) -> Option<u64> {
    if big.is_negative() {
        None
    } else {
        big.to_u64()
    }
}
