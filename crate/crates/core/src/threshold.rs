//! Failure-rate formulas for concatenated codes under independent and
//! correlation-enhanced multi-qubit error probabilities.
//!
//! All probability arithmetic runs in log space: weights up to n = 2^10
//! drive direct powers of P_1/P_th far below the double-precision
//! underflow threshold. The enhanced formula is exposed both with the
//! Stirling prefactor sqrt(2) (2n/e)^n and with the exact matching count
//! (2n-1)!!, which small-n desk checks need.
//!
//! The n-error probabilities feeding these formulas are squared
//! amplitudes, which bound the true pattern probabilities from above
//! (the expansion terms are not mutually orthogonal), so every failure
//! rate here is an upper bound rather than an estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of one failure-rate evaluation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThresholdQuery {
    /// Single-error probability, in [0, 1].
    pub p1: f64,
    /// Threshold rate of the code family, in (0, 1).
    pub p_th: f64,
    /// Error weight n >= 1 (n = 2^k for k levels of distance-3
    /// concatenation).
    pub weight: u64,
}

impl ThresholdQuery {
    pub fn new(p1: f64, p_th: f64, weight: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::Domain(format!("p1 must be in [0, 1], got {p1}")));
        }
        if !(p_th > 0.0 && p_th < 1.0) {
            return Err(Error::Domain(format!("p_th must be in (0, 1), got {p_th}")));
        }
        if weight < 1 {
            return Err(Error::Domain("weight must be >= 1".into()));
        }
        Ok(ThresholdQuery { p1, p_th, weight })
    }
}

/// Which prefactor multiplies the enhanced failure rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prefactor {
    /// sqrt(2) (2n/e)^n — the large-n form.
    Asymptotic,
    /// (2n-1)!! — exact matching combinatorics.
    Exact,
}

/// P_fail = P_th (P_1 / P_th)^n under independent noise.
pub fn independent_pfail(q: &ThresholdQuery) -> f64 {
    let n = q.weight as f64;
    (q.p_th.ln() + n * (q.p1.ln() - q.p_th.ln())).exp()
}

/// ln (2n-1)!! by direct summation; exact to rounding for any weight
/// this crate accepts.
fn ln_double_factorial(n: u64) -> f64 {
    (1..=n).map(|i| ((2 * i - 1) as f64).ln()).sum()
}

/// Enhanced failure rate once every n-error amplitude picks up the full
/// matching-count factor:
///
/// ```text
/// P_fail ~ sqrt(2) P_th ( (2n/e) P_1 / P_th )^n          (asymptotic)
/// P_fail = (2n-1)!! P_th ( P_1 / P_th )^n                (exact)
/// ```
pub fn correlated_pfail(q: &ThresholdQuery, prefactor: Prefactor) -> f64 {
    let n = q.weight as f64;
    let log_ratio = q.p1.ln() - q.p_th.ln();
    match prefactor {
        Prefactor::Asymptotic => {
            (0.5 * std::f64::consts::LN_2 + q.p_th.ln() + n * ((2.0 * n).ln() - 1.0 + log_ratio))
                .exp()
        }
        Prefactor::Exact => {
            (ln_double_factorial(q.weight) + q.p_th.ln() + n * log_ratio).exp()
        }
    }
}

/// correlated_pfail / independent_pfail for the asymptotic prefactor:
/// sqrt(2) (2n/e)^n, independent of P_1.
pub fn enhancement_factor(weight: u64) -> f64 {
    let n = weight as f64;
    (0.5 * std::f64::consts::LN_2 + n * ((2.0 * n).ln() - 1.0)).exp()
}

/// Concatenation stops helping once P_1 drops below (e/2n) P_th.
pub fn breakdown_point(p_th: f64, weight: u64) -> f64 {
    std::f64::consts::E / (2.0 * weight as f64) * p_th
}
