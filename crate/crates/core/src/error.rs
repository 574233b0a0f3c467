//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by kernel evaluation, matrix assembly and the exact
/// propagator machinery.
#[derive(Error, Debug)]
pub enum Error {
    /// A physical parameter is outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its refinement budget.
    #[error("integration failed to converge: residual error estimate {residual:.3e} (target {target:.3e})")]
    IntegrationFailure { residual: f64, target: f64 },

    /// Principal-value extrapolation did not settle.
    #[error("principal-value extrapolation did not converge: last two estimates {first:.12e}, {second:.12e}")]
    ExtrapolationDiverged { first: f64, second: f64 },

    /// Kernel evaluation failed for a specific qubit pair.
    #[error("kernel evaluation failed for pair ({j},{m}): {source}")]
    KernelFailure {
        j: usize,
        m: usize,
        #[source]
        source: Box<Error>,
    },

    /// A request exceeds a hard capacity limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Ratio of quantities where the denominator vanishes.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// State vector or matrix shape mismatch.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A constructed object violates one of its declared invariants.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// No exact zero-weight sector exists for an odd register.
    #[error("no exact decoherence-free basis for odd register size {n}; nearest weight sectors have {lo} and {hi} ones")]
    OddRegister { n: usize, lo: usize, hi: usize },

    /// Requested truncation leaves too much thermal weight above the cap.
    #[error("thermal tail beyond truncation {truncation} carries probability {tail:.3e} (limit {limit:.1e})")]
    TruncationTail {
        truncation: usize,
        tail: f64,
        limit: f64,
    },

    /// A mode violates the off-resonance precondition of the canonical sweep.
    #[error("mode frequency {omega} too close to splitting {delta}: |omega - delta| must exceed {min_gap}")]
    Resonance { omega: f64, delta: f64, min_gap: f64 },

    /// Least-squares exponent fit on the infidelity sweep failed.
    #[error("scaling fit failed: {0}")]
    FitFailure(String),

    /// Configuration file or field is invalid.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
