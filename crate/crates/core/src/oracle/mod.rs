//! Brute-force ground truth: exact unitary evolution of small registers
//! coupled to a few truncated bosonic modes, used to validate the
//! analytic dephasing factorization, the weak-coupling transformation of
//! the bit-flipping case, and decoherence-free decoupling.
//!
//! The discrete-mode systems here validate *structure* (factorization,
//! decoupling, coupling-power scaling); the continuum kernels of
//! [`crate::bath`] are instead validated against dense Riemann mode sums
//! in that module's tests.

pub mod canonical;
pub mod decompose;
pub mod evolve;
pub mod ops;
pub mod system;

pub use canonical::{verify_canonical_transformation, CanonicalReport, MIN_RELATIVE_DETUNING};
pub use decompose::{verify_dephasing_decomposition, BathSector, DecompositionReport};
pub use evolve::{evolve, verify_dfs_decoupling, DfsDecouplingReport, EvolutionResult};
pub use system::{BathInit, FockSystem, ModeSpec, DIMENSION_LIMIT, THERMAL_TAIL_LIMIT};
