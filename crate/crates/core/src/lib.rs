//! Spatial error-correlation structure for qubit registers coupled to a
//! common bosonic bath.
//!
//! The crate answers two practical questions about a register of N
//! qubits immersed in one three-dimensional, isotropic, linearly
//! dispersing boson bath:
//!
//! 1. *When is the independent-noise approximation safe?* The
//!    [`bath`] module evaluates the equal-time two-point correlation
//!    kernels of the bath displacements attached to each qubit;
//!    [`correlation`] assembles them into an N x N contraction matrix
//!    and classifies the register's noise regime; [`wick`] turns the
//!    matrix into multi-qubit error amplitudes by summing perfect
//!    matchings and measures the deviation from the factorized
//!    (independent) prediction; [`threshold`] quantifies what the
//!    enhanced amplitudes do to concatenated-code failure rates.
//!
//! 2. *What can be done in the fully correlated limit?* The [`dfs`]
//!    module builds the zero-collective-weight subspace and verifies
//!    that the second-moment decoherence exponent vanishes there.
//!
//! Everything is validated against [`oracle`], an exact truncated-Fock
//! propagator for small registers and a few discrete modes, and the
//! [`suite`] module packages the full acceptance checks behind one call.
//!
//! Units are natural throughout: hbar = k_B = 1.

// validation deliberately writes `!(x >= 0.0)` so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod config;
pub mod correlation;
pub mod dfs;
pub mod error;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod suite;
pub mod threshold;
pub mod wick;

pub use bath::{
    bitflip_kernel, dephasing_kernel, effective_zz_coupling, thermal_factor, BathSpec, KernelEval,
    KernelQuery,
};
pub use correlation::{
    build_contraction_matrix, Channel, ContractionMatrix, QubitLayout, RegimeLabel, RegimeReport,
};
pub use dfs::{collective_z_residual, dfs_basis, dfs_decoupling_check, RegisterState};
pub use error::{Error, Result};
pub use quad::QuadOptions;
pub use threshold::{
    breakdown_point, correlated_pfail, enhancement_factor, independent_pfail, Prefactor,
    ThresholdQuery,
};
pub use wick::{gaussian_moment, independence_deviation, matching_count, AmplitudeReport, ErrorPattern};
