//! Decoherence-free-subspace construction and diagnostics.
//!
//! States annihilated by the collective operator sum_j Z_j see no
//! second-order decoherence when the contraction matrix is rank-one
//! (fully correlated noise): the decoherence exponent becomes
//! C_0 <(sum Z)^2> and vanishes on the zero-weight sector. The
//! diagnostics here quantify exactly that, and how fast protection
//! degrades as the matrix moves away from rank one.
//!
//! Basis convention: amplitude index `i` encodes the computational basis
//! state whose qubit `j` occupies bit `n - 1 - j` (qubit 0 is the most
//! significant bit, matching the Kronecker ordering of the exact
//! propagator module).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::ContractionMatrix;
use crate::error::{Error, Result};

/// Dense register capacity: 2^12 amplitudes.
pub const MAX_REGISTER_QUBITS: usize = 12;

/// Normalized pure state of an N-qubit register in the computational
/// basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl RegisterState {
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > MAX_REGISTER_QUBITS {
            return Err(Error::Capacity(format!(
                "register size must be in 1..={MAX_REGISTER_QUBITS}, got {n}"
            )));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "a {n}-qubit register needs {} amplitudes, got {}",
                1 << n,
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "state norm is {}, must be 1 within 1e-12",
                norm_sq.sqrt()
            )));
        }
        Ok(RegisterState { n, amplitudes })
    }

    /// Computational basis state |bits>.
    pub fn basis_state(n: usize, bits: u32) -> Result<Self> {
        if bits >= (1u32 << n) {
            return Err(Error::DimensionMismatch(format!(
                "bitstring {bits:#b} out of range for {n} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[bits as usize] = Complex64::new(1.0, 0.0);
        RegisterState::new(n, amplitudes)
    }

    /// Equal-weight superposition of two basis states with a relative
    /// sign, e.g. the singlet-like (|01> - |10>)/sqrt(2).
    pub fn superposition(n: usize, a: u32, b: u32, relative_sign: f64) -> Result<Self> {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[a as usize] = Complex64::new(inv, 0.0);
        amplitudes[b as usize] = Complex64::new(relative_sign * inv, 0.0);
        RegisterState::new(n, amplitudes)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Z eigenvalue of qubit `j` in basis state `index`.
    fn z_eigenvalue(&self, index: usize, j: usize) -> f64 {
        let bit = (index >> (self.n - 1 - j)) & 1;
        if bit == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// All C(N, N/2) computational bitstrings with equal numbers of 0s and
/// 1s: a basis for the kernel of sum_j Z_j.
///
/// Odd registers have no exact zero-weight sector; the error names the
/// two nearest sectors.
pub fn dfs_basis(n: usize) -> Result<Vec<u32>> {
    if n == 0 || n > MAX_REGISTER_QUBITS {
        return Err(Error::Capacity(format!(
            "register size must be in 1..={MAX_REGISTER_QUBITS}, got {n}"
        )));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::OddRegister {
            n,
            lo: n / 2,
            hi: n / 2 + 1,
        });
    }
    let mut basis: Vec<u32> = (0..(1u32 << n))
        .filter(|x| x.count_ones() as usize == n / 2)
        .collect();
    basis.sort_unstable();
    Ok(basis)
}

/// || (sum_j Z_j) |psi> ||_2 — zero exactly when the state lies in the
/// decoherence-free subspace.
pub fn collective_z_residual(state: &RegisterState) -> f64 {
    let n = state.qubits() as i64;
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let weight = n - 2 * (i as u32).count_ones() as i64;
            a.norm_sqr() * (weight * weight) as f64
        })
        .sum::<f64>()
        .sqrt()
}

/// Second-moment decoherence exponent `<psi| sum_{j,m} C[j][m] Z_j Z_m`
/// |psi>.
///
/// For the rank-one fully correlated matrix this is C_0 (sum Z)^2 and
/// vanishes identically on DFS states; for a diagonal matrix it is
/// `sum_j C[j][j]` for every basis state (no protection).
pub fn dfs_decoupling_check(c: &ContractionMatrix, state: &RegisterState) -> Result<f64> {
    let n = state.qubits();
    if c.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "contraction matrix is {}x{} but the state has {n} qubits",
            c.dim(),
            c.dim()
        )));
    }
    let mut total = 0.0;
    for (i, a) in state.amplitudes().iter().enumerate() {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let mut quad = 0.0;
        for j in 0..n {
            let zj = state.z_eigenvalue(i, j);
            for m in 0..n {
                quad += c.get_re(j, m) * zj * state.z_eigenvalue(i, m);
            }
        }
        total += w * quad;
    }
    Ok(total)
}
