//! Dense-operator helpers for the exact propagator: Kronecker lifts,
//! truncated ladder operators, and Hermitian matrix exponentials.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Lift a single-qubit operator to qubit `j` of an `n`-qubit register.
/// Qubit 0 is the most significant Kronecker factor.
pub fn spin_operator(op: &CMat, j: usize, n: usize) -> CMat {
    let mut out = if j == 0 { op.clone() } else { identity(2) };
    for site in 1..n {
        let factor = if site == j { op.clone() } else { identity(2) };
        out = out.kronecker(&factor);
    }
    out
}

/// Truncated annihilation operator on a `d`-level Fock ladder.
pub fn ladder(d: usize) -> CMat {
    let mut a = CMat::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Lift a single-mode operator to mode `k` of an `m`-mode bath with `d`
/// levels per mode. Mode 0 is the most significant Kronecker factor.
pub fn mode_operator(op: &CMat, k: usize, m: usize, d: usize) -> CMat {
    let mut out = if k == 0 { op.clone() } else { identity(d) };
    for mode in 1..m {
        let factor = if mode == k { op.clone() } else { identity(d) };
        out = out.kronecker(&factor);
    }
    out
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMat) -> (DVector<f64>, CMat) {
    let eig = nalgebra::linalg::SymmetricEigen::new(h.clone());
    (eig.eigenvalues, eig.eigenvectors)
}

/// exp(factor * H) for Hermitian H via eigendecomposition:
/// V diag(exp(factor * lambda)) V^dagger.
pub fn expm_hermitian(h: &CMat, factor: Complex64) -> CMat {
    let (values, vectors) = hermitian_eigen(h);
    expm_from_eigen(&values, &vectors, factor)
}

/// Same as [`expm_hermitian`] with a precomputed eigendecomposition.
pub fn expm_from_eigen(values: &DVector<f64>, vectors: &CMat, factor: Complex64) -> CMat {
    let n = values.len();
    let mut scaled = vectors.clone();
    for c in 0..n {
        let phase = (factor * values[c]).exp();
        for r in 0..n {
            scaled[(r, c)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

/// Apply exp(factor * H) |psi> given the eigendecomposition of H.
pub fn apply_expm(values: &DVector<f64>, vectors: &CMat, factor: Complex64, psi: &CVec) -> CVec {
    let coeffs = vectors.adjoint() * psi;
    let mut out = CVec::zeros(psi.len());
    for (c, coeff) in coeffs.iter().enumerate() {
        let phase = (factor * values[c]).exp();
        out.axpy(phase * coeff, &vectors.column(c).into_owned(), ONE);
    }
    out
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Worst-entry deviation from H = H^dagger, for construction checks.
pub fn hermiticity_residual(h: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..h.nrows() {
        for c in 0..h.ncols() {
            worst = worst.max((h[(r, c)] - h[(c, r)].conj()).norm());
        }
    }
    worst
}
