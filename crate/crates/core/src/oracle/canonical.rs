//! Scaling check of the weak-coupling similarity transformation for the
//! bit-flipping case.
//!
//! The generator removes the linear spin-bath coupling to leading order:
//!
//! ```text
//! S_j = g sum_k [ T_j(w_k) e^{-i k.r_j} a_k^dag + T_j(-w_k) e^{i k.r_j} a_k ],
//! T_j(w) = L_j^- / (Delta - w) - L_j^+ / (Delta + w),   L^{+-} = (Z -+ iY)/2
//! ```
//!
//! and the approximate propagator keeps only the transformed free part:
//! U(t) ~ exp(-i (H_S + H_B) t) exp(S(t)) exp(-S(0)). The first neglected
//! term is second order in the coupling, so the state infidelity must
//! scale as the fourth power of g; the sweep measures that exponent.

use num_complex::Complex64;
use serde::Serialize;

use crate::dfs::RegisterState;
use crate::error::{Error, Result};
use crate::oracle::ops::{self, CMat, CVec};
use crate::oracle::system::FockSystem;

/// Minimum allowed detuning |w_k - Delta| in units of Delta.
pub const MIN_RELATIVE_DETUNING: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalReport {
    /// (coupling scale factor, infidelity) pairs of the sweep.
    pub infidelities: Vec<(f64, f64)>,
    /// Least-squares slope of ln(infidelity) against ln(factor).
    pub exponent: f64,
    /// Infidelity ratios between consecutive sweep points.
    pub step_ratios: Vec<f64>,
}

/// Generator S(0) on the joint space.
fn generator(sys: &FockSystem) -> CMat {
    let n = sys.spins();
    let d = sys.truncation;
    let m = sys.modes.len();
    let delta = sys.splitting;
    let a1 = ops::ladder(d);
    let z = ops::pauli_z();
    let y = ops::pauli_y();
    let half = Complex64::new(0.5, 0.0);

    let mut s = CMat::zeros(sys.dim(), sys.dim());
    for j in 0..n {
        let zj = ops::spin_operator(&z, j, n);
        let yj = ops::spin_operator(&y, j, n);
        let l_minus = (&zj + &yj * ops::I) * half; // |-><+|
        let l_plus = (&zj - &yj * ops::I) * half; // |+><-|
        for (k, mode) in sys.modes.iter().enumerate() {
            let w = sys.frequency(mode);
            let r = sys.positions[j];
            let dot = mode.wavevector[0] * r[0]
                + mode.wavevector[1] * r[1]
                + mode.wavevector[2] * r[2];
            let phase = Complex64::from_polar(1.0, -dot);
            let g = Complex64::new(mode.coupling, 0.0);

            let t_plus = &l_minus * Complex64::new(1.0 / (delta - w), 0.0)
                - &l_plus * Complex64::new(1.0 / (delta + w), 0.0);
            let t_minus = &l_minus * Complex64::new(1.0 / (delta + w), 0.0)
                - &l_plus * Complex64::new(1.0 / (delta - w), 0.0);

            let adag = ops::mode_operator(&a1.adjoint(), k, m, d);
            let a = ops::mode_operator(&a1, k, m, d);
            s += t_plus.kronecker(&adag) * (g * phase) + t_minus.kronecker(&a) * (g * phase.conj());
        }
    }
    s
}

/// exp(S) for anti-Hermitian S.
fn exp_antihermitian(s: &CMat) -> CMat {
    let is = s * ops::I;
    ops::expm_hermitian(&is, -ops::I)
}

/// Infidelity of the transformed-free-evolution approximation at one
/// coupling setting.
fn infidelity(sys: &FockSystem, spin: &RegisterState, t: f64) -> Result<f64> {
    let bd = sys.bath_dim();
    let mut psi0 = CVec::zeros(sys.dim());
    for (s, amp) in spin.amplitudes().iter().enumerate() {
        psi0[s * bd] = *amp; // vacuum bath column
    }

    let h = sys.build_hamiltonian()?;
    let (vals, vecs) = ops::hermitian_eigen(&h);
    let exact = ops::apply_expm(&vals, &vecs, ops::I * (-t), &psi0);

    // free part H_S + H_B and the rotated generator S(t)
    let free = sys.spin_hamiltonian().kronecker(&ops::identity(bd))
        + ops::identity(sys.spin_dim()).kronecker(&sys.bath_hamiltonian());
    let (fvals, fvecs) = ops::hermitian_eigen(&free);
    let s0 = generator(sys);
    let forward = ops::expm_from_eigen(&fvals, &fvecs, ops::I * t);
    let s_t = &forward * &s0 * forward.adjoint();

    let mut approx = exp_antihermitian(&(-&s0)) * psi0;
    approx = exp_antihermitian(&s_t) * approx;
    approx = ops::apply_expm(&fvals, &fvecs, ops::I * (-t), &approx);

    let overlap = exact.dotc(&approx).norm_sqr();
    Ok((1.0 - overlap).max(0.0))
}

/// Sweep the coupling over `factors` (relative to the system's couplings)
/// and fit the infidelity scaling exponent.
pub fn verify_canonical_transformation(
    sys: &FockSystem,
    t: f64,
    factors: &[f64],
) -> Result<CanonicalReport> {
    if !(sys.splitting > 0.0) {
        return Err(Error::Domain(format!(
            "canonical sweep requires splitting > 0, got {}",
            sys.splitting
        )));
    }
    for mode in &sys.modes {
        let w = sys.frequency(mode);
        let gap = (w - sys.splitting).abs();
        if gap <= MIN_RELATIVE_DETUNING * sys.splitting {
            return Err(Error::Resonance {
                omega: w,
                delta: sys.splitting,
                min_gap: MIN_RELATIVE_DETUNING * sys.splitting,
            });
        }
    }
    if factors.len() < 2 {
        return Err(Error::FitFailure(
            "need at least two coupling factors for a scaling fit".into(),
        ));
    }

    // uniform superposition: sensitive to both the Z and Y error channels
    let n = sys.spins();
    let dim = 1usize << n;
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let spin = RegisterState::new(n, vec![amp; dim])?;

    let mut infidelities = Vec::with_capacity(factors.len());
    for &f in factors {
        let eps = infidelity(&sys.with_coupling_scale(f)?, &spin, t)?;
        if !(eps.is_finite()) {
            return Err(Error::FitFailure(format!(
                "infidelity at factor {f} is not finite"
            )));
        }
        if eps < 1e-14 {
            return Err(Error::FitFailure(format!(
                "infidelity {eps:.3e} at factor {f} sits at the double-precision floor; increase the couplings"
            )));
        }
        infidelities.push((f, eps));
    }

    // least-squares slope of ln eps vs ln factor
    let lx: Vec<f64> = infidelities.iter().map(|(f, _)| f.ln()).collect();
    let ly: Vec<f64> = infidelities.iter().map(|(_, e)| e.ln()).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&lx), mean(&ly));
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::FitFailure("coupling factors are all equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;

    let step_ratios = infidelities
        .windows(2)
        .map(|w| w[0].1 / w[1].1)
        .collect();

    Ok(CanonicalReport {
        infidelities,
        exponent,
        step_ratios,
    })
}
