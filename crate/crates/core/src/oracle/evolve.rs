//! Exact unitary evolution of a [`FockSystem`] and the reduced-state
//! diagnostics extracted from it.

use num_complex::Complex64;
use serde::Serialize;

use crate::dfs::RegisterState;
use crate::error::{Error, Result};
use crate::oracle::ops::{self, CMat, CVec};
use crate::oracle::system::{BathInit, FockSystem};

/// Outcome of one evolution job.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// Spin reduced density matrix after tracing the modes (and, for a
    /// thermal bath, averaging the ensemble).
    pub reduced_spin: CMat,
    /// Final joint state when the bath started pure (vacuum).
    pub joint_state: Option<CVec>,
    /// tr(rho_S^2).
    pub purity: f64,
    /// Survival fidelity <spin_0| rho_S |spin_0> of the initial spin
    /// state.
    pub initial_fidelity: f64,
    /// Largest off-diagonal coherence `|rho_S[a][b]|`, a != b.
    pub max_coherence: f64,
    /// Largest change of any reported scalar when re-run at truncation
    /// d + 2.
    pub truncation_shift: f64,
    /// truncation_shift <= 1e-8.
    pub converged: bool,
}

/// Diagnostics of one truncation level.
#[derive(Debug, Clone)]
struct Snapshot {
    reduced_spin: CMat,
    joint_state: Option<CVec>,
    purity: f64,
    initial_fidelity: f64,
    max_coherence: f64,
}

fn evolve_once(sys: &FockSystem, spin: &RegisterState, t: f64) -> Result<Snapshot> {
    let sd = sys.spin_dim();
    let bd = sys.bath_dim();
    if spin.amplitudes().len() != sd {
        return Err(Error::DimensionMismatch(format!(
            "register has {} amplitudes, system expects {sd}",
            spin.amplitudes().len()
        )));
    }
    let h = sys.build_hamiltonian()?;
    let (vals, vecs) = ops::hermitian_eigen(&h);

    let ensemble = sys.bath_ensemble();
    let mut rho = CMat::zeros(sd, sd);
    let mut joint = None;
    for &(bath_index, weight) in &ensemble {
        let mut psi0 = CVec::zeros(sys.dim());
        for (s, amp) in spin.amplitudes().iter().enumerate() {
            psi0[s * bd + bath_index] = *amp;
        }
        let psi = ops::apply_expm(&vals, &vecs, ops::I * (-t), &psi0);
        // rho_S[a][b] += w * sum_b psi[a, :] conj(psi[b, :])
        for a in 0..sd {
            for b in 0..sd {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..bd {
                    acc += psi[a * bd + k] * psi[b * bd + k].conj();
                }
                rho[(a, b)] += acc * weight;
            }
        }
        if ensemble.len() == 1 && matches!(sys.bath, BathInit::Vacuum) {
            joint = Some(psi);
        }
    }

    // reduced-state invariants
    let trace: f64 = (0..sd).map(|a| rho[(a, a)].re).sum();
    if (trace - 1.0).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "reduced state trace is {trace}, must be 1 within 1e-10"
        )));
    }
    if ops::hermiticity_residual(&rho) > 1e-10 {
        return Err(Error::InvariantViolation(
            "reduced state is not Hermitian within 1e-10".into(),
        ));
    }
    let (eigs, _) = ops::hermitian_eigen(&rho);
    if eigs.iter().any(|&p| p < -1e-10) {
        return Err(Error::InvariantViolation(format!(
            "reduced state has negative population {:.3e}",
            eigs.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }

    let purity = (&rho * &rho).trace().re;
    let spin0 = CVec::from_vec(spin.amplitudes().to_vec());
    let initial_fidelity = spin0.dotc(&(&rho * &spin0)).re;
    let mut max_coherence = 0.0f64;
    for a in 0..sd {
        for b in 0..sd {
            if a != b {
                max_coherence = max_coherence.max(rho[(a, b)].norm());
            }
        }
    }
    Ok(Snapshot {
        reduced_spin: rho,
        joint_state: joint,
        purity,
        initial_fidelity,
        max_coherence,
    })
}

/// Evolve `spin (x) bath` exactly for time `t`, then re-run at
/// truncation d + 2 and flag the result as non-converged if any reported
/// scalar moves by more than 1e-8.
pub fn evolve(sys: &FockSystem, spin: &RegisterState, t: f64) -> Result<EvolutionResult> {
    let base = evolve_once(sys, spin, t)?;
    let refined = evolve_once(&sys.with_truncation(sys.truncation + 2)?, spin, t)?;

    let mut shift = (base.purity - refined.purity).abs();
    shift = shift.max((base.max_coherence - refined.max_coherence).abs());
    shift = shift.max((base.initial_fidelity - refined.initial_fidelity).abs());
    for a in 0..sys.spin_dim() {
        for b in 0..sys.spin_dim() {
            shift = shift.max((base.reduced_spin[(a, b)] - refined.reduced_spin[(a, b)]).norm());
        }
    }

    Ok(EvolutionResult {
        reduced_spin: base.reduced_spin,
        joint_state: base.joint_state,
        purity: base.purity,
        initial_fidelity: base.initial_fidelity,
        max_coherence: base.max_coherence,
        truncation_shift: shift,
        converged: shift <= 1e-8,
    })
}

/// Decoupling diagnostics of [`verify_dfs_decoupling`].
#[derive(Debug, Clone, Serialize)]
pub struct DfsDecouplingReport {
    /// Ensemble-averaged squared overlap between the exactly evolved
    /// joint state and the decoupled prediction
    /// e^{i H_eff(t)} |spin> (x) e^{-i H_B t} |bath>.
    pub decoupling_fidelity: f64,
    /// Purity of the reduced spin state.
    pub spin_purity: f64,
    /// Largest phase spread max_k |k . (r_i - r_j)| over spin pairs.
    pub phase_spread: f64,
    /// Fidelity change when re-run at truncation d + 2.
    pub truncation_shift: f64,
    pub converged: bool,
}

fn dfs_decoupling_once(sys: &FockSystem, spin: &RegisterState, t: f64) -> Result<(f64, f64)> {
    let sd = sys.spin_dim();
    let bd = sys.bath_dim();
    let h = sys.build_hamiltonian()?;
    let (vals, vecs) = ops::hermitian_eigen(&h);

    // spin-side correction: the deterministic phase e^{i H_eff(t)}
    let heff = sys.effective_phase_operator(t);
    let corrected_spin = ops::expm_hermitian(&heff, ops::I)
        * CVec::from_vec(spin.amplitudes().to_vec());

    let ensemble = sys.bath_ensemble();
    let mut fidelity = 0.0;
    let mut weight_total = 0.0;
    let mut rho = CMat::zeros(sd, sd);
    for &(bath_index, weight) in &ensemble {
        let mut psi0 = CVec::zeros(sys.dim());
        for (s, amp) in spin.amplitudes().iter().enumerate() {
            psi0[s * bd + bath_index] = *amp;
        }
        let psi = ops::apply_expm(&vals, &vecs, ops::I * (-t), &psi0);

        // decoupled prediction: corrected spin (x) freely evolved bath
        // basis state (a pure phase)
        let bath_phase = Complex64::from_polar(1.0, -sys.bath_energy(bath_index) * t);
        let mut pred = CVec::zeros(sys.dim());
        for s in 0..sd {
            pred[s * bd + bath_index] = corrected_spin[s] * bath_phase;
        }
        let overlap = pred.dotc(&psi);
        fidelity += weight * overlap.norm_sqr();
        weight_total += weight;

        for a in 0..sd {
            for b in 0..sd {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..bd {
                    acc += psi[a * bd + k] * psi[b * bd + k].conj();
                }
                rho[(a, b)] += acc * weight;
            }
        }
    }
    fidelity /= weight_total;
    let rho = rho / Complex64::new(weight_total, 0.0);
    let purity = (&rho * &rho).trace().re;
    Ok((fidelity, purity))
}

/// Exactly evolve a register state against the long-wavelength mode(s)
/// and compare with the decoupled prediction: after removing the
/// deterministic bath-mediated phase, a zero-collective-weight state must
/// separate from the bath.
///
/// Preconditions: the dephasing case (splitting = 0) and a mode set whose
/// phases agree across the register within 1e-6, so the bath cannot
/// resolve the qubit positions.
pub fn verify_dfs_decoupling(
    sys: &FockSystem,
    spin: &RegisterState,
    t: f64,
) -> Result<DfsDecouplingReport> {
    if sys.splitting != 0.0 {
        return Err(Error::Domain(format!(
            "decoupling check requires splitting = 0, got {}",
            sys.splitting
        )));
    }
    let mut spread = 0.0f64;
    for mode in &sys.modes {
        for i in 0..sys.spins() {
            for j in (i + 1)..sys.spins() {
                let ri = sys.positions[i];
                let rj = sys.positions[j];
                let dot = mode.wavevector[0] * (ri[0] - rj[0])
                    + mode.wavevector[1] * (ri[1] - rj[1])
                    + mode.wavevector[2] * (ri[2] - rj[2]);
                spread = spread.max(dot.abs());
            }
        }
    }
    if spread > 1e-6 {
        return Err(Error::Domain(format!(
            "mode phases spread by {spread:.3e} across the register; the long-wavelength check needs <= 1e-6"
        )));
    }

    let (fidelity, purity) = dfs_decoupling_once(sys, spin, t)?;
    let (fid_refined, _) = dfs_decoupling_once(&sys.with_truncation(sys.truncation + 2)?, spin, t)?;
    let shift = (fidelity - fid_refined).abs();
    Ok(DfsDecouplingReport {
        decoupling_fidelity: fidelity,
        spin_purity: purity,
        phase_spread: spread,
        truncation_shift: shift,
        converged: shift <= 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::system::ModeSpec;
    use approx::assert_relative_eq;

    fn single_mode_system(g: f64, d: usize, bath: BathInit) -> FockSystem {
        FockSystem::new(
            vec![[0.0; 3]],
            0.0,
            1.0,
            vec![ModeSpec {
                wavevector: [1.1, 0.0, 0.0],
                coupling: g,
            }],
            d,
            bath,
        )
        .unwrap()
    }

    fn plus_state() -> RegisterState {
        RegisterState::superposition(1, 0, 1, 1.0).unwrap()
    }

    #[test]
    fn zero_time_is_the_identity() {
        let sys = single_mode_system(0.3, 8, BathInit::Vacuum);
        let r = evolve(&sys, &plus_state(), 0.0).unwrap();
        assert_relative_eq!(r.purity, 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.max_coherence, 0.5, epsilon = 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn zero_coupling_evolves_under_the_spin_hamiltonian_only() {
        let mut sys = single_mode_system(0.0, 4, BathInit::Vacuum);
        sys.splitting = 0.8;
        let t = 2.3;
        let r = evolve(&sys, &RegisterState::basis_state(1, 0).unwrap(), t).unwrap();
        // |0> under (Delta/2) X: population cos^2(Delta t / 2)
        let expect = (0.5 * 0.8 * t).cos().powi(2);
        assert_relative_eq!(r.reduced_spin[(0, 0)].re, expect, epsilon = 1e-10);
        assert_relative_eq!(r.purity, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn single_mode_dephasing_matches_the_displaced_phase_solution() {
        // |rho_01(t)| / |rho_01(0)| = exp(-2 |f|^2 (2 nbar + 1)),
        // f = (g/w)(1 - e^{iwt}); the analytic factor comes from the
        // overlap of oppositely displaced bath states.
        let g = 0.2;
        let sys = single_mode_system(g, 24, BathInit::Vacuum);
        let w = sys.frequency(&sys.modes[0]);
        let t = 1.9;
        let r = evolve(&sys, &plus_state(), t).unwrap();
        let f_sq = (g / w).powi(2) * (2.0 - 2.0 * (w * t).cos());
        let expect = 0.5 * (-2.0 * f_sq).exp();
        assert!(r.converged);
        assert_relative_eq!(r.max_coherence, expect, epsilon = 1e-6);
    }

    #[test]
    fn thermal_bath_accelerates_dephasing_by_the_occupation_factor() {
        let g = 0.2;
        let temperature = 0.7;
        let sys = single_mode_system(g, 40, BathInit::Thermal { temperature });
        let w = sys.frequency(&sys.modes[0]);
        let t = 1.3;
        let r = evolve(&sys, &plus_state(), t).unwrap();
        let nbar = 1.0 / ((w / temperature).exp() - 1.0);
        let f_sq = (g / w).powi(2) * (2.0 - 2.0 * (w * t).cos());
        let expect = 0.5 * (-2.0 * f_sq * (2.0 * nbar + 1.0)).exp();
        assert_relative_eq!(r.max_coherence, expect, max_relative = 1e-5);
    }

    #[test]
    fn unitarity_and_energy_conservation() {
        let sys = single_mode_system(0.4, 10, BathInit::Vacuum);
        let h = sys.build_hamiltonian().unwrap();
        let u = ops::expm_hermitian(&h, ops::I * (-1.7));
        let resid = ops::spectral_norm(&(&u * u.adjoint() - ops::identity(sys.dim())));
        assert!(resid < 1e-10);

        // <H> constant along the evolution
        let r0 = evolve(&sys, &plus_state(), 0.0).unwrap().joint_state.unwrap();
        let e0 = r0.dotc(&(&h * &r0)).re;
        for t in [0.7, 2.9, 8.3] {
            let rt = evolve(&sys, &plus_state(), t).unwrap().joint_state.unwrap();
            let et = rt.dotc(&(&h * &rt)).re;
            assert_relative_eq!(e0, et, epsilon = 1e-10);
        }
    }

    #[test]
    fn dephasing_conserves_sector_populations() {
        let sys = FockSystem::new(
            vec![[0.0; 3], [0.5, 0.0, 0.0]],
            0.0,
            1.0,
            vec![ModeSpec {
                wavevector: [0.9, 0.0, 0.0],
                coupling: 0.3,
            }],
            10,
            BathInit::Vacuum,
        )
        .unwrap();
        let spin = RegisterState::new(
            2,
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        )
        .unwrap();
        let r = evolve(&sys, &spin, 3.7).unwrap();
        for a in 0..4 {
            assert_relative_eq!(r.reduced_spin[(a, a)].re, 0.25, epsilon = 1e-10);
        }
    }

    #[test]
    fn zero_coupling_decouples_trivially() {
        let sys = FockSystem::new(
            vec![[0.0; 3], [0.3, 0.0, 0.0]],
            0.0,
            1.0,
            vec![ModeSpec {
                wavevector: [1.0e-7, 0.0, 0.0],
                coupling: 0.0,
            }],
            4,
            BathInit::Vacuum,
        )
        .unwrap();
        let singlet = RegisterState::superposition(2, 0b01, 0b10, -1.0).unwrap();
        let rep = verify_dfs_decoupling(&sys, &singlet, 5.0).unwrap();
        assert_relative_eq!(rep.decoupling_fidelity, 1.0, epsilon = 1e-12);
        assert_relative_eq!(rep.spin_purity, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn wide_phase_spread_is_rejected() {
        let sys = FockSystem::new(
            vec![[0.0; 3], [0.3, 0.0, 0.0]],
            0.0,
            1.0,
            vec![ModeSpec {
                wavevector: [1.0, 0.0, 0.0], // k . dr = 0.3 >> 1e-6
                coupling: 0.1,
            }],
            4,
            BathInit::Vacuum,
        )
        .unwrap();
        let singlet = RegisterState::superposition(2, 0b01, 0b10, -1.0).unwrap();
        assert!(verify_dfs_decoupling(&sys, &singlet, 1.0).is_err());
    }

    #[test]
    fn deliberate_under_truncation_is_flagged() {
        // strong drive against a 3-level cap: the d + 2 re-run moves the
        // answer and the convergence flag must say so
        let sys = single_mode_system(1.5, 3, BathInit::Vacuum);
        let r = evolve(&sys, &plus_state(), 4.0).unwrap();
        assert!(!r.converged);
        assert!(r.truncation_shift > 1e-8);
    }
}
