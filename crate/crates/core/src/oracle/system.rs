//! Truncated exact representation of the register-plus-modes Hamiltonian
//!
//! ```text
//! H = sum_j (Delta/2) X_j  +  sum_k w_k a_k^dag a_k
//!     + sum_k g_k ( Ztilde_k a_k^dag + Ztilde_k^dag a_k ) ,
//!     Ztilde_k = sum_j Z_j exp(-i k . r_j)
//! ```
//!
//! for small registers and a few discretized modes, each truncated at
//! occupation d - 1. Used as brute-force ground truth for the analytic
//! machinery in the rest of the crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::ops::{self, CMat};

/// Hard cap on the joint Hilbert-space dimension 2^N d^M.
pub const DIMENSION_LIMIT: usize = 1 << 20;

/// Probability allowed above the thermal truncation per mode.
pub const THERMAL_TAIL_LIMIT: f64 = 1e-8;

/// One discretized bath mode. The frequency is fixed by the linear
/// dispersion w = c |k| of the host system, so only the wavevector and
/// coupling are free.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModeSpec {
    pub wavevector: [f64; 3],
    pub coupling: f64,
}

impl ModeSpec {
    pub fn wavenumber(&self) -> f64 {
        let [x, y, z] = self.wavevector;
        (x * x + y * y + z * z).sqrt()
    }
}

/// Initial bath state.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BathInit {
    Vacuum,
    Thermal { temperature: f64 },
}

/// A complete truncated system: spins, modes, truncation and initial
/// bath state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FockSystem {
    pub positions: Vec<[f64; 3]>,
    /// Local splitting Delta of every spin (rad/time); 0 is the
    /// dephasing case.
    pub splitting: f64,
    /// Wave speed fixing w_k = c |k|.
    pub sound_speed: f64,
    pub modes: Vec<ModeSpec>,
    /// Levels kept per mode.
    pub truncation: usize,
    pub bath: BathInit,
}

impl FockSystem {
    pub fn new(
        positions: Vec<[f64; 3]>,
        splitting: f64,
        sound_speed: f64,
        modes: Vec<ModeSpec>,
        truncation: usize,
        bath: BathInit,
    ) -> Result<Self> {
        let sys = FockSystem {
            positions,
            splitting,
            sound_speed,
            modes,
            truncation,
            bath,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions.is_empty() {
            return Err(Error::Domain("system needs at least one spin".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Domain("system needs at least one mode".into()));
        }
        if !(self.splitting >= 0.0) {
            return Err(Error::Domain(format!(
                "splitting must be >= 0, got {}",
                self.splitting
            )));
        }
        if !(self.sound_speed > 0.0) {
            return Err(Error::Domain(format!(
                "sound_speed must be > 0, got {}",
                self.sound_speed
            )));
        }
        if self.truncation < 2 {
            return Err(Error::Domain(format!(
                "truncation must be >= 2, got {}",
                self.truncation
            )));
        }
        for (i, m) in self.modes.iter().enumerate() {
            if !(m.wavenumber() > 0.0) {
                return Err(Error::Domain(format!(
                    "mode {i} has |k| = 0; its frequency would vanish"
                )));
            }
            if !m.coupling.is_finite() {
                return Err(Error::Domain(format!("mode {i} coupling is not finite")));
            }
        }
        // 2^N d^M <= 2^20
        let mut dim = 1usize << self.positions.len();
        for _ in &self.modes {
            dim = dim
                .checked_mul(self.truncation)
                .filter(|&d| d <= DIMENSION_LIMIT)
                .ok_or_else(|| {
                    Error::Capacity(format!(
                        "joint dimension 2^{} * {}^{} exceeds {DIMENSION_LIMIT}",
                        self.positions.len(),
                        self.truncation,
                        self.modes.len()
                    ))
                })?;
        }
        if let BathInit::Thermal { temperature } = self.bath {
            if !(temperature > 0.0) {
                return Err(Error::Domain(format!(
                    "thermal bath needs temperature > 0, got {temperature}"
                )));
            }
            for m in &self.modes {
                let x = (-self.frequency(m) / temperature).exp();
                let tail = x.powi(self.truncation as i32);
                if tail >= THERMAL_TAIL_LIMIT {
                    return Err(Error::TruncationTail {
                        truncation: self.truncation,
                        tail,
                        limit: THERMAL_TAIL_LIMIT,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn spins(&self) -> usize {
        self.positions.len()
    }

    pub fn spin_dim(&self) -> usize {
        1 << self.positions.len()
    }

    pub fn bath_dim(&self) -> usize {
        self.truncation.pow(self.modes.len() as u32)
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * self.bath_dim()
    }

    /// w_k = c |k|, enforced by construction.
    pub fn frequency(&self, mode: &ModeSpec) -> f64 {
        self.sound_speed * mode.wavenumber()
    }

    /// Same system with a different per-mode truncation.
    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        let mut sys = self.clone();
        sys.truncation = truncation;
        sys.validate()?;
        Ok(sys)
    }

    /// Same system with every coupling scaled by `factor`.
    pub fn with_coupling_scale(&self, factor: f64) -> Result<Self> {
        let mut sys = self.clone();
        for m in &mut sys.modes {
            m.coupling *= factor;
        }
        sys.validate()?;
        Ok(sys)
    }

    /// k . r_j phase of spin j against mode k.
    fn phase(&self, mode: &ModeSpec, j: usize) -> f64 {
        let r = self.positions[j];
        mode.wavevector[0] * r[0] + mode.wavevector[1] * r[1] + mode.wavevector[2] * r[2]
    }

    /// Collective coupling operator Ztilde_k = sum_j Z_j e^{-i k . r_j}
    /// on the spin factor.
    pub fn ztilde(&self, mode: &ModeSpec) -> CMat {
        let n = self.spins();
        let mut out = CMat::zeros(self.spin_dim(), self.spin_dim());
        let z = ops::pauli_z();
        for j in 0..n {
            let phase = Complex64::from_polar(1.0, -self.phase(mode, j));
            out += ops::spin_operator(&z, j, n) * phase;
        }
        out
    }

    /// Spin Hamiltonian sum_j (Delta/2) X_j.
    pub fn spin_hamiltonian(&self) -> CMat {
        let n = self.spins();
        let mut out = CMat::zeros(self.spin_dim(), self.spin_dim());
        if self.splitting != 0.0 {
            let x = ops::pauli_x();
            for j in 0..n {
                out += ops::spin_operator(&x, j, n) * Complex64::new(0.5 * self.splitting, 0.0);
            }
        }
        out
    }

    /// Bath Hamiltonian sum_k w_k a_k^dag a_k on the mode factor.
    pub fn bath_hamiltonian(&self) -> CMat {
        let d = self.truncation;
        let m = self.modes.len();
        let mut out = CMat::zeros(self.bath_dim(), self.bath_dim());
        let number = ops::ladder(d).adjoint() * ops::ladder(d);
        for (k, mode) in self.modes.iter().enumerate() {
            out += ops::mode_operator(&number, k, m, d) * Complex64::new(self.frequency(mode), 0.0);
        }
        out
    }

    /// Energy of one bath occupation multi-index.
    pub fn bath_energy(&self, bath_index: usize) -> f64 {
        self.bath_occupations(bath_index)
            .iter()
            .zip(&self.modes)
            .map(|(&n, mode)| n as f64 * self.frequency(mode))
            .sum()
    }

    /// Occupations (n_0, ..., n_{M-1}) of a flat bath index; mode 0 is
    /// the most significant digit.
    pub fn bath_occupations(&self, mut bath_index: usize) -> Vec<usize> {
        let m = self.modes.len();
        let d = self.truncation;
        let mut occ = vec![0usize; m];
        for k in (0..m).rev() {
            occ[k] = bath_index % d;
            bath_index /= d;
        }
        occ
    }

    /// Ensemble of bath basis states with their statistical weights;
    /// vacuum is the single member (0, 1). Thermal weights are the
    /// per-mode geometric distribution renormalized inside the
    /// truncation (the discarded tail is below [`THERMAL_TAIL_LIMIT`]).
    pub fn bath_ensemble(&self) -> Vec<(usize, f64)> {
        match self.bath {
            BathInit::Vacuum => vec![(0, 1.0)],
            BathInit::Thermal { temperature } => {
                let d = self.truncation;
                let per_mode: Vec<Vec<f64>> = self
                    .modes
                    .iter()
                    .map(|m| {
                        let x = (-self.frequency(m) / temperature).exp();
                        let norm: f64 = (0..d).map(|n| x.powi(n as i32)).sum();
                        (0..d).map(|n| x.powi(n as i32) / norm).collect()
                    })
                    .collect();
                (0..self.bath_dim())
                    .map(|b| {
                        let w: f64 = self
                            .bath_occupations(b)
                            .iter()
                            .zip(&per_mode)
                            .map(|(&n, probs)| probs[n])
                            .product();
                        (b, w)
                    })
                    .filter(|&(_, w)| w > 1e-14)
                    .collect()
            }
        }
    }

    /// Assemble the full truncated Hamiltonian.
    pub fn build_hamiltonian(&self) -> Result<CMat> {
        self.validate()?;
        let d = self.truncation;
        let m = self.modes.len();
        let spin_id = ops::identity(self.spin_dim());
        let bath_id = ops::identity(self.bath_dim());

        let mut h = self.spin_hamiltonian().kronecker(&bath_id);
        h += spin_id.kronecker(&self.bath_hamiltonian());
        let a1 = ops::ladder(d);
        for (k, mode) in self.modes.iter().enumerate() {
            let zt = self.ztilde(mode);
            let adag = ops::mode_operator(&a1.adjoint(), k, m, d);
            let a = ops::mode_operator(&a1, k, m, d);
            let g = Complex64::new(mode.coupling, 0.0);
            h += (zt.kronecker(&adag) + zt.adjoint().kronecker(&a)) * g;
        }
        Ok(h)
    }

    /// Displacement operator phi_j(t) on the bath factor:
    /// sum_k [ f_k(r_j, t) a_k^dag - f_k(r_j, t)^* a_k ] with
    /// f_k = (g_k / w_k) e^{-i k . r_j} (1 - e^{i w_k t}).
    pub fn displacement_operator(&self, j: usize, t: f64) -> CMat {
        let d = self.truncation;
        let m = self.modes.len();
        let a1 = ops::ladder(d);
        let mut out = CMat::zeros(self.bath_dim(), self.bath_dim());
        for (k, mode) in self.modes.iter().enumerate() {
            let w = self.frequency(mode);
            let f = (mode.coupling / w)
                * Complex64::from_polar(1.0, -self.phase(mode, j))
                * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, w * t));
            let adag = ops::mode_operator(&a1.adjoint(), k, m, d);
            let a = ops::mode_operator(&a1, k, m, d);
            out += adag * f - a * f.conj();
        }
        out
    }

    /// Deterministic bath-mediated phase operator on the spin factor:
    /// sum_k (g_k^2 / w_k^2) Ztilde_k Ztilde_k^dag [ w_k t - sin(w_k t) ].
    pub fn effective_phase_operator(&self, t: f64) -> CMat {
        let mut out = CMat::zeros(self.spin_dim(), self.spin_dim());
        for mode in &self.modes {
            let w = self.frequency(mode);
            let zt = self.ztilde(mode);
            let weight = (mode.coupling / w).powi(2) * (w * t - (w * t).sin());
            out += &zt * zt.adjoint() * Complex64::new(weight, 0.0);
        }
        out
    }
}
