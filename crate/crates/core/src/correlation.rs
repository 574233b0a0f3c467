//! Assembly of the N x N matrix of equal-time two-point contractions for
//! a qubit layout, plus the correlation-ratio diagnostics used to decide
//! whether the register sees independent, intermediate or fully
//! correlated noise.

use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::{self, BathSpec, KernelQuery};
use crate::error::{Error, Result};
use crate::quad::QuadOptions;
use crate::report::fmt_sci;

/// Which two-point function the matrix holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// Z-error contractions of the exactly solvable zero-splitting case.
    DephasingZ,
    /// Z-error contractions in the recentered (splitting > 0) frame.
    BitflipZ,
    /// Y-error contractions; same kernel magnitude as `BitflipZ`, the
    /// sign difference sits purely in the operator ordering.
    BitflipY,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Channel::DephasingZ => "dephasing-z",
            Channel::BitflipZ => "bitflip-z",
            Channel::BitflipY => "bitflip-y",
        };
        f.write_str(s)
    }
}

/// Positions of the register qubits and their shared local splitting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QubitLayout {
    pub positions: Vec<[f64; 3]>,
    /// Local splitting Delta shared by all qubits (rad/time).
    pub splitting: f64,
}

impl QubitLayout {
    pub fn new(positions: Vec<[f64; 3]>, splitting: f64) -> Result<Self> {
        let layout = QubitLayout {
            positions,
            splitting,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions.is_empty() {
            return Err(Error::Domain("layout needs at least one qubit".into()));
        }
        for (i, p) in self.positions.iter().enumerate() {
            if !p.iter().all(|x| x.is_finite()) {
                return Err(Error::Domain(format!("position {i} is not finite")));
            }
        }
        if !(self.splitting >= 0.0) {
            return Err(Error::Domain(format!(
                "splitting must be >= 0, got {}",
                self.splitting
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distance(&self, j: usize, m: usize) -> f64 {
        let a = self.positions[j];
        let b = self.positions[m];
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

/// N x N matrix of equal-time contractions `C[j][m]` at a fixed time.
///
/// Symmetric with real non-negative diagonal; off-diagonals obey the
/// Cauchy-Schwarz bound `|C[j][m]| <= sqrt(C[j][j] C[m][m])` up to
/// quadrature error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionMatrix {
    n: usize,
    pub time: f64,
    pub channel: Channel,
    pub splitting: f64,
    /// Row-major entries; imaginary parts are zero for the isotropic
    /// kernels but the slot is part of the schema.
    entries: Vec<Complex64>,
    /// Worst per-entry quadrature error bound.
    pub max_abs_error: f64,
}

impl ContractionMatrix {
    /// Wrap precomputed entries, enforcing the matrix invariants.
    pub fn from_entries(
        n: usize,
        entries: Vec<Complex64>,
        time: f64,
        channel: Channel,
        splitting: f64,
        max_abs_error: f64,
    ) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        let m = ContractionMatrix {
            n,
            time,
            channel,
            splitting,
            entries,
            max_abs_error,
        };
        m.validate()?;
        Ok(m)
    }

    /// Uniform synthetic matrix: `diag` on the diagonal, `offdiag`
    /// elsewhere. `offdiag = diag` is the fully correlated (rank-one)
    /// limit; `offdiag = 0` the independent one.
    pub fn uniform(n: usize, diag: f64, offdiag: f64, channel: Channel) -> Result<Self> {
        let mut entries = vec![Complex64::new(offdiag, 0.0); n * n];
        for j in 0..n {
            entries[j * n + j] = Complex64::new(diag, 0.0);
        }
        Self::from_entries(n, entries, 0.0, channel, 0.0, 0.0)
    }

    fn validate(&self) -> Result<()> {
        let tol = 1e-10_f64.max(10.0 * self.max_abs_error);
        for j in 0..self.n {
            let d = self.get(j, j);
            if d.im.abs() > tol.max(1e-10 * d.norm()) {
                return Err(Error::InvariantViolation(format!(
                    "diagonal entry {j} has imaginary residual {}",
                    d.im
                )));
            }
            if d.re < -tol {
                return Err(Error::InvariantViolation(format!(
                    "diagonal entry {j} is negative: {}",
                    d.re
                )));
            }
        }
        for j in 0..self.n {
            for m in (j + 1)..self.n {
                let a = self.get(j, m);
                let b = self.get(m, j);
                if (a - b).norm() > tol.max(1e-12 * a.norm()) {
                    return Err(Error::InvariantViolation(format!(
                        "asymmetric entries at ({j},{m})"
                    )));
                }
                let bound = (self.get(j, j).re.max(0.0) * self.get(m, m).re.max(0.0)).sqrt();
                if a.norm() > bound + tol + 1e-9 * bound {
                    return Err(Error::InvariantViolation(format!(
                        "entry ({j},{m}) = {} exceeds Cauchy-Schwarz bound {bound}",
                        a.re
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, m: usize) -> Complex64 {
        self.entries[j * self.n + m]
    }

    /// Real part of an entry; the imaginary residual is bounded by the
    /// validated tolerance.
    pub fn get_re(&self, j: usize, m: usize) -> f64 {
        self.get(j, m).re
    }

    /// `C[j][m] / sqrt(C[j][j] C[m][m])`.
    pub fn correlation_ratio(&self, j: usize, m: usize) -> Result<f64> {
        if j >= self.n || m >= self.n {
            return Err(Error::DimensionMismatch(format!(
                "pair ({j},{m}) out of range for n = {}",
                self.n
            )));
        }
        let dj = self.get(j, j).re;
        let dm = self.get(m, m).re;
        let floor = 1e-300;
        if dj <= floor || dm <= floor {
            return Err(Error::UndefinedRatio(format!(
                "vanishing self-correlation for pair ({j},{m}); the matrix was likely built at t = 0"
            )));
        }
        Ok(self.get(j, m).re / (dj * dm).sqrt())
    }

    /// Label each pair and the register as a whole.
    pub fn classify_regime(&self, theta_indep: f64, theta_corr: f64) -> Result<RegimeReport> {
        if !(0.0 < theta_indep && theta_indep < theta_corr && theta_corr < 1.0) {
            return Err(Error::Domain(format!(
                "thresholds must satisfy 0 < theta_indep < theta_corr < 1, got {theta_indep}, {theta_corr}"
            )));
        }
        let mut pairs = Vec::new();
        let mut global = RegimeLabel::Independent;
        for j in 0..self.n {
            for m in (j + 1)..self.n {
                let ratio = self.correlation_ratio(j, m)?;
                let label = if ratio.abs() < theta_indep {
                    RegimeLabel::Independent
                } else if ratio.abs() > theta_corr {
                    RegimeLabel::Correlated
                } else {
                    RegimeLabel::Intermediate
                };
                if label > global {
                    global = label;
                }
                pairs.push(PairRegime {
                    j,
                    m,
                    ratio,
                    label,
                });
            }
        }
        Ok(RegimeReport {
            time: self.time,
            channel: self.channel,
            pairs,
            global,
        })
    }

    /// CSV serialization: a comment line with the evaluation context, a
    /// header row, then one row per entry (row-major).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "# contraction-matrix t={} channel={} delta={} n={}",
            fmt_sci(self.time),
            self.channel,
            fmt_sci(self.splitting),
            self.n
        )?;
        writeln!(w, "j,m,value_re,value_im")?;
        for j in 0..self.n {
            for m in 0..self.n {
                let v = self.get(j, m);
                writeln!(w, "{j},{m},{},{}", fmt_sci(v.re), fmt_sci(v.im))?;
            }
        }
        Ok(())
    }
}

/// Pairwise regime label, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeLabel {
    Independent,
    Intermediate,
    Correlated,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PairRegime {
    pub j: usize,
    pub m: usize,
    pub ratio: f64,
    pub label: RegimeLabel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeReport {
    pub time: f64,
    pub channel: Channel,
    pub pairs: Vec<PairRegime>,
    /// Worst pair wins.
    pub global: RegimeLabel,
}

/// Evaluate the kernel for every qubit pair of `layout` at time `t`.
///
/// Lattice layouts repeat the same few separations many times, so kernel
/// quadrature runs once per distinct distance (distances agreeing to
/// 1e-12 relative share an evaluation) and distances fan out in parallel.
pub fn build_contraction_matrix(
    bath: &BathSpec,
    layout: &QubitLayout,
    t: f64,
    channel: Channel,
    opts: &QuadOptions,
) -> Result<ContractionMatrix> {
    bath.validate()?;
    layout.validate()?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let delta = match channel {
        Channel::DephasingZ => 0.0,
        Channel::BitflipZ | Channel::BitflipY => {
            if !(layout.splitting > 0.0) {
                return Err(Error::Domain(format!(
                    "channel {channel} requires splitting > 0, got {}",
                    layout.splitting
                )));
            }
            layout.splitting
        }
    };

    let n = layout.len();
    // distinct separations, merged at 1e-12 relative
    let mut distances: Vec<f64> = vec![0.0];
    let mut pair_distance = vec![0usize; n * n]; // index into `distances`
    for j in 0..n {
        for m in 0..n {
            if j == m {
                continue;
            }
            let r = layout.distance(j, m);
            let idx = distances
                .iter()
                .position(|&d| (d - r).abs() <= 1e-12 * d.max(r).max(1.0e-300))
                .unwrap_or_else(|| {
                    distances.push(r);
                    distances.len() - 1
                });
            pair_distance[j * n + m] = idx;
        }
    }

    let kernels: Vec<Result<f64>> = distances
        .par_iter()
        .map(|&r| {
            let q = KernelQuery::new(r, t, delta)?;
            let eval = match channel {
                Channel::DephasingZ => bath::dephasing_kernel(bath, &q, opts)?,
                // the Y channel shares the recentered kernel magnitude
                Channel::BitflipZ | Channel::BitflipY => bath::bitflip_kernel(bath, &q, opts)?,
            };
            Ok(eval.value)
        })
        .collect();

    // worst-pair attribution for failures: first (j, m) using the distance
    let mut values = Vec::with_capacity(distances.len());
    for (idx, k) in kernels.into_iter().enumerate() {
        match k {
            Ok(v) => values.push(v),
            Err(e) => {
                let (mut fj, mut fm) = (0, 0);
                'outer: for j in 0..n {
                    for m in 0..n {
                        if j != m && pair_distance[j * n + m] == idx {
                            fj = j;
                            fm = m;
                            break 'outer;
                        }
                    }
                }
                return Err(Error::KernelFailure {
                    j: fj,
                    m: fm,
                    source: Box::new(e),
                });
            }
        }
    }

    let abs_tol = opts.abs_tol.max(opts.rel_tol * values[0].abs());
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for m in 0..n {
            let v = if j == m {
                values[0]
            } else {
                values[pair_distance[j * n + m]]
            };
            entries[j * n + m] = Complex64::new(v, 0.0);
        }
    }
    ContractionMatrix::from_entries(n, entries, t, channel, delta, abs_tol)
}
