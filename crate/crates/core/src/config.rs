//! Sectioned run configuration for the command-line front end.
//!
//! The file format is TOML; every job section is optional and each
//! subcommand validates that its own section is present. Internal units
//! are natural (hbar = k_B = 1) with the time unit declared, not
//! converted — declared units are echoed into every artifact.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::correlation::{Channel, QubitLayout};
use crate::error::{Error, Result};
use crate::oracle::{BathInit, BathSector, ModeSpec};
use crate::quad::QuadOptions;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bath: BathSection,
    pub layout: LayoutSection,
    #[serde(default)]
    pub units: UnitsSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub corr: Option<CorrJob>,
    #[serde(default)]
    pub amps: Option<AmpsJob>,
    #[serde(default)]
    pub threshold: Option<ThresholdJob>,
    #[serde(default)]
    pub dfs_check: Option<DfsCheckJob>,
    #[serde(default)]
    pub oracle: Option<OracleJob>,
    #[serde(default)]
    pub validate: Option<ValidateJob>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub coupling_strength: f64,
    #[serde(default = "default_spectral_exponent")]
    pub spectral_exponent: f64,
    pub cutoff: f64,
    pub sound_speed: f64,
    #[serde(default)]
    pub temperature: f64,
}

fn default_spectral_exponent() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    pub positions: Vec<[f64; 3]>,
    #[serde(default)]
    pub splitting: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSection {
    /// Name of the time unit all inputs are expressed in (hbar = k_B = 1
    /// internally); informational, echoed into artifacts.
    pub time: String,
}

impl Default for UnitsSection {
    fn default() -> Self {
        UnitsSection {
            time: "natural".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
    /// |ratio| below this is labeled independent.
    pub regime_independent: f64,
    /// |ratio| above this is labeled correlated.
    pub regime_correlated: f64,
    /// Allowed deviation of amplitude ratios from 1.
    pub independence_delta: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        let q = QuadOptions::default();
        ToleranceSection {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_segments: q.max_segments,
            regime_independent: 0.1,
            regime_correlated: 0.9,
            independence_delta: 0.1,
        }
    }
}

impl ToleranceSection {
    pub fn quad_options(&self, scale: f64) -> QuadOptions {
        QuadOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_segments: self.max_segments,
        }
        .scaled(scale)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrJob {
    pub times: Vec<f64>,
    pub channel: Channel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmpsJob {
    pub time: f64,
    pub channel: Channel,
    pub patterns: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdJob {
    pub p_th: f64,
    pub weights: Vec<u64>,
    pub p1_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfsCheckJob {
    /// JSON file holding a list of states, each a list of [re, im]
    /// amplitude pairs.
    pub states_file: PathBuf,
    pub time: f64,
    pub channel: Channel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleJob {
    pub jobs: Vec<OracleJobSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum OracleJobSpec {
    /// Factorized-propagator check (splitting must be 0).
    Decomposition {
        modes: Vec<ModeSpec>,
        truncation: usize,
        time: f64,
        #[serde(default = "default_sector")]
        sector: BathSector,
    },
    /// Coupling-power sweep of the weak-coupling transformation.
    Canonical {
        modes: Vec<ModeSpec>,
        truncation: usize,
        time: f64,
        factors: Vec<f64>,
    },
    /// Long-wavelength decoupling check of a register state.
    DfsDecoupling {
        modes: Vec<ModeSpec>,
        truncation: usize,
        time: f64,
        bath: BathInit,
        /// Amplitudes as [re, im] pairs; length 2^N.
        state: Vec<[f64; 2]>,
    },
    /// Plain evolution with reduced-state diagnostics.
    Evolve {
        modes: Vec<ModeSpec>,
        truncation: usize,
        time: f64,
        bath: BathInit,
        state: Vec<[f64; 2]>,
    },
}

fn default_sector() -> BathSector {
    BathSector::Vacuum
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateJob {
    /// Criteria ids to run; empty means all.
    pub criteria: Vec<u32>,
    pub mc_samples: usize,
}

impl Default for ValidateJob {
    fn default() -> Self {
        ValidateJob {
            criteria: Vec::new(),
            mc_samples: 10_000_000,
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Built-in defaults used when no --config is given: a compact ohmic
    /// demonstration register.
    pub fn builtin_default() -> Self {
        RunConfig {
            bath: BathSection {
                coupling_strength: 1.0,
                spectral_exponent: 1.0,
                cutoff: 1.0,
                sound_speed: 1.0,
                temperature: 0.0,
            },
            layout: LayoutSection {
                positions: vec![
                    [0.0, 0.0, 0.0],
                    [std::f64::consts::PI, 0.0, 0.0],
                    [2.0 * std::f64::consts::PI, 0.0, 0.0],
                    [3.0 * std::f64::consts::PI, 0.0, 0.0],
                ],
                splitting: 1.0,
            },
            units: UnitsSection::default(),
            tolerances: ToleranceSection::default(),
            output: OutputSection::default(),
            corr: Some(CorrJob {
                times: vec![50.0, 200.0, 1000.0],
                channel: Channel::BitflipZ,
            }),
            amps: Some(AmpsJob {
                time: 1000.0,
                channel: Channel::BitflipZ,
                patterns: vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3]],
            }),
            threshold: Some(ThresholdJob {
                p_th: 1e-3,
                weights: vec![1, 2, 4, 8, 16],
                p1_values: vec![1e-5, 1e-4, 5e-4, 1e-3],
            }),
            dfs_check: None,
            oracle: None,
            validate: Some(ValidateJob::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bath_spec()?.validate()?;
        let layout = self.qubit_layout()?;
        layout.validate()?;
        let n = layout.len();

        if let Some(corr) = &self.corr {
            if corr.times.is_empty() {
                return Err(Error::Config("corr.times must be non-empty".into()));
            }
            for (i, &t) in corr.times.iter().enumerate() {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::Config(format!(
                        "corr.times[{i}] must be finite and >= 0, got {t}"
                    )));
                }
            }
        }
        if let Some(amps) = &self.amps {
            if amps.patterns.is_empty() {
                return Err(Error::Config("amps.patterns must be non-empty".into()));
            }
            for (i, pattern) in amps.patterns.iter().enumerate() {
                for &q in pattern {
                    if q >= n {
                        return Err(Error::Config(format!(
                            "amps.patterns[{i}] references qubit {q}, layout has {n}"
                        )));
                    }
                }
            }
        }
        if let Some(th) = &self.threshold {
            if th.weights.is_empty() || th.p1_values.is_empty() {
                return Err(Error::Config(
                    "threshold.weights and threshold.p1_values must be non-empty".into(),
                ));
            }
            if !(th.p_th > 0.0 && th.p_th < 1.0) {
                return Err(Error::Config(format!(
                    "threshold.p_th must be in (0, 1), got {}",
                    th.p_th
                )));
            }
            for &p1 in &th.p1_values {
                if !(0.0..=1.0).contains(&p1) {
                    return Err(Error::Config(format!(
                        "threshold.p1_values entry {p1} outside [0, 1]"
                    )));
                }
            }
        }
        let t = &self.tolerances;
        if !(0.0 < t.regime_independent && t.regime_independent < t.regime_correlated
            && t.regime_correlated < 1.0)
        {
            return Err(Error::Config(format!(
                "regime thresholds must satisfy 0 < independent < correlated < 1, got {} and {}",
                t.regime_independent, t.regime_correlated
            )));
        }
        Ok(())
    }

    pub fn bath_spec(&self) -> Result<BathSpec> {
        BathSpec::new(
            self.bath.coupling_strength,
            self.bath.spectral_exponent,
            self.bath.cutoff,
            self.bath.sound_speed,
            self.bath.temperature,
        )
        .map_err(|e| Error::Config(format!("bath section: {e}")))
    }

    pub fn qubit_layout(&self) -> Result<QubitLayout> {
        QubitLayout::new(self.layout.positions.clone(), self.layout.splitting)
            .map_err(|e| Error::Config(format!("layout section: {e}")))
    }
}
