//! Command-line front end: config-driven correlation matrices, amplitude
//! reports, threshold sweeps, decoherence-free-subspace residuals, exact
//! propagator jobs and the validation suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use spinboson::config::{OracleJobSpec, OutputFormat, RunConfig};
use spinboson::correlation::{build_contraction_matrix, ContractionMatrix};
use spinboson::dfs::{collective_z_residual, dfs_decoupling_check, RegisterState};
use spinboson::error::{Error, Result};
use spinboson::oracle::{self, BathInit, FockSystem, ModeSpec};
use spinboson::report::{atomic_write, fmt_sci, write_json};
use spinboson::suite::{self, SuiteOptions};
use spinboson::threshold::{self, Prefactor, ThresholdQuery};
use spinboson::wick::{independence_deviation, ErrorPattern};
use spinboson::QuadOptions;

#[derive(Parser, Debug)]
#[command(
    name = "spinboson",
    version,
    about = "Spatial error correlations of a qubit register in a common boson bath",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; built-in defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Artifact format (overrides the config).
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Worker threads for matrix assembly and matching sums.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Multiplies every tolerance window (> 1 loosens).
    #[arg(long, global = true, default_value_t = 1.0, value_name = "X")]
    tolerance_scale: f64,

    /// Seed for the Monte Carlo oracle inside `validate`.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contraction matrices and regime labels over the configured times.
    Corr,
    /// Amplitude reports for the configured error patterns.
    Amps,
    /// Failure-rate sweep over weights and single-error probabilities.
    Threshold,
    /// Collective-weight and decoupling residuals for supplied states.
    DfsCheck,
    /// Exact-propagator validation jobs.
    Oracle,
    /// Run the validation suite; exits 2 if any criterion fails.
    Validate,
}

/// Everything that determined a run, echoed into each artifact.
#[derive(Debug, Serialize)]
struct EffectiveConfig<'a> {
    run: &'a RunConfig,
    out_dir: &'a PathBuf,
    format: OutputFormat,
    tolerance_scale: f64,
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // treat usage problems as config errors: exit 1
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS // --help / --version
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))?;
    }
    let config = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::builtin_default(),
    };
    let out_dir = cli.out.clone().unwrap_or_else(|| config.output.dir.clone());
    let format = cli.format.unwrap_or(config.output.format);
    let seed = cli.seed.unwrap_or(SuiteOptions::default().seed);
    let echo = EffectiveConfig {
        run: &config,
        out_dir: &out_dir,
        format,
        tolerance_scale: cli.tolerance_scale,
        seed,
    };
    let quad = config.tolerances.quad_options(cli.tolerance_scale);

    let code = match cli.command {
        Command::Corr => corr(&config, &echo, &quad),
        Command::Amps => amps(&config, &echo, &quad),
        Command::Threshold => threshold_sweep(&config, &echo),
        Command::DfsCheck => dfs_check(&config, &echo, &quad),
        Command::Oracle => oracle_jobs(&config, &echo),
        Command::Validate => validate(&config, &echo, cli.tolerance_scale, seed),
    }?;

    // every completed run leaves its fully resolved configuration next
    // to the artifacts; JSON artifacts embed it as well
    let mut echo_text = serde_json::to_string_pretty(&echo)?;
    echo_text.push('\n');
    atomic_write(&out_dir.join("config_echo.json"), echo_text.as_bytes())?;
    Ok(code)
}

fn corr(config: &RunConfig, echo: &EffectiveConfig, quad: &QuadOptions) -> Result<ExitCode> {
    let job = config
        .corr
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [corr] section".into()))?;
    let bath = config.bath_spec()?;
    let layout = config.qubit_layout()?;
    let t_section = &config.tolerances;

    #[derive(Serialize)]
    struct CorrData {
        matrices: Vec<ContractionMatrix>,
        regimes: Vec<spinboson::RegimeReport>,
    }
    let mut data = CorrData {
        matrices: Vec::new(),
        regimes: Vec::new(),
    };
    for (idx, &t) in job.times.iter().enumerate() {
        let c = build_contraction_matrix(&bath, &layout, t, job.channel, quad)?;
        let regime = c.classify_regime(t_section.regime_independent, t_section.regime_correlated)?;
        println!(
            "t = {}: global regime {:?} ({} pairs)",
            fmt_sci(t),
            regime.global,
            regime.pairs.len()
        );
        for p in &regime.pairs {
            println!("  ({}, {}) ratio {} -> {:?}", p.j, p.m, fmt_sci(p.ratio), p.label);
        }
        if echo.format == OutputFormat::Csv {
            let mut buf = Vec::new();
            c.write_csv(&mut buf)?;
            atomic_write(&echo.out_dir.join(format!("corr_{idx:03}.csv")), &buf)?;
        }
        data.matrices.push(c);
        data.regimes.push(regime);
    }
    if echo.format == OutputFormat::Json {
        write_json(&echo.out_dir.join("corr.json"), echo, &data)?;
    } else {
        // ratios summary next to the per-time matrices
        let mut buf = String::from("time,j,m,ratio,label\n");
        for r in &data.regimes {
            for p in &r.pairs {
                buf.push_str(&format!(
                    "{},{},{},{},{:?}\n",
                    fmt_sci(r.time),
                    p.j,
                    p.m,
                    fmt_sci(p.ratio),
                    p.label
                ));
            }
        }
        atomic_write(&echo.out_dir.join("corr_summary.csv"), buf.as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn amps(config: &RunConfig, echo: &EffectiveConfig, quad: &QuadOptions) -> Result<ExitCode> {
    let job = config
        .amps
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [amps] section".into()))?;
    let bath = config.bath_spec()?;
    let layout = config.qubit_layout()?;
    let c = build_contraction_matrix(&bath, &layout, job.time, job.channel, quad)?;
    let patterns: Vec<ErrorPattern> = job
        .patterns
        .iter()
        .map(|q| ErrorPattern::new(q.clone(), job.channel))
        .collect::<Result<_>>()?;
    let reports = independence_deviation(&c, &patterns, config.tolerances.independence_delta)?;

    println!("pattern        A_n^2          prod A_1^2     ratio        matchings  independent?");
    for r in &reports {
        let ids: Vec<String> = r.qubits.iter().map(|q| q.to_string()).collect();
        println!(
            "{:<14} {} {} {} {:>9}  {}",
            ids.join("-"),
            fmt_sci(r.amplitude_sq),
            fmt_sci(r.independent_product),
            fmt_sci(r.enhancement_ratio),
            r.matching_count,
            if r.violates_independence { "no" } else { "yes" }
        );
    }

    match echo.format {
        OutputFormat::Json => write_json(&echo.out_dir.join("amplitudes.json"), echo, &reports)?,
        OutputFormat::Csv => {
            let mut buf =
                String::from("pattern,channel,amplitude_sq,independent_product,ratio,matchings,violates\n");
            for r in &reports {
                let ids: Vec<String> = r.qubits.iter().map(|q| q.to_string()).collect();
                buf.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    ids.join("-"),
                    r.channel,
                    fmt_sci(r.amplitude_sq),
                    fmt_sci(r.independent_product),
                    fmt_sci(r.enhancement_ratio),
                    r.matching_count,
                    r.violates_independence
                ));
            }
            atomic_write(&echo.out_dir.join("amplitudes.csv"), buf.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn threshold_sweep(config: &RunConfig, echo: &EffectiveConfig) -> Result<ExitCode> {
    let job = config
        .threshold
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [threshold] section".into()))?;

    #[derive(Serialize)]
    struct Row {
        n: u64,
        p1: f64,
        p_fail_indep: f64,
        p_fail_corr: f64,
        p_fail_corr_exact: f64,
        breakdown: f64,
    }
    let mut rows = Vec::new();
    for &n in &job.weights {
        for &p1 in &job.p1_values {
            let q = ThresholdQuery::new(p1, job.p_th, n)?;
            rows.push(Row {
                n,
                p1,
                p_fail_indep: threshold::independent_pfail(&q),
                p_fail_corr: threshold::correlated_pfail(&q, Prefactor::Asymptotic),
                p_fail_corr_exact: threshold::correlated_pfail(&q, Prefactor::Exact),
                breakdown: threshold::breakdown_point(job.p_th, n),
            });
        }
    }
    println!("n, P_1, P_fail_indep, P_fail_corr, breakdown");
    for r in &rows {
        println!(
            "{}, {}, {}, {}, {}",
            r.n,
            fmt_sci(r.p1),
            fmt_sci(r.p_fail_indep),
            fmt_sci(r.p_fail_corr),
            fmt_sci(r.breakdown)
        );
    }
    match echo.format {
        OutputFormat::Json => write_json(&echo.out_dir.join("threshold.json"), echo, &rows)?,
        OutputFormat::Csv => {
            let mut buf = String::from("n,P_1,P_fail_indep,P_fail_corr,breakdown\n");
            for r in &rows {
                buf.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    fmt_sci(r.p1),
                    fmt_sci(r.p_fail_indep),
                    fmt_sci(r.p_fail_corr),
                    fmt_sci(r.breakdown)
                ));
            }
            atomic_write(&echo.out_dir.join("threshold.csv"), buf.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_states(path: &std::path::Path) -> Result<Vec<Vec<Complex64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(raw
        .into_iter()
        .map(|s| s.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        .collect())
}

fn dfs_check(config: &RunConfig, echo: &EffectiveConfig, quad: &QuadOptions) -> Result<ExitCode> {
    let job = config
        .dfs_check
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [dfs_check] section".into()))?;
    let bath = config.bath_spec()?;
    let layout = config.qubit_layout()?;
    let n = layout.len();
    let c = build_contraction_matrix(&bath, &layout, job.time, job.channel, quad)?;

    #[derive(Serialize)]
    struct StateReport {
        index: usize,
        collective_residual: f64,
        decoherence_exponent: f64,
    }
    let mut reports = Vec::new();
    for (index, amplitudes) in parse_states(&job.states_file)?.into_iter().enumerate() {
        let state = RegisterState::new(n, amplitudes)
            .map_err(|e| Error::Config(format!("state {index}: {e}")))?;
        let residual = collective_z_residual(&state);
        let exponent = dfs_decoupling_check(&c, &state)?;
        println!(
            "state {index}: collective residual {}, decoherence exponent {}",
            fmt_sci(residual),
            fmt_sci(exponent)
        );
        reports.push(StateReport {
            index,
            collective_residual: residual,
            decoherence_exponent: exponent,
        });
    }
    match echo.format {
        OutputFormat::Json => write_json(&echo.out_dir.join("dfs_check.json"), echo, &reports)?,
        OutputFormat::Csv => {
            let mut buf = String::from("state,collective_residual,decoherence_exponent\n");
            for r in &reports {
                buf.push_str(&format!(
                    "{},{},{}\n",
                    r.index,
                    fmt_sci(r.collective_residual),
                    fmt_sci(r.decoherence_exponent)
                ));
            }
            atomic_write(&echo.out_dir.join("dfs_check.csv"), buf.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle_jobs(config: &RunConfig, echo: &EffectiveConfig) -> Result<ExitCode> {
    let job = config
        .oracle
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [oracle] section".into()))?;
    let layout = config.qubit_layout()?;
    let sound_speed = config.bath.sound_speed;

    #[derive(Serialize)]
    #[serde(tag = "kind", rename_all = "kebab-case")]
    enum JobReport {
        Decomposition {
            spec: OracleJobSpec,
            norm_difference: f64,
            max_commutator_norm: f64,
        },
        Canonical {
            spec: OracleJobSpec,
            exponent: f64,
            infidelities: Vec<(f64, f64)>,
        },
        DfsDecoupling {
            spec: OracleJobSpec,
            decoupling_fidelity: f64,
            spin_purity: f64,
            converged: bool,
        },
        Evolve {
            spec: OracleJobSpec,
            purity: f64,
            initial_fidelity: f64,
            max_coherence: f64,
            converged: bool,
        },
    }

    let system = |modes: &Vec<ModeSpec>, truncation: usize, bath: BathInit, splitting: f64| {
        FockSystem::new(
            layout.positions.clone(),
            splitting,
            sound_speed,
            modes.clone(),
            truncation,
            bath,
        )
    };
    let register = |state: &Vec<[f64; 2]>| -> Result<RegisterState> {
        RegisterState::new(
            layout.len(),
            state.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    };

    let mut reports = Vec::new();
    for spec in &job.jobs {
        let report = match spec {
            OracleJobSpec::Decomposition {
                modes,
                truncation,
                time,
                sector,
            } => {
                let sys = system(modes, *truncation, BathInit::Vacuum, 0.0)?;
                let rep = oracle::verify_dephasing_decomposition(&sys, *time, *sector)?;
                println!(
                    "decomposition: norm difference {} (commutator {})",
                    fmt_sci(rep.norm_difference),
                    fmt_sci(rep.max_commutator_norm)
                );
                JobReport::Decomposition {
                    spec: spec.clone(),
                    norm_difference: rep.norm_difference,
                    max_commutator_norm: rep.max_commutator_norm,
                }
            }
            OracleJobSpec::Canonical {
                modes,
                truncation,
                time,
                factors,
            } => {
                let sys = system(modes, *truncation, BathInit::Vacuum, layout.splitting)?;
                let rep = oracle::verify_canonical_transformation(&sys, *time, factors)?;
                println!("canonical sweep: exponent {:.3}", rep.exponent);
                JobReport::Canonical {
                    spec: spec.clone(),
                    exponent: rep.exponent,
                    infidelities: rep.infidelities,
                }
            }
            OracleJobSpec::DfsDecoupling {
                modes,
                truncation,
                time,
                bath,
                state,
            } => {
                let sys = system(modes, *truncation, *bath, 0.0)?;
                let rep = oracle::verify_dfs_decoupling(&sys, &register(state)?, *time)?;
                println!(
                    "dfs decoupling: fidelity {}, purity {}",
                    fmt_sci(rep.decoupling_fidelity),
                    fmt_sci(rep.spin_purity)
                );
                JobReport::DfsDecoupling {
                    spec: spec.clone(),
                    decoupling_fidelity: rep.decoupling_fidelity,
                    spin_purity: rep.spin_purity,
                    converged: rep.converged,
                }
            }
            OracleJobSpec::Evolve {
                modes,
                truncation,
                time,
                bath,
                state,
            } => {
                let sys = system(modes, *truncation, *bath, layout.splitting)?;
                let rep = oracle::evolve(&sys, &register(state)?, *time)?;
                println!(
                    "evolve: purity {}, max coherence {}, converged {}",
                    fmt_sci(rep.purity),
                    fmt_sci(rep.max_coherence),
                    rep.converged
                );
                JobReport::Evolve {
                    spec: spec.clone(),
                    purity: rep.purity,
                    max_coherence: rep.max_coherence,
                    converged: rep.converged,
                }
            }
        };
        reports.push(report);
    }
    write_json(&echo.out_dir.join("oracle.json"), echo, &reports)?;
    Ok(ExitCode::SUCCESS)
}

fn validate(
    config: &RunConfig,
    echo: &EffectiveConfig,
    tolerance_scale: f64,
    seed: u64,
) -> Result<ExitCode> {
    let job = config.validate.clone().unwrap_or_default();
    let opts = SuiteOptions {
        seed,
        tolerance_scale,
        mc_samples: job.mc_samples,
    };
    let outcomes = if job.criteria.is_empty() {
        suite::run_all(&opts)
    } else {
        suite::run_selected(&job.criteria, &opts)
    };
    let mut all_passed = true;
    for o in &outcomes {
        println!(
            "{} criterion {:>2}: {} [{:.2}s] {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.seconds,
            o.detail
        );
        all_passed &= o.passed;
    }
    write_json(&echo.out_dir.join("validate.json"), echo, &outcomes)?;
    if all_passed {
        println!("validation suite: all {} criteria passed", outcomes.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("validation suite: FAILURES present");
        Ok(ExitCode::from(2))
    }
}
