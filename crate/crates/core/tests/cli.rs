//! End-to-end tests of the command-line front end: exit codes, artifact
//! shapes and config-error reporting.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinboson"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spinboson-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

const COINCIDENT_CONFIG: &str = r#"
[bath]
coupling_strength = 1.0
spectral_exponent = 1.0
cutoff = 1.0
sound_speed = 1.0
temperature = 0.5

[layout]
positions = [[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]
splitting = 0.0

[corr]
times = [5.0]
channel = "dephasing-z"
"#;

#[test]
fn corr_with_coincident_qubits_emits_equal_entries() {
    let dir = scratch("corr");
    let config = dir.join("run.toml");
    write(&config, COINCIDENT_CONFIG);

    let out = bin()
        .args(["corr", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(dir.join("corr_000.csv")).unwrap();
    let mut diag = None;
    let mut off = None;
    for line in csv.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let (j, m) = (cols[0], cols[1]);
        if j == "0" && m == "0" {
            diag = Some(cols[2].to_string());
        }
        if j == "0" && m == "1" {
            off = Some(cols[2].to_string());
        }
    }
    // fully correlated limit: the off-diagonal equals the diagonal
    assert_eq!(diag.unwrap(), off.unwrap());
    // numeric cells use %.12e
    assert!(csv.contains("e+") || csv.contains("e-"));
}

#[test]
fn threshold_csv_has_the_specified_columns_and_fixed_point() {
    let dir = scratch("threshold");
    let out = bin()
        .args(["threshold", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(dir.join("threshold.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,P_1,P_fail_indep,P_fail_corr,breakdown");
    // built-in default sweep contains n = 1 with P_1 = P_th = 1e-3:
    // the independent failure rate equals P_1 exactly
    let row = lines
        .find(|l| l.starts_with("1,1.000000000000e-03"))
        .expect("n=1, P_1=P_th row present");
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[2], "1.000000000000e-03");
}

#[test]
fn validate_subset_exits_zero_and_writes_reparseable_json() {
    let dir = scratch("validate");
    let config = dir.join("run.toml");
    write(
        &config,
        r#"
[bath]
coupling_strength = 1.0
cutoff = 1.0
sound_speed = 1.0

[layout]
positions = [[0.0, 0.0, 0.0]]

[validate]
criteria = [2, 6]
"#,
    );
    let out = bin()
        .args(["validate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS criterion  2"));
    assert!(stdout.contains("PASS criterion  6"));

    // artifact re-parses and carries the fully resolved config echo
    let text = fs::read_to_string(dir.join("validate.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["data"].as_array().unwrap().len(), 2);
    assert_eq!(value["config"]["run"]["bath"]["cutoff"], 1.0);
    assert!(value["config"]["run"]["tolerances"]["abs_tol"].is_number());
}

#[test]
fn validate_failure_exits_two() {
    let dir = scratch("validate-fail");
    let config = dir.join("run.toml");
    write(
        &config,
        r#"
[bath]
coupling_strength = 1.0
cutoff = 1.0
sound_speed = 1.0

[layout]
positions = [[0.0, 0.0, 0.0]]

[validate]
criteria = [6]
"#,
    );
    let out = bin()
        .args(["validate", "--tolerance-scale", "1e-9", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn config_errors_exit_one_with_a_field_message() {
    let dir = scratch("bad-config");
    let config = dir.join("run.toml");
    write(
        &config,
        r#"
[bath]
coupling_strength = -2.0
cutoff = 1.0
sound_speed = 1.0

[layout]
positions = [[0.0, 0.0, 0.0]]
"#,
    );
    let out = bin()
        .args(["corr", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("coupling_strength"), "{stderr}");
}

#[test]
fn unknown_subcommand_exits_one() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_job_section_is_a_config_error() {
    let dir = scratch("missing-section");
    let config = dir.join("run.toml");
    write(
        &config,
        r#"
[bath]
coupling_strength = 1.0
cutoff = 1.0
sound_speed = 1.0

[layout]
positions = [[0.0, 0.0, 0.0]]
"#,
    );
    let out = bin()
        .args(["dfs-check", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dfs_check"));
}

#[test]
fn dfs_check_reports_residuals() {
    let dir = scratch("dfs");
    let states = dir.join("states.json");
    // (|01> - |10>)/sqrt2 and |00>
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    write(
        &states,
        &serde_json::to_string(&vec![
            vec![[0.0, 0.0], [inv, 0.0], [-inv, 0.0], [0.0, 0.0]],
            vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        ])
        .unwrap(),
    );
    let config = dir.join("run.toml");
    write(
        &config,
        &format!(
            r#"
[bath]
coupling_strength = 1.0
cutoff = 1.0
sound_speed = 1.0
temperature = 0.5

[layout]
positions = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]

[dfs_check]
states_file = "{}"
time = 5.0
channel = "dephasing-z"
"#,
            states.display()
        ),
    );
    let out = bin()
        .args(["dfs-check", "--format", "json", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(dir.join("dfs_check.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let reports = value["data"].as_array().unwrap();
    // coincident qubits: the singlet is exactly protected, |00> is not
    let singlet = reports[0]["decoherence_exponent"].as_f64().unwrap();
    let basis = reports[1]["decoherence_exponent"].as_f64().unwrap();
    assert!(singlet.abs() < 1e-9);
    assert!(basis > 1e-3);
}

#[test]
fn oracle_jobs_write_parameter_echo() {
    let dir = scratch("oracle");
    let config = dir.join("run.toml");
    write(
        &config,
        r#"
[bath]
coupling_strength = 1.0
cutoff = 1.0
sound_speed = 1.0

[layout]
positions = [[0.0, 0.0, 0.0], [0.3, 0.0, 0.0]]
splitting = 0.0

[oracle]
[[oracle.jobs]]
kind = "decomposition"
modes = [
  { wavevector = [0.9, 0.4, -0.2], coupling = 0.05 },
  { wavevector = [-0.9, -0.4, 0.2], coupling = 0.05 },
]
truncation = 8
time = 2.5
"#,
    );
    let out = bin()
        .args(["oracle", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.join("oracle.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let job = &value["data"][0];
    assert_eq!(job["kind"], "decomposition");
    assert!(job["norm_difference"].as_f64().unwrap() < 1e-8);
    // full parameter echo for reproducibility
    assert_eq!(job["spec"]["truncation"], 8);
}

#[test]
fn corr_json_artifact_round_trips_into_typed_values() {
    let dir = scratch("corr-json");
    let config = dir.join("run.toml");
    write(&config, COINCIDENT_CONFIG);
    let out = bin()
        .args(["corr", "--format", "json", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(dir.join("corr.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    // matrices re-validate through the typed constructor path
    let matrices: Vec<spinboson::ContractionMatrix> =
        serde_json::from_value(value["data"]["matrices"].clone()).unwrap();
    let regimes: Vec<spinboson::RegimeReport> =
        serde_json::from_value(value["data"]["regimes"].clone()).unwrap();
    assert_eq!(matrices.len(), 1);
    assert_eq!(matrices[0].dim(), 2);
    assert_eq!(regimes[0].global, spinboson::RegimeLabel::Correlated);
}

#[test]
fn amps_outputs_are_deterministic() {
    let dir1 = scratch("amps1");
    let dir2 = scratch("amps2");
    for dir in [&dir1, &dir2] {
        let out = bin()
            .args(["amps", "--format", "csv", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(dir1.join("amplitudes.csv")).unwrap();
    let b = fs::read(dir2.join("amplitudes.csv")).unwrap();
    assert_eq!(a, b);
}
