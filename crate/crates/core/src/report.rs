//! Output formatting and artifact writing shared by the CLI.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// C-style `%.12e` formatting: twelve fractional digits, signed two-digit
/// exponent. CSV columns use this uniformly so downstream parsers see one
/// numeric shape.
pub fn fmt_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12e}");
    // Rust renders exponents as "e5" / "e-5"; normalize to "e+05" / "e-05"
    let (mantissa, exponent) = s.split_once('e').expect("exponential format");
    let (sign, digits) = match exponent.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exponent),
    };
    if digits.len() < 2 {
        format!("{mantissa}e{sign}0{digits}")
    } else {
        format!("{mantissa}e{sign}{digits}")
    }
}

/// Write bytes to `path` atomically (write a sibling temp file, then
/// rename over the target).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    fs::write(&tmp_path, bytes)?;
    fs::rename(&tmp_path, path)?;
    Ok(())
}

/// JSON artifact wrapper: every report embeds the fully resolved
/// configuration so a run can be reproduced byte-identically.
#[derive(Debug, Serialize)]
pub struct Artifact<C: Serialize, T: Serialize> {
    pub config: C,
    pub data: T,
}

pub fn write_json<C: Serialize, T: Serialize>(
    path: &Path,
    config: &C,
    data: &T,
) -> Result<()> {
    let artifact = Artifact { config, data };
    let mut text = serde_json::to_string_pretty(&artifact)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_format_matches_c_printf() {
        assert_eq!(fmt_sci(1.0), "1.000000000000e+00");
        assert_eq!(fmt_sci(-0.5), "-5.000000000000e-01");
        assert_eq!(fmt_sci(123.456), "1.234560000000e+02");
        assert_eq!(fmt_sci(1.5e-120), "1.500000000000e-120");
        assert_eq!(fmt_sci(0.0), "0.000000000000e+00");
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = std::env::temp_dir().join(format!("report-test-{}", std::process::id()));
        let path = dir.join("artifact.csv");
        atomic_write(&path, b"one").unwrap();
        atomic_write(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert!(!path.with_extension("csv.tmp").exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
