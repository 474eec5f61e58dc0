//! CSV and JSON report emission.

use serde::Serialize;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Identity-scenario row.
#[derive(Serialize)]
pub struct IdentityRow {
    pub check_name: String,
    pub dim: usize,
    pub point_index: usize,
    pub residual: f64,
}

/// Monotonicity-scenario row; column names and order are part of the file
/// contract.
#[derive(Serialize)]
pub struct MonotonicityRow {
    pub t: f64,
    pub tau: f64,
    pub theta: f64,
    pub dtheta_dt: f64,
    #[serde(rename = "termA")]
    pub term_a: f64,
    #[serde(rename = "termB")]
    pub term_b: f64,
    #[serde(rename = "termC")]
    pub term_c: f64,
    pub residual: f64,
}

/// Harnack-scenario row.
#[derive(Serialize)]
pub struct HarnackRow {
    pub t: f64,
    pub point_x: f64,
    pub point_y: f64,
    pub kind: &'static str,
    pub value: f64,
}

/// run-flow per-snapshot diagnostics.
#[derive(Serialize)]
pub struct FlowRow {
    pub t: f64,
    pub tau: f64,
    pub max_abs_phi: f64,
    pub max_abs_r: f64,
    pub mass: f64,
    pub min_u: f64,
}

/// Soliton sign-audit row.
#[derive(Serialize)]
pub struct SolitonRow {
    pub kind: &'static str,
    pub m: usize,
    pub n: usize,
    pub t: f64,
    pub reference_time: f64,
    pub t_ext: f64,
    pub value: f64,
    pub sign_ok: bool,
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Validation("no records to emit".into()));
    }
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot open {}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Validation(format!("csv write failed: {e}")))?;
    }
    w.flush()
        .map_err(|e| CliError::Validation(format!("csv flush failed: {e}")))?;
    Ok(())
}

pub fn write_summary(path: &Path, summary: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| CliError::Validation(format!("summary serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub struct OutPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
}

pub fn out_paths(dir: &Path, scenario: &str) -> Result<OutPaths, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", dir.display())))?;
    Ok(OutPaths {
        csv: dir.join(format!("{scenario}.csv")),
        summary: dir.join(format!("{scenario}_summary.json")),
    })
}
