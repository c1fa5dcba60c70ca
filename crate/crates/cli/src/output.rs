//! CSV rows and JSON summaries.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::spec::ExperimentSpec;

/// Bit-exact CSV header shared by every command.
pub const CSV_HEADER: &str =
    "policy,lambda,mu,param,T,seed,theta_hat,abs_theta_hat,mean_delay,mean_aoi,samples,unstable,theta_analytic,theta_lower_bound";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub policy: String,
    pub lambda: f64,
    pub mu: f64,
    pub param: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
    pub theta_hat: Option<f64>,
    pub abs_theta_hat: Option<f64>,
    pub mean_delay: Option<f64>,
    pub mean_aoi: Option<f64>,
    pub samples: Option<u64>,
    pub unstable: Option<bool>,
    pub theta_analytic: Option<f64>,
    pub theta_lower_bound: Option<f64>,
}

pub fn csv_bytes(rows: &[CsvRow]) -> CliResult<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record(CSV_HEADER.split(','))?;
    }
    writer.into_inner().map_err(|e| CliError::io("<csv buffer>", e.into_error()))
}

/// Mean and standard error of replicated values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// `None` with a single replication.
    pub std_error: Option<f64>,
    pub n: usize,
}

impl Estimate {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = (n > 1).then(|| {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        });
        Some(Self { mean, std_error, n })
    }
}

#[derive(Debug, Serialize)]
pub struct Summary<P: Serialize> {
    pub command: &'static str,
    pub generated_unix: u64,
    pub config_hash: String,
    pub spec: ExperimentSpec,
    pub points: Vec<P>,
}

impl<P: Serialize> Summary<P> {
    pub fn new(spec: &ExperimentSpec, points: Vec<P>) -> Self {
        let generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self { command: spec.command, generated_unix, config_hash: spec.hash(), spec: spec.clone(), points }
    }
}

pub fn artifact_path(spec: &ExperimentSpec, ext: &str) -> PathBuf {
    let stem = match spec.preset {
        Some(preset) => format!("{}_{preset}", spec.command),
        None => spec.command.to_string(),
    };
    spec.out_dir.join(format!("{stem}.{ext}"))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes `rows` and `summary` next to each other; returns both paths.
pub fn write_artifacts<P: Serialize>(
    spec: &ExperimentSpec,
    rows: &[CsvRow],
    summary: &Summary<P>,
) -> CliResult<(PathBuf, PathBuf)> {
    let csv_path = artifact_path(spec, "csv");
    write_file(&csv_path, &csv_bytes(rows)?)?;
    let json_path = artifact_path(spec, "json");
    write_file(&json_path, &serde_json::to_vec_pretty(summary)?)?;
    Ok((csv_path, json_path))
}
