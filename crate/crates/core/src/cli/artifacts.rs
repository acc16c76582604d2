//! On-disk artifacts: trace CSV, model JSON, cluster report. All writes are
//! atomic (temp file in the target directory, then rename).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::clustering::{ClusterConfig, RepairEvent};
use crate::datasets::Transform;
use crate::error::{Error, Result};
use crate::feature_map::{FeatureMapSpec, ThetaParams};
use crate::training::{CostVariant, TrainingTrace};

pub const SCHEMA_VERSION: u32 = 1;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// One row of trace.csv.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub cost: f64,
    pub grad_norm: f64,
    pub elapsed_ms: f64,
}

pub fn trace_rows(trace: &TrainingTrace, timing: bool) -> Vec<TraceRow> {
    trace
        .records
        .iter()
        .map(|r| TraceRow {
            epoch: r.epoch,
            cost: r.cost,
            grad_norm: r.grad_norm,
            elapsed_ms: if timing { r.elapsed_ms } else { 0.0 },
        })
        .collect()
}

pub fn trace_csv(rows: &[TraceRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for (i, row) in r.deserialize().enumerate() {
        rows.push(row.map_err(|e: csv::Error| {
            Error::Parse(format!("{} row {}: {e}", path.display(), i + 2))
        })?);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{}: trace has no rows", path.display())));
    }
    Ok(rows)
}

/// model.json
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub feature_map: FeatureMapSpec,
    pub cost: CostVariant,
    pub seed: u64,
    pub step_size: f64,
    /// Parameters after the last epoch.
    pub theta: ThetaParams,
    /// Parameters at the minimum-cost epoch; used for clustering.
    pub best_theta: ThetaParams,
    pub min_cost: f64,
    pub argmin_epoch: usize,
    pub final_cost: f64,
    pub epochs_run: usize,
    pub converged: bool,
    pub preprocessing: Vec<Transform>,
}

impl ModelFile {
    pub fn new(
        config: &ExperimentConfig,
        step_size: f64,
        trace: &TrainingTrace,
        preprocessing: Vec<Transform>,
    ) -> Self {
        let mut config = config.clone();
        config.train.step_size = step_size;
        Self {
            schema_version: SCHEMA_VERSION,
            feature_map: config.feature_map,
            cost: trace.cost,
            seed: config.seed,
            step_size,
            theta: trace.theta.clone(),
            best_theta: trace.best_theta.clone(),
            min_cost: trace.min_cost,
            argmin_epoch: trace.argmin_epoch,
            final_cost: trace.records.last().map_or(f64::NAN, |r| r.cost),
            epochs_run: trace.records.len().saturating_sub(1),
            converged: trace.converged,
            preprocessing,
            config,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let model: Self = read_json(path)?;
        if model.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "{}: unsupported schema_version {}",
                path.display(),
                model.schema_version
            )));
        }
        model.best_theta.check(&model.feature_map)?;
        Ok(model)
    }
}

/// report.json
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub cluster: ClusterConfig,
    pub cost: CostVariant,
    /// Cost of the final partition; absent when a cluster ended up empty.
    pub final_cost: Option<f64>,
    pub overlap_matrix: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    pub restart: usize,
    pub scatter: f64,
    pub cluster_sizes: Vec<usize>,
    pub repairs: Vec<RepairEvent>,
    /// Permutation-matched accuracy against ground-truth labels, when present.
    pub accuracy: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_round_trips_exactly() {
        let rows = vec![
            TraceRow { epoch: 0, cost: 0.1 + 0.2, grad_norm: 1e-17, elapsed_ms: 0.0 },
            TraceRow { epoch: 1, cost: 1.0 / 3.0, grad_norm: 2.5, elapsed_ms: 12.25 },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_atomic(&path, &trace_csv(&rows).unwrap()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("epoch,cost,grad_norm,elapsed_ms\n"));
        assert_eq!(read_trace(&path).unwrap(), rows);
    }

    #[test]
    fn empty_trace_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "epoch,cost,grad_norm,elapsed_ms\n").unwrap();
        assert!(matches!(read_trace(&path), Err(Error::Parse(_))));
    }
}
