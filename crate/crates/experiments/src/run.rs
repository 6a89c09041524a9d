//! Dispatch, seeding and output of experiment runs.
//!
//! Trial `i` of a run with config seed `s` uses the seed `derive_seed(s, i)`;
//! every random stream of the trial (signal, matrix, noise, coefficients) is
//! derived from it. Trials run on the rayon pool and are collected in index
//! order, so outputs do not depend on scheduling.

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::{bounds, mmv, recovery};
use qscs::rng::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Seed of trial `index`.
pub fn trial_seed(config_seed: u64, index: usize) -> u64 {
    derive_seed(config_seed, index as u64)
}

/// Runs `f` over `0..count` in parallel and returns the results in index order.
pub(crate) fn ordered_map<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

/// Maps errors that describe a degenerate estimate (all-zero recovery, no
/// dual peaks, too few dimensions for MUSIC) to a missing value.
pub(crate) fn soft<T>(r: qscs::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(qscs::Error::ZeroInput(_) | qscs::Error::NoPeaks | qscs::Error::ModelOrder { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Everything a run produces, before it is written to disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub datasets: Vec<Dataset>,
    /// Seed of each trial, indexed by trial index.
    pub trial_seeds: Vec<u64>,
    /// Number of AST solves and how many of them hit the iteration cap.
    pub solves: usize,
    pub unconverged: usize,
    /// Extra binary files (relative path, contents), e.g. measurement dumps.
    pub attachments: Vec<(String, Vec<u8>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSeed {
    pub trial_index: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment_kind: ExperimentKind,
    pub config_hash: String,
    pub code_version: String,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialSeed>,
    pub solves: usize,
    pub unconverged: usize,
    pub outputs: Vec<String>,
}

impl RunOutput {
    pub(crate) fn new(config: &ExperimentConfig, trials: usize) -> Self {
        RunOutput {
            config: config.clone(),
            datasets: Vec::new(),
            trial_seeds: (0..trials).map(|i| trial_seed(config.seed, i)).collect(),
            solves: 0,
            unconverged: 0,
            attachments: Vec::new(),
        }
    }

    pub fn dataset(&self, name: &str) -> Option<&Dataset> {
        self.datasets.iter().find(|d| d.name == name)
    }

    /// Fraction of solves that did not converge (0 when nothing was solved).
    pub fn unconverged_fraction(&self) -> f64 {
        if self.solves == 0 {
            0.0
        } else {
            self.unconverged as f64 / self.solves as f64
        }
    }

    pub fn manifest(&self) -> Manifest {
        let mut outputs: Vec<String> = self.datasets.iter().map(|d| format!("{}.csv", d.name)).collect();
        outputs.extend(self.attachments.iter().map(|(p, _)| p.clone()));
        Manifest {
            experiment_kind: self.config.experiment_kind,
            config_hash: self.config.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config.clone(),
            trials: self
                .trial_seeds
                .iter()
                .enumerate()
                .map(|(trial_index, &seed)| TrialSeed { trial_index, seed })
                .collect(),
            solves: self.solves,
            unconverged: self.unconverged,
            outputs,
        }
    }

    /// Writes every dataset, attachment and `manifest.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for d in &self.datasets {
            paths.push(d.write(dir)?);
        }
        for (rel, bytes) in &self.attachments {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, bytes)?;
            paths.push(path);
        }
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.manifest())?)?;
        paths.push(path);
        Ok(paths)
    }
}

/// Validates `config` and runs the experiment it describes.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    // per-trial dense kernels stay on the calling thread; trials are the unit of parallelism
    qscs::linalg::use_sequential_kernels();
    match config.experiment_kind {
        ExperimentKind::CrbVsSnr => bounds::run_crb_vs_snr(config),
        ExperimentKind::CrbFixedBits => bounds::run_crb_fixed_bits(config),
        ExperimentKind::LambdaCurve => recovery::run_lambda_curve(config),
        ExperimentKind::DualPolyDemo => recovery::run_dual_poly_demo(config),
        ExperimentKind::ErrorVsM | ExperimentKind::ErrorVsK => recovery::run_recovery_sweep(config),
        ExperimentKind::MseVsCrb => recovery::run_mse_vs_crb(config),
        ExperimentKind::MmvSweep => mmv::run_mmv_sweep(config),
    }
}
