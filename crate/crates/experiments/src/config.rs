//! Experiment configuration, read from JSON.
//!
//! Every field except `experiment_kind` may be omitted; kind-specific
//! defaults reproduce the standard setups (n = 64 with the three-tone
//! reference signal, m = 100 for the bound curves, m = 1000 for recovery,
//! m = 50 for the multi-snapshot sweep).

use crate::error::{ExperimentError, Result};
use qscs::ast::SolverConfig;
use qscs::quantization::QuantizerChoice;
use qscs::spectral_model::{random_signal, SpectralSignal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// CRB of every parameter vs SNR at fixed m, per quantizer.
    CrbVsSnr,
    /// CRB vs SNR at a fixed total bit budget `B = m·b`.
    CrbFixedBits,
    /// Closed-form surrogate scale λ vs SNR.
    LambdaCurve,
    /// Dual polynomial of one recovery.
    DualPolyDemo,
    /// Recovery error vs number of measurements.
    ErrorVsM,
    /// Recovery error vs number of spectral lines.
    ErrorVsK,
    /// Frequency MSE of the recovered signal against the CRB.
    MseVsCrb,
    /// Multi-snapshot recovery vs number of snapshots.
    MmvSweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::CrbVsSnr,
        ExperimentKind::CrbFixedBits,
        ExperimentKind::LambdaCurve,
        ExperimentKind::DualPolyDemo,
        ExperimentKind::ErrorVsM,
        ExperimentKind::ErrorVsK,
        ExperimentKind::MseVsCrb,
        ExperimentKind::MmvSweep,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::CrbVsSnr => "crb_vs_snr",
            ExperimentKind::CrbFixedBits => "crb_fixed_bits",
            ExperimentKind::LambdaCurve => "lambda_curve",
            ExperimentKind::DualPolyDemo => "dual_poly_demo",
            ExperimentKind::ErrorVsM => "error_vs_m",
            ExperimentKind::ErrorVsK => "error_vs_k",
            ExperimentKind::MseVsCrb => "mse_vs_crb",
            ExperimentKind::MmvSweep => "mmv_sweep",
        }
    }

    /// CLI verb that runs this kind.
    pub fn verb(&self) -> &'static str {
        match self {
            ExperimentKind::CrbVsSnr | ExperimentKind::CrbFixedBits => "crb",
            ExperimentKind::MmvSweep => "mmv",
            _ => "recover",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ExperimentError::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// Where the true signal comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    /// Three tones at `{0.3, 0.325, 0.8}` with amplitudes `{0.4, 0.15, 0.05}`.
    Reference { n: usize },
    /// An explicit list of components.
    Explicit { signal: SpectralSignal },
    /// Fresh frequencies and amplitudes per trial. `min_sep` defaults to `4/n`.
    Random {
        n: usize,
        k: usize,
        #[serde(default)]
        min_sep: Option<f64>,
        #[serde(default = "default_amplitude_range")]
        amplitude_range: (f64, f64),
    },
}

fn default_amplitude_range() -> (f64, f64) {
    (0.5, 1.5)
}

impl Default for SignalSpec {
    fn default() -> Self {
        SignalSpec::Reference { n: 64 }
    }
}

impl SignalSpec {
    pub fn n(&self) -> usize {
        match self {
            SignalSpec::Reference { n } | SignalSpec::Random { n, .. } => *n,
            SignalSpec::Explicit { signal } => signal.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            SignalSpec::Reference { .. } => 3,
            SignalSpec::Random { k, .. } => *k,
            SignalSpec::Explicit { signal } => signal.k(),
        }
    }

    /// The true signal for one trial. `k` overrides the number of lines of a
    /// random signal; `seed` drives the random draw.
    pub fn realize(&self, k: Option<usize>, seed: u64) -> Result<SpectralSignal> {
        Ok(match self {
            SignalSpec::Reference { n } => SpectralSignal::reference(*n),
            SignalSpec::Explicit { signal } => signal.clone(),
            SignalSpec::Random { n, k: k0, min_sep, amplitude_range } => {
                let sep = min_sep.unwrap_or(4.0 / *n as f64);
                random_signal(*n, k.unwrap_or(*k0), sep, *amplitude_range, seed)?
            }
        })
    }
}

fn default_seed() -> u64 {
    0
}

fn default_eta() -> f64 {
    1.0
}

fn default_peak_tol() -> f64 {
    qscs::frequency_localization::DEFAULT_PEAK_TOL
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_kind: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Monte-Carlo trials; defaults to 200 for `error_vs_k` and `mse_vs_crb`, 50 otherwise.
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub signal: SignalSpec,
    /// Number of measurements (ignored by `crb_fixed_bits` and the m sweep).
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub m_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub k_grid: Option<Vec<usize>>,
    /// Snapshot counts for the multi-snapshot sweep.
    #[serde(default)]
    pub t_grid: Option<Vec<usize>>,
    /// Total bits `B` for `crb_fixed_bits`.
    #[serde(default)]
    pub bit_budget: Option<usize>,
    #[serde(default)]
    pub snr_db: Option<Vec<f64>>,
    #[serde(default)]
    pub quantizers: Option<Vec<QuantizerChoice>>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Multiplier on the default regularization weight.
    #[serde(default = "default_eta")]
    pub tau_eta: f64,
    /// Dual-polynomial peaks must reach `1 - peak_tol`.
    #[serde(default = "default_peak_tol")]
    pub peak_tol: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Write every trial's measurements (and estimate) as binary dumps.
    #[serde(default)]
    pub dump_measurements: bool,
}

impl ExperimentConfig {
    /// All defaults for `kind`.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment_kind: kind,
            seed: default_seed(),
            trials: None,
            signal: SignalSpec::default(),
            m: None,
            m_grid: None,
            k_grid: None,
            t_grid: None,
            bit_budget: None,
            snr_db: None,
            quantizers: None,
            solver: SolverConfig::default(),
            tau_eta: default_eta(),
            peak_tol: default_peak_tol(),
            output_dir: default_output_dir(),
            dump_measurements: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(match self.experiment_kind {
            ExperimentKind::ErrorVsK | ExperimentKind::MseVsCrb => 200,
            ExperimentKind::DualPolyDemo | ExperimentKind::CrbVsSnr | ExperimentKind::CrbFixedBits => 1,
            ExperimentKind::LambdaCurve => 1,
            _ => 50,
        })
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or(match self.experiment_kind {
            ExperimentKind::CrbVsSnr => 100,
            ExperimentKind::MmvSweep => 50,
            _ => 1000,
        })
    }

    pub fn m_grid(&self) -> Vec<usize> {
        self.m_grid.clone().unwrap_or_else(|| vec![250, 500, 1000, 2000])
    }

    pub fn k_grid(&self) -> Vec<usize> {
        self.k_grid.clone().unwrap_or_else(|| vec![1, 2, 3, 4, 5, 6, 7, 8])
    }

    pub fn t_grid(&self) -> Vec<usize> {
        self.t_grid.clone().unwrap_or_else(|| vec![1, 2, 5, 10, 20])
    }

    pub fn bit_budget(&self) -> usize {
        self.bit_budget.unwrap_or(100)
    }

    pub fn snr_db(&self) -> Vec<f64> {
        self.snr_db.clone().unwrap_or_else(|| match self.experiment_kind {
            ExperimentKind::CrbVsSnr | ExperimentKind::CrbFixedBits => (0..=50).map(|i| -10.0 + i as f64).collect(),
            ExperimentKind::LambdaCurve => (0..=80).map(|i| -20.0 + i as f64).collect(),
            ExperimentKind::MseVsCrb => (0..=6).map(|i| -10.0 + 5.0 * i as f64).collect(),
            ExperimentKind::DualPolyDemo => vec![20.0],
            ExperimentKind::MmvSweep => vec![10.0, 20.0],
            ExperimentKind::ErrorVsM | ExperimentKind::ErrorVsK => vec![10.0, 20.0, 30.0],
        })
    }

    pub fn quantizers(&self) -> Vec<QuantizerChoice> {
        self.quantizers.clone().unwrap_or_else(|| match self.experiment_kind {
            ExperimentKind::CrbVsSnr => vec![QuantizerChoice::Sign, QuantizerChoice::Lloyd(2), QuantizerChoice::None],
            ExperimentKind::CrbFixedBits => vec![QuantizerChoice::Sign, QuantizerChoice::Lloyd(2)],
            _ => vec![QuantizerChoice::Sign],
        })
    }

    /// Checks the configuration, including the kind-specific constraints.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        let snr = self.snr_db();
        if snr.is_empty() {
            return bad("the SNR grid must not be empty".into());
        }
        if snr.iter().any(|s| !s.is_finite()) {
            return bad("SNR values must be finite".into());
        }
        if self.trials() == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.signal.n() < 2 {
            return bad("signal dimension n must be at least 2".into());
        }
        if let SignalSpec::Random { k, .. } = self.signal {
            if k == 0 {
                return bad("random signals need k ≥ 1".into());
            }
        }
        let quantizers = self.quantizers();
        if quantizers.is_empty() {
            return bad("at least one quantizer is required".into());
        }
        let s = &self.solver;
        if !(s.tol > 0.0 && s.rho > 0.0 && s.max_iter > 0) {
            return bad("solver tol, rho and max_iter must be positive".into());
        }
        if !(self.tau_eta > 0.0 && self.tau_eta.is_finite()) {
            return bad("tau_eta must be positive".into());
        }
        if !(self.peak_tol > 0.0 && self.peak_tol < 1.0) {
            return bad("peak_tol must lie in (0, 1)".into());
        }
        let positive = |name: &str, grid: &[usize]| -> Result<()> {
            if grid.is_empty() || grid.contains(&0) {
                return Err(ExperimentError::Config(format!("{name} must be a nonempty list of positive values")));
            }
            Ok(())
        };
        match self.experiment_kind {
            ExperimentKind::CrbVsSnr => {
                if let Some(q) = quantizers.iter().find(|q| q.bit_depth() > 2) {
                    return bad(format!("crb_vs_snr compares 1-bit, 2-bit and unquantized models, not {q}"));
                }
                positive("m", &[self.m()])?;
            }
            ExperimentKind::CrbFixedBits => {
                let budget = self.bit_budget();
                for q in &quantizers {
                    let b = q.bit_depth() as usize;
                    if b == 0 {
                        return bad("a bit budget needs quantized models only".into());
                    }
                    if budget == 0 || budget % b != 0 {
                        return bad(format!("bit budget {budget} is not divisible by the bit depth of {q}"));
                    }
                }
            }
            ExperimentKind::ErrorVsM => positive("m_grid", &self.m_grid())?,
            ExperimentKind::ErrorVsK => {
                positive("k_grid", &self.k_grid())?;
                if !matches!(self.signal, SignalSpec::Random { .. }) {
                    return bad("error_vs_k needs a random signal spec".into());
                }
            }
            ExperimentKind::MmvSweep => {
                positive("t_grid", &self.t_grid())?;
                positive("m", &[self.m()])?;
            }
            ExperimentKind::MseVsCrb | ExperimentKind::DualPolyDemo => positive("m", &[self.m()])?,
            ExperimentKind::LambdaCurve => {}
        }
        Ok(())
    }
}
