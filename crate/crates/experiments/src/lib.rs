//! Batch experiments for quantized spectral compressed sensing.
//!
//! An [`ExperimentConfig`] (JSON) selects one of the experiment kinds:
//! bound curves vs SNR at a fixed number of measurements or a fixed bit
//! budget, the surrogate scale curve, a dual-polynomial demonstration,
//! recovery-error sweeps over m or K, frequency MSE against the CRB, and the
//! multi-snapshot sweep. [`run`] produces CSV datasets in which every row
//! carries its trial seed and index, plus a manifest with the config hash
//! and per-trial seeds; [`emit_plot`] renders datasets as SVG.

pub mod bounds;
pub mod config;
pub mod dataset;
pub mod error;
pub mod mmv;
pub mod plot;
pub mod recovery;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind, SignalSpec};
pub use dataset::Dataset;
pub use error::{ExperimentError, Result};
pub use plot::{emit_plot, PlotStyle};
pub use run::{run, Manifest, RunOutput};

/// Unconverged-solve fraction above which a run is reported as failed.
pub const MAX_UNCONVERGED_FRACTION: f64 = 0.2;
