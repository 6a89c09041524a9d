//! Multi-snapshot recovery vs the number of snapshots.
//!
//! Each trial keeps the frequencies of the configured signal and draws fresh
//! `CN(0, 1)` coefficients for every snapshot. The per-snapshot SNR is
//! `‖X⋆‖_F² / (Tσ²)`. All snapshots share one sensing matrix; the surrogates
//! `Aᴴy_t/m` are stacked and denoised jointly with
//! `τ_T = η√(n ln n/(10 m T))·√P`.

use crate::config::ExperimentConfig;
use crate::dataset::{fmt_f64, fmt_opt, summarize, Dataset};
use crate::error::Result;
use crate::recovery::check_optimality;
use crate::run::{ordered_map, soft, RunOutput};
use num_complex::Complex64;
use qscs::ast::{ast_mmv, default_tau_mmv, surrogate_ensemble, AstSolution};
use qscs::frequency_localization::{hausdorff, subspace_angle_error, subspace_estimate, SubspaceInput};
use qscs::linalg::{frobenius_norm, CMatrix};
use qscs::quantization::{bussgang_gain, matched_input_std, quantize_complex};
use qscs::quantization::QuantizerChoice;
use qscs::rng::{derive_seed, rng_from_seed, stream};
use qscs::sensing::{complex_normal, gaussian_matrix, measure};
use qscs::spectral_model::atom;

/// Metrics of one multi-snapshot trial.
#[derive(Debug, Clone)]
pub struct MmvOutcome {
    pub solution: AstSolution,
    pub xstar: CMatrix,
    pub subspace_angle: Option<f64>,
    pub hausdorff_sq: Option<f64>,
    pub optimality_ok: bool,
}

/// `X⋆ = Σ_k v(f_k) c_kᵀ` with `c_k ~ CN(0, I_T)`; column `t` only uses the
/// `t`-th block of `K` draws, so a larger `T` extends a smaller one.
pub fn snapshot_signal(freqs: &[f64], n: usize, t: usize, seed: u64) -> Result<CMatrix> {
    let mut rng = rng_from_seed(seed);
    let atoms = freqs.iter().map(|&f| atom(f, n)).collect::<qscs::Result<Vec<_>>>()?;
    let mut x = CMatrix::zeros(n, t);
    for col in 0..t {
        for v in &atoms {
            let c = complex_normal(&mut rng);
            for i in 0..n {
                x[(i, col)] += v[i] * c;
            }
        }
    }
    Ok(x)
}

/// One trial at `T` snapshots: quantize every snapshot, solve jointly, and
/// estimate `K` frequencies by MUSIC on the smoothed columns of `X̂`.
pub fn mmv_trial(
    freqs: &[f64],
    n: usize,
    t: usize,
    m: usize,
    snr_db: f64,
    q: QuantizerChoice,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<MmvOutcome> {
    let xstar = snapshot_signal(freqs, n, t, derive_seed(seed, stream::COEFFICIENTS))?;
    let energy = frobenius_norm(&xstar).powi(2) / t as f64;
    let sigma = (energy / 10f64.powf(snr_db / 10.0)).sqrt();
    let a = gaussian_matrix(m, n, derive_seed(seed, stream::MATRIX))?;
    let noise_seed = derive_seed(seed, stream::NOISE);
    let input_std = matched_input_std(energy, sigma);
    let spec = q.build(input_std)?;
    let mut ys = Vec::with_capacity(t);
    for col in 0..t {
        let x: Vec<Complex64> = xstar.column(col).iter().copied().collect();
        let z = measure(&a, &x, sigma, derive_seed(noise_seed, col as u64))?.z;
        ys.push(match &spec {
            Some(spec) => quantize_complex(spec, &z),
            None => z,
        });
    }
    let power = match &spec {
        Some(spec) => bussgang_gain(spec, input_std).1,
        None => input_std * input_std,
    };
    let s = surrogate_ensemble(&a, &ys)?;
    let tau = default_tau_mmv(n, m, t)? * config.tau_eta * power.sqrt();
    let solution = ast_mmv(&s, tau, &config.solver)?;
    let subspace_angle = soft(subspace_angle_error(&solution.xhat, &xstar))?;
    let est = soft(subspace_estimate(SubspaceInput::SmoothedSnapshots(&solution.xhat), freqs.len()))?;
    let hausdorff_sq = match est {
        Some(e) => Some(hausdorff(freqs, &e.frequencies, false)?.powi(2)),
        None => None,
    };
    let optimality_ok = check_optimality(&solution)?;
    Ok(MmvOutcome { solution, xstar, subspace_angle, hausdorff_sq, optimality_ok })
}

pub const MMV_TRIAL_COLUMNS: [&str; 11] = [
    "T",
    "snr_db",
    "quantizer",
    "trial_index",
    "seed",
    "converged",
    "iterations",
    "subspace_angle_error",
    "hausdorff_sq",
    "optimality_ok",
    "m",
];

pub const MMV_SUMMARY_COLUMNS: [&str; 10] =
    ["T", "snr_db", "quantizer", "metric", "median", "q1", "q3", "count", "unconverged", "seed"];

pub const MMV_METRICS: [&str; 2] = ["subspace_angle_error", "hausdorff_sq"];

pub fn run_mmv_sweep(config: &ExperimentConfig) -> Result<RunOutput> {
    let trials = config.trials();
    let mut out = RunOutput::new(config, trials);
    let seeds = out.trial_seeds.clone();
    let m = config.m();
    let n = config.signal.n();
    let mut cells = Vec::new();
    for &t in &config.t_grid() {
        for &snr_db in &config.snr_db() {
            for &q in &config.quantizers() {
                cells.push((t, snr_db, q));
            }
        }
    }
    let results = ordered_map(cells.len() * trials, |job| {
        let (t, snr_db, q) = cells[job / trials];
        let seed = seeds[job % trials];
        let freqs = config.signal.realize(None, derive_seed(seed, stream::SIGNAL))?.frequencies();
        mmv_trial(&freqs, n, t, m, snr_db, q, config, seed)
    })?;

    let mut trial_ds = Dataset::new("mmv_sweep", &MMV_TRIAL_COLUMNS);
    let mut summary = Dataset::new("mmv_sweep_summary", &MMV_SUMMARY_COLUMNS);
    for (ci, &(t, snr_db, q)) in cells.iter().enumerate() {
        let chunk = &results[ci * trials..(ci + 1) * trials];
        let unconverged = chunk.iter().filter(|r| !r.solution.converged()).count();
        out.solves += trials;
        out.unconverged += unconverged;
        for (ti, r) in chunk.iter().enumerate() {
            trial_ds.push(vec![
                t.to_string(),
                fmt_f64(snr_db),
                q.to_string(),
                ti.to_string(),
                seeds[ti].to_string(),
                r.solution.converged().to_string(),
                r.solution.diagnostics.iterations.to_string(),
                fmt_opt(r.subspace_angle),
                fmt_opt(r.hausdorff_sq),
                r.optimality_ok.to_string(),
                m.to_string(),
            ]);
        }
        for metric in MMV_METRICS {
            let vals: Vec<f64> = chunk
                .iter()
                .filter(|r| r.solution.converged())
                .filter_map(|r| if metric == "hausdorff_sq" { r.hausdorff_sq } else { r.subspace_angle })
                .collect();
            let s = summarize(&vals);
            summary.push(vec![
                t.to_string(),
                fmt_f64(snr_db),
                q.to_string(),
                metric.to_string(),
                fmt_opt(s.map(|s| s.median)),
                fmt_opt(s.map(|s| s.q1)),
                fmt_opt(s.map(|s| s.q3)),
                s.map(|s| s.count).unwrap_or(0).to_string(),
                unconverged.to_string(),
                config.seed.to_string(),
            ]);
        }
    }
    out.datasets.push(trial_ds);
    out.datasets.push(summary);
    Ok(out)
}
