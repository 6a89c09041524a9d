//! Single-snapshot recovery experiments.
//!
//! A quantized trial draws `A` and the noise, quantizes `z = Ax⋆ + σε`, forms
//! the surrogate `s = Aᴴy/m` and solves atomic-norm soft thresholding with
//! `τ = η√(n ln n / m)·√P`, where `P = E[Q(u)²]` is the quantizer's output
//! power (1 for the sign quantizer). The surrogate has mean `κ x⋆/‖x⋆‖` with
//! `κ` the quantizer's linear gain times `‖x⋆‖` (λ for the sign quantizer),
//! which is the scale used by the rescaled error.
//!
//! An unquantized trial solves the least-squares form
//! `½‖z - Ax‖² + τ‖x‖_A` with `τ = ησ√(m n ln n)` and `κ = ‖x⋆‖`.

use crate::bounds::crb_for;
use crate::config::ExperimentConfig;
use crate::dataset::{fmt_f64, fmt_opt, summarize, Dataset};
use crate::error::Result;
use crate::run::{ordered_map, soft, RunOutput};
use num_complex::Complex64;
use qscs::ast::{
    ast_least_squares, ast_smv, default_tau, default_tau_unquantized, expected_scale, surrogate, AstSolution,
};
use qscs::frequency_localization::{
    dual_polynomial, hausdorff, localize_dual, normalized_error, subspace_estimate, SubspaceInput,
    DEFAULT_GRID_FACTOR,
};
use qscs::linalg::vector_norm;
use qscs::quantization::{bussgang_gain, matched_input_std, quantize_complex, QuantizerChoice};
use qscs::rng::{derive_seed, stream};
use qscs::sensing::{gaussian_matrix, measure, sigma_for_snr_db, DumpFormat, MeasurementSet};
use qscs::spectral_model::{synthesize, wrap_distance, SpectralSignal};

/// One solved single-snapshot trial.
#[derive(Debug, Clone)]
pub struct SmvOutcome {
    pub solution: AstSolution,
    pub measurements: MeasurementSet,
    pub xstar: Vec<Complex64>,
    pub sigma: f64,
    /// Expected scale of the estimate: `x̂ ≈ κ x⋆/‖x⋆‖`.
    pub kappa: f64,
    /// First-order optimality holds within 1e-4 (`false` if unconverged).
    pub optimality_ok: bool,
}

impl SmvOutcome {
    pub fn converged(&self) -> bool {
        self.solution.converged()
    }

    /// `‖x̂/κ - x⋆/‖x⋆‖‖₂`.
    pub fn scaled_l2_error(&self) -> f64 {
        let norm = vector_norm(&self.xstar);
        let xhat = self.solution.xhat_vector();
        let diff: Vec<Complex64> = xhat.iter().zip(&self.xstar).map(|(a, b)| a / self.kappa - b / norm).collect();
        vector_norm(&diff)
    }
}

/// Tolerance of the optimality check recorded per solve.
pub const OPTIMALITY_TOL: f64 = 1e-4;

pub(crate) fn check_optimality(sol: &AstSolution) -> Result<bool> {
    if !sol.converged() {
        return Ok(false);
    }
    let n = sol.xhat.nrows();
    Ok(sol.optimality(DEFAULT_GRID_FACTOR * n)?.holds(OPTIMALITY_TOL))
}

/// Measures, quantizes and recovers one signal.
pub fn smv_trial(
    signal: &SpectralSignal,
    m: usize,
    snr_db: f64,
    q: QuantizerChoice,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<SmvOutcome> {
    let n = signal.n();
    let xstar = synthesize(signal);
    let energy: f64 = xstar.iter().map(|v| v.norm_sqr()).sum();
    let sigma = sigma_for_snr_db(energy, snr_db);
    let a = gaussian_matrix(m, n, derive_seed(seed, stream::MATRIX))?;
    let meas = measure(&a, &xstar, sigma, derive_seed(seed, stream::NOISE))?;
    let (solution, kappa) = match q.build(matched_input_std(energy, sigma))? {
        None => {
            let tau = default_tau_unquantized(n, m, sigma, config.tau_eta)?;
            (ast_least_squares(&a, &meas.z, tau, &config.solver)?, energy.sqrt())
        }
        Some(spec) => {
            let input_std = matched_input_std(energy, sigma);
            let (gain, power) = bussgang_gain(&spec, input_std);
            let y = quantize_complex(&spec, &meas.z);
            let s = surrogate(&a, &y)?;
            let tau = default_tau(n, m, config.tau_eta)? * power.sqrt();
            (ast_smv(&s, tau, &config.solver)?, gain * energy.sqrt())
        }
    };
    let optimality_ok = check_optimality(&solution)?;
    Ok(SmvOutcome { solution, measurements: meas, xstar, sigma, kappa, optimality_ok })
}

/// Frequency-recovery summary of a dual-polynomial localization.
#[derive(Debug, Clone, PartialEq)]
pub struct Localization {
    pub estimates: Vec<f64>,
    pub hausdorff: Option<f64>,
    /// Every true frequency has an estimate within `0.5/n`.
    pub all_recovered: bool,
}

pub fn localize(outcome: &SmvOutcome, truth: &[f64], peak_tol: f64) -> Result<Localization> {
    let n = outcome.xstar.len();
    let estimates = soft(localize_dual(&outcome.solution, peak_tol))?.map(|e| e.frequencies).unwrap_or_default();
    if estimates.is_empty() {
        return Ok(Localization { estimates, hausdorff: None, all_recovered: false });
    }
    let h = hausdorff(truth, &estimates, false)?;
    let all_recovered =
        truth.iter().all(|&f| estimates.iter().any(|&g| wrap_distance(f, g) <= 0.5 / n as f64));
    Ok(Localization { estimates, hausdorff: Some(h), all_recovered })
}

fn dump_name(q: QuantizerChoice) -> String {
    q.to_string().replace(':', "-")
}

fn measurement_dump(outcome: &SmvOutcome) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    outcome.measurements.write_dump(&mut bytes, DumpFormat::Binary)?;
    Ok(bytes)
}

fn xhat_dump(outcome: &SmvOutcome) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    outcome.solution.write_xhat_binary(&mut bytes)?;
    Ok(bytes)
}

/// Closed-form λ over the SNR grid.
pub fn run_lambda_curve(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new(config, 1);
    let mut ds = Dataset::new("lambda_curve", &["snr_db", "snr", "lambda", "seed", "trial_index"]);
    for &db in &config.snr_db() {
        let snr = 10f64.powf(db / 10.0);
        ds.push(vec![
            fmt_f64(db),
            fmt_f64(snr),
            fmt_f64(expected_scale(snr)?),
            out.trial_seeds[0].to_string(),
            "0".into(),
        ]);
    }
    out.datasets.push(ds);
    Ok(out)
}

/// One recovery at the first SNR and quantizer of the config; writes the
/// dual polynomial on a `16n` grid and the localized frequencies.
pub fn run_dual_poly_demo(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new(config, 1);
    let seed = out.trial_seeds[0];
    let signal = config.signal.realize(None, derive_seed(seed, stream::SIGNAL))?;
    let q = config.quantizers()[0];
    let snr = config.snr_db()[0];
    let outcome = smv_trial(&signal, config.m(), snr, q, config, seed)?;
    out.solves = 1;
    out.unconverged = usize::from(!outcome.converged());
    let n = signal.n();
    let grid = DEFAULT_GRID_FACTOR * n;
    let values = dual_polynomial(&outcome.solution.dual_vector(), grid)?;
    let mut poly = Dataset::new("dual_poly", &["f", "q", "seed", "trial_index"]);
    for (i, v) in values.iter().enumerate() {
        poly.push(vec![fmt_f64(i as f64 / grid as f64), fmt_f64(*v), seed.to_string(), "0".into()]);
    }
    let truth = signal.frequencies();
    let loc = localize(&outcome, &truth, config.peak_tol)?;
    let mut est = Dataset::new("dual_poly_estimates", &["frequency", "nearest_true", "distance", "seed", "trial_index"]);
    for &f in &loc.estimates {
        let nearest = truth.iter().copied().min_by(|a, b| wrap_distance(f, *a).total_cmp(&wrap_distance(f, *b)));
        est.push(vec![
            fmt_f64(f),
            fmt_opt(nearest),
            fmt_opt(nearest.map(|g| wrap_distance(f, g))),
            seed.to_string(),
            "0".into(),
        ]);
    }
    let mut truth_ds = Dataset::new("dual_poly_truth", &["f", "amplitude", "seed", "trial_index"]);
    for c in signal.components() {
        truth_ds.push(vec![fmt_f64(c.f), fmt_f64(c.amplitude), seed.to_string(), "0".into()]);
    }
    if config.dump_measurements {
        out.attachments.push(("dumps/dual_poly_demo_trial0.meas".into(), measurement_dump(&outcome)?));
        out.attachments.push(("dumps/dual_poly_demo_trial0.xhat".into(), xhat_dump(&outcome)?));
    }
    out.datasets.extend([poly, est, truth_ds]);
    Ok(out)
}

pub const TRIAL_COLUMNS: [&str; 15] = [
    "sweep",
    "value",
    "snr_db",
    "quantizer",
    "trial_index",
    "seed",
    "converged",
    "iterations",
    "normalized_error",
    "scaled_l2_error",
    "hausdorff",
    "all_recovered",
    "peaks",
    "optimality_ok",
    "m",
];

pub const SUMMARY_COLUMNS: [&str; 11] =
    ["sweep", "value", "snr_db", "quantizer", "metric", "median", "q1", "q3", "count", "unconverged", "seed"];

pub const RECOVERY_METRICS: [&str; 3] = ["normalized_error", "scaled_l2_error", "hausdorff"];

#[derive(Debug, Clone, Copy)]
struct Cell {
    value: usize,
    snr_db: f64,
    q: QuantizerChoice,
}

/// Error vs `m` or vs `K`: a full grid of (sweep value, SNR, quantizer)
/// cells, each with `trials` independent trials. Writes per-trial rows and
/// per-cell medians and quartiles over converged trials.
pub fn run_recovery_sweep(config: &ExperimentConfig) -> Result<RunOutput> {
    use crate::config::ExperimentKind;
    let by_m = config.experiment_kind == ExperimentKind::ErrorVsM;
    let sweep = if by_m { "m" } else { "k" };
    let values = if by_m { config.m_grid() } else { config.k_grid() };
    let trials = config.trials();
    let mut out = RunOutput::new(config, trials);
    let mut cells = Vec::new();
    for &value in &values {
        for &snr_db in &config.snr_db() {
            for &q in &config.quantizers() {
                cells.push(Cell { value, snr_db, q });
            }
        }
    }
    let seeds = out.trial_seeds.clone();
    struct TrialRow {
        row: Vec<String>,
        converged: bool,
        metrics: [Option<f64>; 3],
        dumps: Vec<(String, Vec<u8>)>,
    }
    let rows = ordered_map(cells.len() * trials, |job| {
        let cell = cells[job / trials];
        let t = job % trials;
        let seed = seeds[t];
        let k = (!by_m).then_some(cell.value);
        let m = if by_m { cell.value } else { config.m() };
        let signal = config.signal.realize(k, derive_seed(seed, stream::SIGNAL))?;
        let outcome = smv_trial(&signal, m, cell.snr_db, cell.q, config, seed)?;
        let loc = localize(&outcome, &signal.frequencies(), config.peak_tol)?;
        let nerr = soft(normalized_error(&outcome.solution.xhat_vector(), &outcome.xstar))?;
        let metrics = [nerr, Some(outcome.scaled_l2_error()), loc.hausdorff];
        let converged = outcome.converged();
        let row = vec![
            sweep.to_string(),
            cell.value.to_string(),
            fmt_f64(cell.snr_db),
            cell.q.to_string(),
            t.to_string(),
            seed.to_string(),
            converged.to_string(),
            outcome.solution.diagnostics.iterations.to_string(),
            fmt_opt(metrics[0]),
            fmt_opt(metrics[1]),
            fmt_opt(metrics[2]),
            loc.all_recovered.to_string(),
            loc.estimates.len().to_string(),
            outcome.optimality_ok.to_string(),
            m.to_string(),
        ];
        let mut dumps = Vec::new();
        if config.dump_measurements {
            let stem = format!("dumps/{sweep}{}_snr{}_{}_trial{t}", cell.value, cell.snr_db, dump_name(cell.q));
            dumps.push((format!("{stem}.meas"), measurement_dump(&outcome)?));
            dumps.push((format!("{stem}.xhat"), xhat_dump(&outcome)?));
        }
        Ok(TrialRow { row, converged, metrics, dumps })
    })?;

    let name = config.experiment_kind.as_str();
    let mut trial_ds = Dataset::new(name, &TRIAL_COLUMNS);
    let mut summary = Dataset::new(&format!("{name}_summary"), &SUMMARY_COLUMNS);
    for (ci, cell) in cells.iter().enumerate() {
        let chunk = &rows[ci * trials..(ci + 1) * trials];
        let unconverged = chunk.iter().filter(|r| !r.converged).count();
        for (mi, metric) in RECOVERY_METRICS.iter().enumerate() {
            let vals: Vec<f64> = chunk.iter().filter(|r| r.converged).filter_map(|r| r.metrics[mi]).collect();
            let s = summarize(&vals);
            summary.push(vec![
                sweep.to_string(),
                cell.value.to_string(),
                fmt_f64(cell.snr_db),
                cell.q.to_string(),
                metric.to_string(),
                fmt_opt(s.map(|s| s.median)),
                fmt_opt(s.map(|s| s.q1)),
                fmt_opt(s.map(|s| s.q3)),
                s.map(|s| s.count).unwrap_or(0).to_string(),
                unconverged.to_string(),
                config.seed.to_string(),
            ]);
        }
        out.solves += trials;
        out.unconverged += unconverged;
    }
    for r in rows {
        trial_ds.push(r.row);
        out.attachments.extend(r.dumps);
    }
    out.datasets.push(trial_ds);
    out.datasets.push(summary);
    Ok(out)
}

/// Frequencies of `x̂` by MUSIC with the true model order, matched to the
/// sorted true frequencies.
fn matched_frequencies(xhat: &[Complex64], k: usize) -> Result<Option<Vec<f64>>> {
    Ok(soft(subspace_estimate(SubspaceInput::Signal(xhat), k))?.map(|e| e.frequencies))
}

/// Two-tone signal used when the config asks for the reference signal.
fn mse_signal(config: &ExperimentConfig, seed: u64) -> Result<SpectralSignal> {
    match config.signal {
        crate::config::SignalSpec::Reference { n } => {
            let r = SpectralSignal::reference(n);
            Ok(SpectralSignal::new(n, r.components()[..2].to_vec())?)
        }
        ref spec => spec.realize(None, derive_seed(seed, stream::SIGNAL)),
    }
}

pub const MSE_TRIAL_COLUMNS: [&str; 11] = [
    "snr_db",
    "quantizer",
    "trial_index",
    "seed",
    "converged",
    "f_index",
    "f_true",
    "f_est",
    "sq_error",
    "crb",
    "m",
];

pub const MSE_SUMMARY_COLUMNS: [&str; 9] =
    ["snr_db", "quantizer", "f_index", "mse", "median_sq_error", "crb", "count", "unconverged", "seed"];

/// Frequency MSE of MUSIC on the recovered signal, next to the CRB of the
/// same trial's matrix and noise level (averaged over trials).
pub fn run_mse_vs_crb(config: &ExperimentConfig) -> Result<RunOutput> {
    let trials = config.trials();
    let mut out = RunOutput::new(config, trials);
    let seeds = out.trial_seeds.clone();
    let snr = config.snr_db();
    let quantizers = config.quantizers();
    let m = config.m();
    let cells: Vec<(f64, QuantizerChoice)> =
        snr.iter().flat_map(|&s| quantizers.iter().map(move |&q| (s, q))).collect();
    struct Trial {
        converged: bool,
        truth: Vec<f64>,
        est: Option<Vec<f64>>,
        crb: Option<Vec<f64>>,
    }
    let results = ordered_map(cells.len() * trials, |job| {
        let (snr_db, q) = cells[job / trials];
        let seed = seeds[job % trials];
        let signal = mse_signal(config, seed)?;
        let outcome = smv_trial(&signal, m, snr_db, q, config, seed)?;
        let est = matched_frequencies(&outcome.solution.xhat_vector(), signal.k())?;
        let crb = crb_for(&outcome.measurements.matrix, &signal, outcome.sigma, q)?;
        Ok(Trial { converged: outcome.converged(), truth: signal.frequencies(), est, crb })
    })?;

    let mut trial_ds = Dataset::new("mse_vs_crb", &MSE_TRIAL_COLUMNS);
    let mut summary = Dataset::new("mse_vs_crb_summary", &MSE_SUMMARY_COLUMNS);
    for (ci, &(snr_db, q)) in cells.iter().enumerate() {
        let chunk = &results[ci * trials..(ci + 1) * trials];
        let unconverged = chunk.iter().filter(|r| !r.converged).count();
        out.solves += trials;
        out.unconverged += unconverged;
        let k = chunk[0].truth.len();
        let mut sq = vec![Vec::new(); k];
        let mut crbs = vec![Vec::new(); k];
        for (t, r) in chunk.iter().enumerate() {
            for fi in 0..r.truth.len() {
                let f_est = r.est.as_ref().map(|e| e[fi]);
                let err = f_est.map(|g| wrap_distance(g, r.truth[fi]).powi(2));
                let crb = r.crb.as_ref().map(|c| c[3 * fi]);
                if r.converged {
                    sq[fi].extend(err);
                    crbs[fi].extend(crb);
                }
                trial_ds.push(vec![
                    fmt_f64(snr_db),
                    q.to_string(),
                    t.to_string(),
                    seeds[t].to_string(),
                    r.converged.to_string(),
                    fi.to_string(),
                    fmt_f64(r.truth[fi]),
                    fmt_opt(f_est),
                    fmt_opt(err),
                    fmt_opt(crb),
                    m.to_string(),
                ]);
            }
        }
        for fi in 0..k {
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            summary.push(vec![
                fmt_f64(snr_db),
                q.to_string(),
                fi.to_string(),
                fmt_opt(mean(&sq[fi])),
                fmt_opt(summarize(&sq[fi]).map(|s| s.median)),
                fmt_opt(mean(&crbs[fi])),
                sq[fi].len().to_string(),
                unconverged.to_string(),
                config.seed.to_string(),
            ]);
        }
    }
    out.datasets.push(trial_ds);
    out.datasets.push(summary);
    Ok(out)
}
