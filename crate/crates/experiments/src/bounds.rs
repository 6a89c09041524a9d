//! Cramér-Rao bound curves.
//!
//! Both runners draw a single sensing matrix from trial 0's seed and keep it
//! fixed across the SNR grid, so the curves differ only through σ.

use crate::config::ExperimentConfig;
use crate::dataset::{fmt_f64, Dataset};
use crate::error::Result;
use crate::run::RunOutput;
use qscs::crb::{fim_onebit, fim_quantized, fim_unquantized, FimResult, ParameterKind};
use qscs::quantization::{matched_input_std, QuantizerChoice};
use qscs::rng::{derive_seed, stream};
use qscs::sensing::{gaussian_matrix, sigma_for_snr_db, SensingMatrix};
use qscs::spectral_model::{synthesize, SpectralSignal};

pub const CRB_COLUMNS: [&str; 10] = [
    "snr_db",
    "param_index",
    "param_kind",
    "crb_value",
    "model_tag",
    "bit_depth",
    "quantizer",
    "m",
    "seed",
    "trial_index",
];

pub const CROSSOVER_COLUMNS: [&str; 8] = [
    "param_index",
    "param_kind",
    "quantizer_a",
    "quantizer_b",
    "crossover_snr_db",
    "crossings",
    "seed",
    "trial_index",
];

/// CRB diagonal for one model, or `None` where the FIM is singular.
pub fn crb_for(a: &SensingMatrix, signal: &SpectralSignal, sigma: f64, q: QuantizerChoice) -> Result<Option<Vec<f64>>> {
    let fim: qscs::Result<FimResult> = match q {
        QuantizerChoice::Sign => fim_onebit(a, signal, sigma),
        QuantizerChoice::None => fim_unquantized(a, signal, sigma),
        QuantizerChoice::Lloyd(_) => {
            let energy: f64 = synthesize(signal).iter().map(|v| v.norm_sqr()).sum();
            let spec = q.build(matched_input_std(energy, sigma))?.expect("quantized choice");
            fim_quantized(a, signal, sigma, &spec)
        }
    };
    match fim {
        Ok(f) => Ok(f.crb_diagonal),
        Err(qscs::Error::SingularFim { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn model_tag(q: QuantizerChoice) -> &'static str {
    match q {
        QuantizerChoice::Sign => "onebit",
        QuantizerChoice::Lloyd(_) => "quantized",
        QuantizerChoice::None => "unquantized",
    }
}

/// Appends the `3K` rows of one (SNR, model) point.
fn push_crb_rows(
    ds: &mut Dataset,
    snr_db: f64,
    q: QuantizerChoice,
    crb: Option<&[f64]>,
    params: usize,
    m: usize,
    seed: u64,
) {
    for p in 0..params {
        ds.push(vec![
            fmt_f64(snr_db),
            p.to_string(),
            ParameterKind::of_index(p).as_str().to_string(),
            crb.map(|c| fmt_f64(c[p])).unwrap_or_default(),
            model_tag(q).to_string(),
            q.bit_depth().to_string(),
            q.to_string(),
            m.to_string(),
            seed.to_string(),
            "0".to_string(),
        ]);
    }
}

struct Curves {
    /// `crb[q][snr]`, missing where the FIM is singular.
    crb: Vec<Vec<Option<Vec<f64>>>>,
}

fn sweep(
    config: &ExperimentConfig,
    matrices: &[SensingMatrix],
    signal: &SpectralSignal,
    quantizers: &[QuantizerChoice],
) -> Result<Curves> {
    let energy: f64 = synthesize(signal).iter().map(|v| v.norm_sqr()).sum();
    let snr = config.snr_db();
    let jobs = quantizers.len() * snr.len();
    let flat = crate::run::ordered_map(jobs, |j| {
        let (qi, si) = (j / snr.len(), j % snr.len());
        crb_for(&matrices[qi], signal, sigma_for_snr_db(energy, snr[si]), quantizers[qi])
    })?;
    let crb = flat.chunks(snr.len()).map(|c| c.to_vec()).collect();
    Ok(Curves { crb })
}

fn base(config: &ExperimentConfig) -> Result<(RunOutput, SpectralSignal, u64)> {
    let out = RunOutput::new(config, 1);
    let seed = out.trial_seeds[0];
    let signal = config.signal.realize(None, derive_seed(seed, stream::SIGNAL))?;
    Ok((out, signal, seed))
}

/// CRB vs SNR for each quantizer at fixed `m`, all sharing one matrix.
pub fn run_crb_vs_snr(config: &ExperimentConfig) -> Result<RunOutput> {
    let (mut out, signal, seed) = base(config)?;
    let m = config.m();
    let a = gaussian_matrix(m, signal.n(), derive_seed(seed, stream::MATRIX))?;
    let quantizers = config.quantizers();
    let matrices = vec![a; quantizers.len()];
    let curves = sweep(config, &matrices, &signal, &quantizers)?;
    let mut ds = Dataset::new("crb_vs_snr", &CRB_COLUMNS);
    for (si, &snr) in config.snr_db().iter().enumerate() {
        for (qi, &q) in quantizers.iter().enumerate() {
            push_crb_rows(&mut ds, snr, q, curves.crb[qi][si].as_deref(), 3 * signal.k(), m, seed);
        }
    }
    out.datasets.push(ds);
    Ok(out)
}

/// Crossing points of two CRB curves: SNRs where the sign of
/// `log(crb_a) - log(crb_b)` changes, linearly interpolated in dB.
pub fn crossings(snr_db: &[f64], a: &[Option<f64>], b: &[Option<f64>]) -> Vec<f64> {
    let diff: Vec<(f64, f64)> = snr_db
        .iter()
        .zip(a.iter().zip(b))
        .filter_map(|(&s, (a, b))| match (a, b) {
            (Some(a), Some(b)) if *a > 0.0 && *b > 0.0 => Some((s, a.log10() - b.log10())),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for w in diff.windows(2) {
        let ((s0, d0), (s1, d1)) = (w[0], w[1]);
        if d0 == 0.0 {
            out.push(s0);
        } else if d0 * d1 < 0.0 {
            out.push(s0 + (s1 - s0) * d0 / (d0 - d1));
        }
    }
    if let Some(&(s, d)) = diff.last() {
        if d == 0.0 {
            out.push(s);
        }
    }
    out
}

/// CRB vs SNR at a fixed bit budget `B`: a `b`-bit model uses the first
/// `B/b` rows of one `B`-row matrix. Also reports where each model's curve
/// crosses the first model's curve, per parameter.
pub fn run_crb_fixed_bits(config: &ExperimentConfig) -> Result<RunOutput> {
    let (mut out, signal, seed) = base(config)?;
    let budget = config.bit_budget();
    let full = gaussian_matrix(budget, signal.n(), derive_seed(seed, stream::MATRIX))?;
    let quantizers = config.quantizers();
    let matrices = quantizers
        .iter()
        .map(|q| full.first_rows(budget / q.bit_depth() as usize))
        .collect::<qscs::Result<Vec<_>>>()?;
    let curves = sweep(config, &matrices, &signal, &quantizers)?;
    let snr = config.snr_db();
    let params = 3 * signal.k();

    let mut ds = Dataset::new("crb_fixed_bits", &CRB_COLUMNS);
    for (si, &s) in snr.iter().enumerate() {
        for (qi, &q) in quantizers.iter().enumerate() {
            push_crb_rows(&mut ds, s, q, curves.crb[qi][si].as_deref(), params, matrices[qi].rows(), seed);
        }
    }
    let mut cross = Dataset::new("crossovers", &CROSSOVER_COLUMNS);
    let param_curve = |qi: usize, p: usize| -> Vec<Option<f64>> {
        curves.crb[qi].iter().map(|c| c.as_ref().map(|v| v[p])).collect()
    };
    for qb in 1..quantizers.len() {
        for p in 0..params {
            let xs = crossings(&snr, &param_curve(0, p), &param_curve(qb, p));
            let cells: Vec<String> = if xs.is_empty() { vec![String::new()] } else { xs.iter().map(|&x| fmt_f64(x)).collect() };
            for c in cells {
                cross.push(vec![
                    p.to_string(),
                    ParameterKind::of_index(p).as_str().to_string(),
                    quantizers[0].to_string(),
                    quantizers[qb].to_string(),
                    c,
                    xs.len().to_string(),
                    seed.to_string(),
                    "0".to_string(),
                ]);
            }
        }
    }
    out.datasets.push(ds);
    out.datasets.push(cross);
    Ok(out)
}
