//! Fisher information and Cramér-Rao bounds for the line parameters
//! `κ = (f_1, A_1, φ_1, …, f_K, A_K, φ_K)`.
//!
//! Each measurement contributes through `s_i = Re(a_iᴴx)` and
//! `r_i = Im(a_iᴴx)`, whose real noise has variance `σ²/2`. Derivatives follow
//! the ordinary real chain rule, `∂s_i/∂κ = Re(a_iᴴ ∂x/∂κ)`.

use crate::error::{Error, Result};
use crate::gaussian::{onebit_weight, ScaledInterval};
use crate::linalg::CMatrix;
use crate::quantization::QuantizerSpec;
use crate::sensing::SensingMatrix;
use crate::spectral_model::{atom, atom_derivative, synthesize, SpectralSignal};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

pub use crate::gaussian::phi;

/// Largest condition number for which a FIM is inverted.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    Frequency,
    Amplitude,
    Phase,
}

impl ParameterKind {
    /// Kind of entry `index` in the interleaved parameter vector.
    pub fn of_index(index: usize) -> Self {
        match index % 3 {
            0 => ParameterKind::Frequency,
            1 => ParameterKind::Amplitude,
            _ => ParameterKind::Phase,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ParameterKind::Frequency => "f",
            ParameterKind::Amplitude => "A",
            ParameterKind::Phase => "phi",
        }
    }
}

impl fmt::Display for ParameterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Measurement model a FIM was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Onebit,
    Quantized,
    Unquantized,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::Onebit => "onebit",
            ModelTag::Quantized => "quantized",
            ModelTag::Unquantized => "unquantized",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FimResult {
    pub fim: DMatrix<f64>,
    /// `[I⁻¹]_ii`, or `None` when the FIM is singular or ill-conditioned.
    pub crb_diagonal: Option<Vec<f64>>,
    pub model_tag: ModelTag,
}

impl FimResult {
    fn new(fim: DMatrix<f64>, model_tag: ModelTag) -> Self {
        let crb_diagonal = crb_from_fim(&fim).ok();
        FimResult { fim, crb_diagonal, model_tag }
    }

    /// Smallest eigenvalue relative to the spectral norm; used by PSD checks.
    pub fn relative_min_eigenvalue(&self) -> f64 {
        let eig = SymmetricEigen::new(symmetrized(&self.fim)).eigenvalues;
        let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max == 0.0 {
            return 0.0;
        }
        eig.iter().fold(f64::INFINITY, |m, &v| m.min(v)) / max
    }
}

/// `n × 3K` matrix whose columns are `∂x/∂κ`: `c_k g(f_k)`,
/// `e^{j2πφ_k} v(f_k)` and `j2π c_k v(f_k)`.
pub fn signal_jacobian(signal: &SpectralSignal) -> CMatrix {
    let n = signal.n();
    let mut j = CMatrix::zeros(n, 3 * signal.k());
    for (k, comp) in signal.components().iter().enumerate() {
        // components are validated, so the frequency is in range
        let v = atom(comp.f, n).expect("validated frequency");
        let g = atom_derivative(comp.f, n).expect("validated frequency");
        let c = comp.coefficient();
        let unit = Complex64::cis(2.0 * PI * comp.phi);
        let dphase = Complex64::new(0.0, 2.0 * PI) * c;
        for i in 0..n {
            j[(i, 3 * k)] = c * g[i];
            j[(i, 3 * k + 1)] = unit * v[i];
            j[(i, 3 * k + 2)] = dphase * v[i];
        }
    }
    j
}

/// Per-row real and imaginary parts of `a_iᴴx` and of `a_iᴴ ∂x/∂κ`.
struct Projections {
    s: Vec<f64>,
    r: Vec<f64>,
    ds: DMatrix<f64>,
    dr: DMatrix<f64>,
}

fn projections(a: &SensingMatrix, signal: &SpectralSignal) -> Result<Projections> {
    if a.cols() != signal.n() {
        return Err(Error::DimensionMismatch { expected: signal.n(), got: a.cols() });
    }
    let x = synthesize(signal);
    let jac = signal_jacobian(signal);
    let z = a.apply(&x)?;
    let p = jac.ncols();
    let m = a.rows();
    let mut ds = DMatrix::zeros(m, p);
    let mut dr = DMatrix::zeros(m, p);
    for i in 0..m {
        let row = a.row(i);
        for c in 0..p {
            let v: Complex64 = row.iter().zip(jac.column(c).iter()).map(|(a, b)| a * b).sum();
            ds[(i, c)] = v.re;
            dr[(i, c)] = v.im;
        }
    }
    Ok(Projections { s: z.iter().map(|v| v.re).collect(), r: z.iter().map(|v| v.im).collect(), ds, dr })
}

/// `Σ_i w_s[i] ∂s_i∂s_iᵀ + w_r[i] ∂r_i∂r_iᵀ`, accumulated in row order.
fn weighted_gram(p: &Projections, ws: &[f64], wr: &[f64]) -> DMatrix<f64> {
    let dim = p.ds.ncols();
    let mut fim = DMatrix::zeros(dim, dim);
    for i in 0..ws.len() {
        for a in 0..dim {
            let sa = ws[i] * p.ds[(i, a)];
            let ra = wr[i] * p.dr[(i, a)];
            for b in 0..=a {
                fim[(a, b)] += sa * p.ds[(i, b)] + ra * p.dr[(i, b)];
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            fim[(b, a)] = fim[(a, b)];
        }
    }
    fim
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma == 0.0 {
        // noiseless quantized measurements carry no Fisher information about
        // the continuous parameters almost everywhere
        return Err(Error::SingularFim { condition: f64::INFINITY });
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level {sigma} must be positive")));
    }
    Ok(())
}

/// FIM for sign-quantized measurements, using the closed-form weight
/// `4e^{-2u²}/(πσ²(1 - 4Φ²(u)))` with `u = s_i/σ`.
pub fn fim_onebit(a: &SensingMatrix, signal: &SpectralSignal, sigma: f64) -> Result<FimResult> {
    check_sigma(sigma)?;
    let p = projections(a, signal)?;
    let scale = 4.0 / (PI * sigma * sigma);
    let ws: Vec<f64> = p.s.iter().map(|&s| scale * onebit_weight(s / sigma)).collect();
    let wr: Vec<f64> = p.r.iter().map(|&r| scale * onebit_weight(r / sigma)).collect();
    Ok(FimResult::new(weighted_gram(&p, &ws, &wr), ModelTag::Onebit))
}

/// `Γ = Σ_ℓ (e^{-α_ℓ²} - e^{-β_ℓ²})² / (Φ(β_ℓ) - Φ(α_ℓ))` over all `L` cells,
/// with `α_ℓ = (t_ℓ - s)/σ` and `β_ℓ = (t_{ℓ+1} - s)/σ`.
pub fn gamma(spec: &QuantizerSpec, s: f64, sigma: f64) -> f64 {
    let edges = spec.edges();
    edges
        .windows(2)
        .map(|w| ScaledInterval::new((w[0] - s) / sigma, (w[1] - s) / sigma).fisher_weight())
        .sum()
}

/// FIM for measurements quantized by `spec`. Depends only on the thresholds.
pub fn fim_quantized(
    a: &SensingMatrix,
    signal: &SpectralSignal,
    sigma: f64,
    spec: &QuantizerSpec,
) -> Result<FimResult> {
    check_sigma(sigma)?;
    let p = projections(a, signal)?;
    let scale = 1.0 / (PI * sigma * sigma);
    let ws: Vec<f64> = p.s.iter().map(|&s| scale * gamma(spec, s, sigma)).collect();
    let wr: Vec<f64> = p.r.iter().map(|&r| scale * gamma(spec, r, sigma)).collect();
    Ok(FimResult::new(weighted_gram(&p, &ws, &wr), ModelTag::Quantized))
}

/// FIM for the unquantized measurements `z = Ax + σε`: `(2/σ²)Σ_i (∂s_i∂s_iᵀ + ∂r_i∂r_iᵀ)`.
pub fn fim_unquantized(a: &SensingMatrix, signal: &SpectralSignal, sigma: f64) -> Result<FimResult> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::ZeroNoise("the unquantized FIM needs sigma > 0"));
    }
    let p = projections(a, signal)?;
    let w = vec![2.0 / (sigma * sigma); a.rows()];
    Ok(FimResult::new(weighted_gram(&p, &w, &w), ModelTag::Unquantized))
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Diagonal of `I⁻¹` via a symmetric eigendecomposition. Fails when the
/// condition number exceeds [`MAX_CONDITION`] or an eigenvalue is not positive.
pub fn crb_from_fim(fim: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !fim.is_square() {
        return Err(Error::DimensionMismatch { expected: fim.nrows(), got: fim.ncols() });
    }
    let eig = SymmetricEigen::new(symmetrized(fim));
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if !(min > 0.0) || max / min > MAX_CONDITION {
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        return Err(Error::SingularFim { condition });
    }
    let n = fim.nrows();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|k| eig.eigenvectors[(i, k)].powi(2) / eig.eigenvalues[k])
                .sum()
        })
        .collect())
}
