//! Frequency estimates from AST solutions and the error metrics used to
//! score them.
//!
//! Two estimators are provided: peaks of the dual polynomial at level one,
//! and grid MUSIC on a covariance built from the recovered signal.

use crate::ast::{AstSolution, DualPolynomial, MIN_GRID_FACTOR};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigh, orthonormal_basis, toeplitz_hermitian, vector_norm, CMatrix};
use crate::spectral_model::wrap_distance;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default level slack for dual-polynomial peaks.
pub const DEFAULT_PEAK_TOL: f64 = 1e-2;
/// Evaluation grid size as a multiple of `n`.
pub const DEFAULT_GRID_FACTOR: usize = 16;
/// Relative singular-value cutoff when forming orthonormal bases.
pub const BASIS_RANK_TOL: f64 = 1e-6;
/// Rounds of shrinking three-point parabolic refinement for MUSIC minima.
const PARABOLIC_ROUNDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    DualPoly,
    Subspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEstimate {
    /// Strictly increasing, in `[0, 1)`.
    pub frequencies: Vec<f64>,
    /// `Q(f)` for dual-polynomial peaks, the MUSIC pseudospectrum otherwise.
    pub peak_values: Vec<f64>,
    pub method: MethodTag,
}

impl FrequencyEstimate {
    fn sorted(mut pairs: Vec<(f64, f64)>, method: MethodTag) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        FrequencyEstimate {
            frequencies: pairs.iter().map(|p| p.0).collect(),
            peak_values: pairs.iter().map(|p| p.1).collect(),
            method,
        }
    }
}

/// `Q(g/grid_size)` for `Q(f) = |qᴴv(f)|`.
pub fn dual_polynomial(q: &[Complex64], grid_size: usize) -> Result<Vec<f64>> {
    check_grid(q.len(), grid_size)?;
    Ok(DualPolynomial::from_vector(q).grid(grid_size))
}

/// `Q(g/grid_size)` for `Q(f) = ‖Qᴴv(f)‖₂`.
pub fn dual_polynomial_mmv(q: &CMatrix, grid_size: usize) -> Result<Vec<f64>> {
    check_grid(q.nrows(), grid_size)?;
    Ok(DualPolynomial::new(q).grid(grid_size))
}

fn check_grid(n: usize, grid_size: usize) -> Result<()> {
    if grid_size < MIN_GRID_FACTOR * n {
        return Err(Error::InvalidArgument(format!("grid size {grid_size} below {MIN_GRID_FACTOR}n")));
    }
    Ok(())
}

/// Frequencies where the dual polynomial of `solution` reaches
/// `1 - peak_tol`, Newton-refined and with peaks closer than `0.5/n` merged.
pub fn localize_dual(solution: &AstSolution, peak_tol: f64) -> Result<FrequencyEstimate> {
    let n = solution.dual.nrows();
    localize_dual_on_grid(solution, peak_tol, DEFAULT_GRID_FACTOR * n)
}

pub fn localize_dual_on_grid(solution: &AstSolution, peak_tol: f64, grid_size: usize) -> Result<FrequencyEstimate> {
    let n = solution.dual.nrows();
    check_grid(n, grid_size)?;
    if solution.xhat.iter().all(|v| v.norm() == 0.0) {
        return Err(Error::NoPeaks);
    }
    let level = 1.0 - peak_tol;
    let mut peaks: Vec<(f64, f64)> = DualPolynomial::new(&solution.dual)
        .local_maxima(grid_size)
        .into_iter()
        .filter(|p| p.1 >= level)
        .collect();
    if peaks.is_empty() {
        return Err(Error::NoPeaks);
    }
    // merge, strongest first
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    let min_gap = 0.5 / n as f64;
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for p in peaks {
        if kept.iter().all(|k| wrap_distance(k.0, p.0) >= min_gap) {
            kept.push(p);
        }
    }
    Ok(FrequencyEstimate::sorted(kept, MethodTag::DualPoly))
}

/// Data from which MUSIC builds its covariance.
#[derive(Debug, Clone, Copy)]
pub enum SubspaceInput<'a> {
    /// A single recovered vector, smoothed forward-backward with window `⌊n/2⌋`.
    Signal(&'a [Complex64]),
    /// Columns as snapshots: sample covariance `X Xᴴ / T`.
    Snapshots(&'a CMatrix),
    /// Average of the forward-backward smoothed covariances of each column.
    SmoothedSnapshots(&'a CMatrix),
    /// Toeplitz generator `u` of an AST solution; `T(u)` is the covariance.
    Toeplitz(&'a [Complex64]),
}

fn smoothed_covariance(x: &[Complex64], window: usize) -> CMatrix {
    let n = x.len();
    let count = n - window + 1;
    let mut r = CMatrix::zeros(window, window);
    for l in 0..count {
        let seg = &x[l..l + window];
        for i in 0..window {
            for j in 0..window {
                r[(i, j)] += seg[i] * seg[j].conj();
            }
        }
    }
    r /= Complex64::new(count as f64, 0.0);
    // backward average: J conj(R) J
    let back = CMatrix::from_fn(window, window, |i, j| r[(window - 1 - i, window - 1 - j)].conj());
    (r + back) * Complex64::new(0.5, 0.0)
}

fn covariance(input: &SubspaceInput<'_>) -> Result<CMatrix> {
    Ok(match *input {
        SubspaceInput::Signal(x) => {
            if x.len() < 2 {
                return Err(Error::ModelOrder { k: 1, dim: 1 });
            }
            smoothed_covariance(x, x.len() / 2)
        }
        SubspaceInput::Snapshots(x) => (x * x.adjoint()) / Complex64::new(x.ncols() as f64, 0.0),
        SubspaceInput::SmoothedSnapshots(x) => {
            let n = x.nrows();
            if n < 2 {
                return Err(Error::ModelOrder { k: 1, dim: 1 });
            }
            let mut acc = CMatrix::zeros(n / 2, n / 2);
            for c in 0..x.ncols() {
                let col: Vec<Complex64> = x.column(c).iter().copied().collect();
                acc += smoothed_covariance(&col, n / 2);
            }
            acc / Complex64::new(x.ncols() as f64, 0.0)
        }
        SubspaceInput::Toeplitz(u) => toeplitz_hermitian(u),
    })
}

/// `‖Eᴴv(f)‖²` for a noise basis `E` (rows conjugated for speed).
fn music_denominator(noise_conj: &[Vec<Complex64>], f: f64) -> f64 {
    noise_conj
        .iter()
        .map(|e| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, c) in e.iter().enumerate() {
                acc += c * Complex64::cis(2.0 * PI * f * i as f64);
            }
            acc.norm_sqr()
        })
        .sum()
}

/// `K` frequencies from grid MUSIC with parabolic refinement of the
/// pseudospectrum peaks.
pub fn subspace_estimate(input: SubspaceInput<'_>, k: usize) -> Result<FrequencyEstimate> {
    let r = covariance(&input)?;
    let dim = r.nrows();
    if k == 0 || k >= dim {
        return Err(Error::ModelOrder { k, dim });
    }
    if r.iter().all(|v| v.norm() == 0.0) {
        return Err(Error::ZeroInput("covariance"));
    }
    let (_, vecs) = hermitian_eigh(&r)?;
    // eigenvalues ascending: the first dim - k vectors span the noise subspace
    let noise: Vec<Vec<Complex64>> = (0..dim - k).map(|c| vecs.column(c).iter().map(|v| v.conj()).collect()).collect();
    let grid = DEFAULT_GRID_FACTOR * dim.max(2) * 2;
    let d: Vec<f64> = (0..grid).map(|g| music_denominator(&noise, g as f64 / grid as f64)).collect();
    let mut minima: Vec<usize> = (0..grid)
        .filter(|&g| {
            let prev = d[(g + grid - 1) % grid];
            let next = d[(g + 1) % grid];
            d[g] < prev && d[g] <= next
        })
        .collect();
    if minima.is_empty() {
        return Err(Error::NoPeaks);
    }
    minima.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    minima.truncate(k);
    let cell = 1.0 / grid as f64;
    let pairs = minima
        .into_iter()
        .map(|g| {
            let mut f = g as f64 * cell;
            let mut h = cell;
            for _ in 0..PARABOLIC_ROUNDS {
                let (a, b, c) = (music_denominator(&noise, f - h), music_denominator(&noise, f), music_denominator(&noise, f + h));
                let curv = a - 2.0 * b + c;
                if curv > 0.0 {
                    f += (0.5 * (a - c) / curv).clamp(-1.0, 1.0) * h;
                }
                h /= 8.0;
            }
            let f = f.rem_euclid(1.0);
            (f, 1.0 / music_denominator(&noise, f).max(f64::MIN_POSITIVE))
        })
        .collect();
    Ok(FrequencyEstimate::sorted(pairs, MethodTag::Subspace))
}

/// `max(sup_a inf_b |a-b|, sup_b inf_a |a-b|)`; `wrap` switches to the
/// circular distance.
pub fn hausdorff(f_true: &[f64], f_est: &[f64], wrap: bool) -> Result<f64> {
    if f_true.is_empty() || f_est.is_empty() {
        return Err(Error::ZeroInput("frequency set"));
    }
    let dist = |a: f64, b: f64| if wrap { wrap_distance(a, b) } else { (a - b).abs() };
    let directed = |from: &[f64], to: &[f64]| {
        from.iter()
            .map(|&a| to.iter().map(|&b| dist(a, b)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(f_true, f_est).max(directed(f_est, f_true)))
}

/// `1 - |⟨x̂, x⋆⟩|² / (‖x̂‖²‖x⋆‖²)`, the squared sine of the angle between them.
pub fn normalized_error(xhat: &[Complex64], xstar: &[Complex64]) -> Result<f64> {
    if xhat.len() != xstar.len() {
        return Err(Error::DimensionMismatch { expected: xstar.len(), got: xhat.len() });
    }
    let a = vector_norm(xhat);
    let b = vector_norm(xstar);
    if a == 0.0 || b == 0.0 {
        return Err(Error::ZeroInput("normalized_error needs nonzero vectors"));
    }
    let c = crate::linalg::inner(xhat, xstar).norm() / (a * b);
    Ok((1.0 - c * c).clamp(0.0, 1.0))
}

/// Squared sine of the largest principal angle between the column spans.
pub fn subspace_angle_error(xhat: &CMatrix, xstar: &CMatrix) -> Result<f64> {
    if xhat.nrows() != xstar.nrows() {
        return Err(Error::DimensionMismatch { expected: xstar.nrows(), got: xhat.nrows() });
    }
    let u1 = orthonormal_basis(xhat, BASIS_RANK_TOL);
    let u2 = orthonormal_basis(xstar, BASIS_RANK_TOL);
    if u1.ncols() == 0 || u2.ncols() == 0 {
        return Err(Error::ZeroInput("subspace_angle_error needs nonzero matrices"));
    }
    let cross = u1.adjoint() * u2;
    let smin = cross.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((1.0 - smin * smin).clamp(0.0, 1.0))
}
