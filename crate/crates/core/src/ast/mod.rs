//! Atomic-norm soft thresholding (AST) for line spectra.
//!
//! The atomic norm of `x` is the gauge of the convex hull of `{c·v(f) : |c| = 1}`
//! and equals the value of the semidefinite program
//! `min (1/2n)Tr T(u) + w/2` subject to `[[T(u), x], [xᴴ, w]] ⪰ 0`.
//! The multi-snapshot norm replaces `x` by an `n × T` matrix and `w` by a
//! `T × T` block. All problems here are solved by ADMM on that form.

mod admm;
mod dual;

pub use admm::{Checkpoint, Diagnostics, SolverConfig, CHECK_INTERVAL};
pub use dual::DualPolynomial;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, hermitian_eigenvalues, toeplitz_hermitian, CMatrix};
use crate::sensing::SensingMatrix;
use admm::{DataTerm, Problem};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{self, Write};

/// Smallest grid accepted by the dual-norm evaluation, as a multiple of `n`.
pub const MIN_GRID_FACTOR: usize = 4;

/// `S = (1/m)AᴴY`, one column per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSignal {
    pub s: CMatrix,
    pub m_used: usize,
}

impl SurrogateSignal {
    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn snapshots(&self) -> usize {
        self.s.ncols()
    }

    /// First column as a vector.
    pub fn vector(&self) -> Vec<Complex64> {
        self.s.column(0).iter().copied().collect()
    }
}

/// `s = (1/m)Aᴴy`.
pub fn surrogate(a: &SensingMatrix, y: &[Complex64]) -> Result<SurrogateSignal> {
    surrogate_ensemble(a, &[y.to_vec()])
}

/// `S = (1/m)Aᴴ[y_1, …, y_T]`.
pub fn surrogate_ensemble(a: &SensingMatrix, ys: &[Vec<Complex64>]) -> Result<SurrogateSignal> {
    if ys.is_empty() {
        return Err(Error::InvalidArgument("at least one snapshot is required".into()));
    }
    let m = a.rows();
    let mut s = CMatrix::zeros(a.cols(), ys.len());
    for (t, y) in ys.iter().enumerate() {
        let col = a.apply_adjoint(y)?;
        for (i, v) in col.into_iter().enumerate() {
            s[(i, t)] = v / m as f64;
        }
    }
    Ok(SurrogateSignal { s, m_used: m })
}

/// `λ = 2/√(π(1/SNR + 1))`: the surrogate of sign-quantized Gaussian
/// measurements has mean `λ x/‖x‖₂`.
pub fn expected_scale(snr: f64) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(Error::InvalidArgument(format!("SNR {snr} must be positive")));
    }
    Ok(2.0 / (PI * (1.0 / snr + 1.0)).sqrt())
}

/// `τ = η√(n ln n / m)`.
pub fn default_tau(n: usize, m: usize, eta: f64) -> Result<f64> {
    if n < 2 || m == 0 || !(eta >= 1.0) {
        return Err(Error::InvalidArgument(format!("default_tau needs n ≥ 2, m ≥ 1, η ≥ 1 (got {n}, {m}, {eta})")));
    }
    let n = n as f64;
    Ok(eta * (n * n.ln() / m as f64).sqrt())
}

/// `τ_T = √(n ln n / (10 m T))`.
pub fn default_tau_mmv(n: usize, m: usize, t: usize) -> Result<f64> {
    if n < 2 || m == 0 || t == 0 {
        return Err(Error::InvalidArgument(format!("default_tau_mmv needs n ≥ 2, m, T ≥ 1 (got {n}, {m}, {t})")));
    }
    let n = n as f64;
    Ok((n * n.ln() / (10.0 * (m * t) as f64)).sqrt())
}

/// `τ = η σ √(m n ln n)` for `½‖z - Ax‖² + τ‖x‖_A`, the level of
/// `sup_f |v(f)ᴴAᴴσε|` for i.i.d. complex Gaussian `A` and noise.
pub fn default_tau_unquantized(n: usize, m: usize, sigma: f64, eta: f64) -> Result<f64> {
    if n < 2 || m == 0 || !(sigma > 0.0) || !(eta > 0.0) {
        return Err(Error::InvalidArgument("default_tau_unquantized needs n ≥ 2, m ≥ 1, σ > 0, η > 0".into()));
    }
    let nf = n as f64;
    Ok(eta * sigma * (m as f64 * nf * nf.ln()).sqrt())
}

fn check_grid(n: usize, grid_size: usize) -> Result<()> {
    if grid_size < MIN_GRID_FACTOR * n {
        return Err(Error::InvalidArgument(format!("grid size {grid_size} below {MIN_GRID_FACTOR}n = {}", MIN_GRID_FACTOR * n)));
    }
    Ok(())
}

/// `‖q‖*_A = sup_f |qᴴv(f)|`, evaluated on a grid and polished by Newton.
pub fn dual_atomic_norm(q: &[Complex64], grid_size: usize) -> Result<f64> {
    check_grid(q.len(), grid_size)?;
    Ok(DualPolynomial::from_vector(q).sup_norm(grid_size))
}

/// `sup_f ‖Qᴴv(f)‖₂`, the dual of the multi-snapshot atomic norm.
pub fn dual_atomic_norm_mmv(q: &CMatrix, grid_size: usize) -> Result<f64> {
    check_grid(q.nrows(), grid_size)?;
    Ok(DualPolynomial::new(q).sup_norm(grid_size))
}

/// `‖x‖_A` as the value of its semidefinite characterization.
pub fn atomic_norm(x: &[Complex64], config: &SolverConfig) -> Result<f64> {
    atomic_norm_mmv(&CMatrix::from_column_slice(x.len(), 1, x), config)
}

/// Multi-snapshot atomic norm of an `n × T` matrix.
pub fn atomic_norm_mmv(x: &CMatrix, config: &SolverConfig) -> Result<f64> {
    if x.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let problem = Problem { data: DataTerm::Fixed { x }, tau: 1.0 };
    let out = admm::solve(&problem, config)?;
    if !out.diagnostics.converged {
        return Err(Error::NotConverged { what: "atomic norm SDP", iterations: out.diagnostics.iterations });
    }
    Ok(0.5 * (out.u[0].re + out.w.diagonal().iter().map(|v| v.re).sum::<f64>()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    /// `argmin ½‖x - s‖² + τ‖x‖_A`.
    Smv,
    /// `argmin ‖X - S‖_F² + τ_T‖X‖_A`.
    Mmv,
    /// `argmin ½‖z - Ax‖² + τ‖x‖_A`.
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AstSolution {
    pub kind: SolutionKind,
    /// Estimate, `n × T` (`T = 1` except for the multi-snapshot problem).
    pub xhat: CMatrix,
    /// Generator of the Toeplitz block `T(u)`.
    pub u: Vec<Complex64>,
    /// Trade-off block: the scalar `w` as `1 × 1`, or `W` (`T × T`).
    pub trade: CMatrix,
    /// Dual certificate: negative data gradient at `xhat` divided by
    /// `effective_tau`, e.g. `(s - x̂)/τ`.
    pub dual: CMatrix,
    /// Regularization weight as passed in.
    pub tau: f64,
    /// Weight once the data term is written as `½‖·‖²` (`τ_T/2` for the
    /// multi-snapshot problem, `τ` otherwise).
    pub effective_tau: f64,
    pub diagnostics: Diagnostics,
}

/// Result of checking the first-order optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    /// `‖dual‖*_A`, which must not exceed 1.
    pub dual_norm: f64,
    /// `‖x̂‖_A` used for the complementarity check.
    pub atomic_norm: f64,
    /// `|Re⟨τq̂, x̂⟩ - τ‖x̂‖_A| / (τ max(1, ‖x̂‖_A))`.
    pub complementarity: f64,
}

impl OptimalityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.dual_norm <= 1.0 + tol && self.complementarity <= tol
    }
}

impl AstSolution {
    /// First column of the estimate.
    pub fn xhat_vector(&self) -> Vec<Complex64> {
        self.xhat.column(0).iter().copied().collect()
    }

    pub fn dual_vector(&self) -> Vec<Complex64> {
        self.dual.column(0).iter().copied().collect()
    }

    pub fn converged(&self) -> bool {
        self.diagnostics.converged
    }

    /// `(u₀ + Tr W)/2`, the SDP value attained by the solution, which equals
    /// `‖x̂‖_A` at optimality.
    pub fn atomic_norm_estimate(&self) -> f64 {
        0.5 * (self.u[0].re + self.trade.diagonal().iter().map(|v| v.re).sum::<f64>())
    }

    /// `[[T(u), X̂], [X̂ᴴ, W]]`.
    pub fn block_matrix(&self) -> CMatrix {
        let n = self.u.len();
        let t = self.xhat.ncols();
        let mut m = CMatrix::zeros(n + t, n + t);
        m.view_mut((0, 0), (n, n)).copy_from(&toeplitz_hermitian(&self.u));
        m.view_mut((0, n), (n, t)).copy_from(&self.xhat);
        m.view_mut((n, 0), (t, n)).copy_from(&self.xhat.adjoint());
        m.view_mut((n, n), (t, t)).copy_from(&self.trade);
        m
    }

    /// Smallest eigenvalue of the block matrix divided by its trace.
    pub fn relative_min_eigenvalue(&self) -> Result<f64> {
        let m = self.block_matrix();
        let trace: f64 = m.diagonal().iter().map(|v| v.re).sum();
        let min = hermitian_eigenvalues(&m)?[0];
        Ok(if trace > 0.0 { min / trace } else { min })
    }

    /// Optimality check with `‖x̂‖_A` taken from the solution itself.
    pub fn optimality(&self, grid_size: usize) -> Result<OptimalityReport> {
        self.optimality_with_norm(grid_size, self.atomic_norm_estimate())
    }

    /// Optimality check with an externally computed `‖x̂‖_A`.
    pub fn optimality_with_norm(&self, grid_size: usize, norm: f64) -> Result<OptimalityReport> {
        let dual_norm = dual_atomic_norm_mmv(&self.dual, grid_size)?;
        let t = self.effective_tau;
        let pairing: f64 = self.dual.iter().zip(self.xhat.iter()).map(|(q, x)| (q.conj() * x).re).sum::<f64>() * t;
        let complementarity = (pairing - t * norm).abs() / (t * norm.max(1.0));
        Ok(OptimalityReport { dual_norm, atomic_norm: norm, complementarity })
    }

    /// Binary dump of `x̂`: magic `QSCSXHAT`, `u64` rows and columns, then
    /// column-major little-endian `(re, im)` pairs.
    pub fn write_xhat_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(b"QSCSXHAT")?;
        w.write_all(&(self.xhat.nrows() as u64).to_le_bytes())?;
        w.write_all(&(self.xhat.ncols() as u64).to_le_bytes())?;
        for v in self.xhat.iter() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("regularization weight {tau} must be positive")));
    }
    Ok(())
}

fn zero_solution(kind: SolutionKind, n: usize, t: usize, tau: f64, effective_tau: f64) -> AstSolution {
    AstSolution {
        kind,
        xhat: CMatrix::zeros(n, t),
        u: vec![Complex64::new(0.0, 0.0); n],
        trade: CMatrix::zeros(t, t),
        dual: CMatrix::zeros(n, t),
        tau,
        effective_tau,
        diagnostics: Diagnostics {
            iterations: 0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            converged: true,
            final_rho: 0.0,
            checkpoints: Vec::new(),
        },
    }
}

fn prox(s: &CMatrix, kind: SolutionKind, tau: f64, gamma: f64, effective_tau: f64, config: &SolverConfig) -> Result<AstSolution> {
    check_tau(tau)?;
    if frobenius_norm(s) == 0.0 {
        return Ok(zero_solution(kind, s.nrows(), s.ncols(), tau, effective_tau));
    }
    let problem = Problem { data: DataTerm::Prox { s, gamma }, tau };
    let out = admm::solve(&problem, config)?;
    let dual = (s - &out.x) / Complex64::new(effective_tau, 0.0);
    Ok(AstSolution {
        kind,
        xhat: out.x,
        u: out.u,
        trade: out.w,
        dual,
        tau,
        effective_tau,
        diagnostics: out.diagnostics,
    })
}

/// `x̂ = argmin ½‖x - s‖₂² + τ‖x‖_A` for a single surrogate column.
pub fn ast_smv(s: &SurrogateSignal, tau: f64, config: &SolverConfig) -> Result<AstSolution> {
    if s.snapshots() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: s.snapshots() });
    }
    prox(&s.s, SolutionKind::Smv, tau, 0.5, tau, config)
}

/// `X̂ = argmin ‖X - S‖_F² + τ_T‖X‖_A` (no ½ on the fidelity term, so the
/// equivalent proximal weight is `τ_T/2`).
pub fn ast_mmv(s: &SurrogateSignal, tau_t: f64, config: &SolverConfig) -> Result<AstSolution> {
    prox(&s.s, SolutionKind::Mmv, tau_t, 1.0, 0.5 * tau_t, config)
}

/// `x̂ = argmin ½‖z - Ax‖₂² + τ‖x‖_A` on unquantized measurements.
pub fn ast_least_squares(a: &SensingMatrix, z: &[Complex64], tau: f64, config: &SolverConfig) -> Result<AstSolution> {
    check_tau(tau)?;
    if z.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: z.len() });
    }
    let n = a.cols();
    let gram = a.gram();
    let bhb = CMatrix::from_column_slice(n, 1, &a.apply_adjoint(z)?);
    let b_energy: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    if frobenius_norm(&bhb) == 0.0 {
        return Ok(zero_solution(SolutionKind::LeastSquares, n, 1, tau, tau));
    }
    let problem = Problem { data: DataTerm::LeastSquares { gram: gram.clone(), bhb: bhb.clone(), b_energy }, tau };
    let out = admm::solve(&problem, config)?;
    let dual = (bhb - gram * &out.x) / Complex64::new(tau, 0.0);
    Ok(AstSolution {
        kind: SolutionKind::LeastSquares,
        xhat: out.x,
        u: out.u,
        trade: out.w,
        dual,
        tau,
        effective_tau: tau,
        diagnostics: out.diagnostics,
    })
}
