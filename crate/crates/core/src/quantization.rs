//! Scalar quantizers applied separately to the real and imaginary parts.
//!
//! A quantizer is the partition `(-∞, t_1), [t_1, t_2), …, [t_{L-1}, ∞)` of the
//! real line together with one representative per cell.

use crate::error::{Error, Result};
use crate::gaussian::{normal_quantile, ScaledInterval};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

/// Iteration cap for the Lloyd-Max design (Lloyd and Newton steps combined).
pub const LLOYD_MAX_ITERATIONS: usize = 10_000;
/// Convergence threshold on the largest threshold update, relative to the
/// input standard deviation.
pub const LLOYD_TOLERANCE: f64 = 1e-10;
/// Plain Lloyd steps taken before switching to Newton's method.
const LLOYD_WARMUP: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct QuantizerSpec {
    thresholds: Vec<f64>,
    representatives: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSpec {
    thresholds: Vec<f64>,
    representatives: Vec<f64>,
}

impl TryFrom<RawSpec> for QuantizerSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        QuantizerSpec::new(raw.thresholds, raw.representatives)
    }
}

impl QuantizerSpec {
    pub fn new(thresholds: Vec<f64>, representatives: Vec<f64>) -> Result<Self> {
        if representatives.len() < 2 || representatives.len() != thresholds.len() + 1 {
            return Err(Error::InvalidQuantizer(format!(
                "{} thresholds need {} representatives, got {}",
                thresholds.len(),
                thresholds.len() + 1,
                representatives.len()
            )));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidQuantizer("thresholds must be finite".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidQuantizer("thresholds must be strictly increasing".into()));
        }
        for (l, &w) in representatives.iter().enumerate() {
            let lo = if l == 0 { f64::NEG_INFINITY } else { thresholds[l - 1] };
            let hi = thresholds.get(l).copied().unwrap_or(f64::INFINITY);
            if !(w >= lo && w < hi) {
                return Err(Error::InvalidQuantizer(format!("representative {w} outside its cell [{lo}, {hi})")));
            }
        }
        Ok(QuantizerSpec { thresholds, representatives })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn representatives(&self) -> &[f64] {
        &self.representatives
    }

    /// Number of cells `L`.
    pub fn levels(&self) -> usize {
        self.representatives.len()
    }

    /// Cell edges `t_0 = -∞, t_1, …, t_{L-1}, t_L = +∞`.
    pub fn edges(&self) -> Vec<f64> {
        let mut e = Vec::with_capacity(self.thresholds.len() + 2);
        e.push(f64::NEG_INFINITY);
        e.extend_from_slice(&self.thresholds);
        e.push(f64::INFINITY);
        e
    }

    /// Index of the cell containing `a`; a value equal to a threshold
    /// belongs to the cell on its right.
    pub fn cell(&self, a: f64) -> usize {
        self.thresholds.partition_point(|&t| t <= a)
    }

    /// Same cells with replaced representatives (used to probe that
    /// information only depends on the partition).
    pub fn with_representatives(&self, representatives: Vec<f64>) -> Result<Self> {
        QuantizerSpec::new(self.thresholds.clone(), representatives)
    }
}

/// `Q(a) = sign(a)` with `sign(0) = +1`.
pub fn sign_quantizer() -> QuantizerSpec {
    QuantizerSpec { thresholds: vec![0.0], representatives: vec![-1.0, 1.0] }
}

pub fn quantize(spec: &QuantizerSpec, a: f64) -> f64 {
    spec.representatives[spec.cell(a)]
}

/// `y_i = Q(Re z_i) + jQ(Im z_i)`.
pub fn quantize_complex(spec: &QuantizerSpec, z: &[Complex64]) -> Vec<Complex64> {
    z.iter().map(|v| Complex64::new(quantize(spec, v.re), quantize(spec, v.im))).collect()
}

/// `⌈log₂ L⌉`.
pub fn bit_depth(spec: &QuantizerSpec) -> u32 {
    spec.levels().next_power_of_two().trailing_zeros()
}

/// Standard deviation of `Re z_i` under the Gaussian sensing model, the
/// design variance used for Lloyd-Max quantizers in the experiments.
pub fn matched_input_std(signal_energy: f64, sigma: f64) -> f64 {
    ((sigma * sigma + signal_energy) / 2.0).sqrt()
}

/// Linear gain and output power of `Q` applied to `u ~ N(0, input_std²)`:
/// `(E[Q(u)u]/E[u²], E[Q(u)²])`.
///
/// For Gaussian sensing the surrogate `(1/m)Aᴴy` of quantized measurements
/// has mean `gain · x`, which for the sign quantizer equals `λx/‖x‖`.
pub fn bussgang_gain(spec: &QuantizerSpec, input_std: f64) -> (f64, f64) {
    let edges = spec.edges();
    let mut corr = 0.0;
    let mut power = 0.0;
    for (w, rep) in edges.windows(2).zip(spec.representatives()) {
        let a = w[0] / input_std;
        let b = w[1] / input_std;
        let iv = ScaledInterval::new(a * FRAC_1_SQRT_2, b * FRAC_1_SQRT_2);
        let p = iv.probability();
        // E[u; cell] = σ·(φ(a) - φ(b)) in standard-normal units
        let partial = input_std * (gauss_density(a) - gauss_density(b));
        corr += rep * partial;
        power += rep * rep * p;
    }
    (corr / (input_std * input_std), power)
}

fn gauss_density(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
    }
}

/// Conditional mean of a standard normal on `[a, b)` and its partial
/// derivatives with respect to `a` and `b`.
fn truncated_mean(a: f64, b: f64) -> (f64, f64, f64) {
    // erf units: u = x/√2
    let iv = ScaledInterval::new(a * FRAC_1_SQRT_2, b * FRAC_1_SQRT_2);
    let mean = iv.jump_over_mass() / (2.0 * PI).sqrt();
    // φ(e)/P with φ the standard normal density, kept in scaled form
    let density_over_mass = |e: f64| {
        if e.is_infinite() {
            0.0
        } else {
            (-(e * e / 2.0 - iv.log_scale)).exp() / ((2.0 * PI).sqrt() * iv.mass.max(1e-300))
        }
    };
    let d_a = density_over_mass(a) * (mean - a);
    let d_b = density_over_mass(b) * (b - mean);
    (mean, if a.is_infinite() { 0.0 } else { d_a }, if b.is_infinite() { 0.0 } else { d_b })
}

fn centroids(thresholds: &[f64]) -> Vec<f64> {
    let l = thresholds.len() + 1;
    (0..l)
        .map(|j| {
            let a = if j == 0 { f64::NEG_INFINITY } else { thresholds[j - 1] };
            let b = thresholds.get(j).copied().unwrap_or(f64::INFINITY);
            truncated_mean(a, b).0
        })
        .collect()
}

fn midpoints(reps: &[f64]) -> Vec<f64> {
    reps.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Residual of the fixed-point equations `t = midpoints(centroids(t))` and
/// the tridiagonal Jacobian `(lower, diag, upper)`.
fn fixed_point_system(t: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = t.len();
    let cells: Vec<(f64, f64, f64)> = (0..=k)
        .map(|j| {
            let a = if j == 0 { f64::NEG_INFINITY } else { t[j - 1] };
            let b = t.get(j).copied().unwrap_or(f64::INFINITY);
            truncated_mean(a, b)
        })
        .collect();
    let mut res = vec![0.0; k];
    let mut lower = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    for l in 0..k {
        let (mu_left, _, dleft_db) = cells[l];
        let (mu_right, dright_da, _) = cells[l + 1];
        res[l] = t[l] - 0.5 * (mu_left + mu_right);
        diag[l] = 1.0 - 0.5 * (dleft_db + dright_da);
        if l > 0 {
            lower[l] = -0.5 * cells[l].1;
        }
        if l + 1 < k {
            upper[l] = -0.5 * cells[l + 1].2;
        }
    }
    (res, lower, diag, upper)
}

fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let k = diag.len();
    let mut c = vec![0.0; k];
    let mut d = vec![0.0; k];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..k {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; k];
    x[k - 1] = d[k - 1];
    for i in (0..k - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimum-MSE `2^b`-level quantizer for `N(0, input_std²)`.
///
/// Representatives start at the Gaussian quantiles `(2ℓ-1)/(2L)`. A few plain
/// Lloyd steps are followed by Newton steps on the same fixed-point equations,
/// since Lloyd's iteration alone contracts too slowly beyond about six bits.
pub fn lloyd_max(bits: u32, input_std: f64) -> Result<QuantizerSpec> {
    if !(1..=8).contains(&bits) {
        return Err(Error::InvalidArgument(format!("bit depth {bits} outside 1..=8")));
    }
    if !(input_std > 0.0 && input_std.is_finite()) {
        return Err(Error::InvalidArgument(format!("input std {input_std} must be positive")));
    }
    let levels = 1usize << bits;
    let mut reps: Vec<f64> = (1..=levels)
        .map(|l| normal_quantile((2 * l - 1) as f64 / (2 * levels) as f64))
        .collect();
    let mut t = midpoints(&reps);
    let mut converged = false;
    for iter in 0..LLOYD_MAX_ITERATIONS {
        let next = if iter < LLOYD_WARMUP {
            reps = centroids(&t);
            midpoints(&reps)
        } else {
            let (res, lower, diag, upper) = fixed_point_system(&t);
            let step = solve_tridiagonal(&lower, &diag, &upper, &res);
            let base = max_abs(&res);
            let mut scale = 1.0;
            loop {
                let trial: Vec<f64> = t.iter().zip(&step).map(|(x, s)| x - scale * s).collect();
                let ordered = trial.windows(2).all(|w| w[0] < w[1]);
                if ordered && (max_abs(&fixed_point_system(&trial).0) <= base || scale < 1e-6) {
                    break trial;
                }
                scale *= 0.5;
            }
        };
        let change = next.iter().zip(&t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        t = next;
        if change < LLOYD_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged { what: "Lloyd-Max design", iterations: LLOYD_MAX_ITERATIONS });
    }
    reps = centroids(&t);
    // exact symmetry about zero
    let half = levels / 2;
    for l in 0..half {
        let r = 0.5 * (reps[levels - 1 - l] - reps[l]);
        reps[l] = -r;
        reps[levels - 1 - l] = r;
    }
    let mut thresholds = midpoints(&reps);
    thresholds[half - 1] = 0.0;
    QuantizerSpec::new(
        thresholds.iter().map(|x| x * input_std).collect(),
        reps.iter().map(|x| x * input_std).collect(),
    )
}

/// Quantizer selection as written on the command line: `sign`, `lloyd:<bits>`
/// or `none` (unquantized).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum QuantizerChoice {
    None,
    Sign,
    Lloyd(u32),
}

impl QuantizerChoice {
    /// Builds the quantizer for a given design standard deviation.
    pub fn build(&self, input_std: f64) -> Result<Option<QuantizerSpec>> {
        match *self {
            QuantizerChoice::None => Ok(None),
            QuantizerChoice::Sign => Ok(Some(sign_quantizer())),
            QuantizerChoice::Lloyd(b) => lloyd_max(b, input_std).map(Some),
        }
    }

    /// Bits per real number; 0 for unquantized.
    pub fn bit_depth(&self) -> u32 {
        match *self {
            QuantizerChoice::None => 0,
            QuantizerChoice::Sign => 1,
            QuantizerChoice::Lloyd(b) => b,
        }
    }
}

impl fmt::Display for QuantizerChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantizerChoice::None => write!(f, "none"),
            QuantizerChoice::Sign => write!(f, "sign"),
            QuantizerChoice::Lloyd(b) => write!(f, "lloyd:{b}"),
        }
    }
}

impl FromStr for QuantizerChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" | "unquantized" => Ok(QuantizerChoice::None),
            "sign" => Ok(QuantizerChoice::Sign),
            other => {
                let bits = other
                    .strip_prefix("lloyd:")
                    .and_then(|b| b.parse::<u32>().ok())
                    .filter(|b| (1..=8).contains(b))
                    .ok_or_else(|| Error::InvalidQuantizer(format!("unknown quantizer '{other}' (sign|lloyd:<1-8>|none)")))?;
                Ok(QuantizerChoice::Lloyd(bits))
            }
        }
    }
}

impl TryFrom<String> for QuantizerChoice {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<QuantizerChoice> for String {
    fn from(q: QuantizerChoice) -> String {
        q.to_string()
    }
}
