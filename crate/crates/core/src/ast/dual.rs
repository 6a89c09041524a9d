//! Trigonometric polynomials `Q(f) = ‖Qᴴv(f)‖₂` built from a dual certificate.

use crate::linalg::CMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Newton iterations allowed when polishing a grid maximum.
const MAX_NEWTON_STEPS: usize = 20;

/// The polynomial vector `p(f) = Qᴴv(f)` with one entry per column of `Q`.
#[derive(Debug, Clone)]
pub struct DualPolynomial {
    n: usize,
    /// Conjugated coefficients, one vector per column.
    conj: Vec<Vec<Complex64>>,
}

impl DualPolynomial {
    pub fn new(q: &CMatrix) -> Self {
        let conj = (0..q.ncols()).map(|c| q.column(c).iter().map(|v| v.conj()).collect()).collect();
        DualPolynomial { n: q.nrows(), conj }
    }

    pub fn from_vector(q: &[Complex64]) -> Self {
        DualPolynomial { n: q.len(), conj: vec![q.iter().map(|v| v.conj()).collect()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `‖Qᴴv(f)‖₂`.
    pub fn value(&self, f: f64) -> f64 {
        self.power(f).0.sqrt()
    }

    /// `h(f) = ‖p(f)‖²` with its first two derivatives.
    fn power(&self, f: f64) -> (f64, f64, f64) {
        let mut h = 0.0;
        let mut dh = 0.0;
        let mut d2h = 0.0;
        let tw: Vec<Complex64> = (0..self.n).map(|i| Complex64::cis(2.0 * PI * f * i as f64)).collect();
        for c in &self.conj {
            let mut p = Complex64::new(0.0, 0.0);
            let mut p1 = Complex64::new(0.0, 0.0);
            let mut p2 = Complex64::new(0.0, 0.0);
            for (i, (q, e)) in c.iter().zip(&tw).enumerate() {
                let t = q * e;
                let w = 2.0 * PI * i as f64;
                p += t;
                p1 += t * Complex64::new(0.0, w);
                p2 -= t * (w * w);
            }
            h += p.norm_sqr();
            dh += 2.0 * (p.conj() * p1).re;
            d2h += 2.0 * (p1.norm_sqr() + (p.conj() * p2).re);
        }
        (h, dh, d2h)
    }

    /// `Q(k/size)` for `k = 0, …, size-1`.
    pub fn grid(&self, size: usize) -> Vec<f64> {
        let twiddle: Vec<Complex64> = (0..size).map(|k| Complex64::cis(2.0 * PI * k as f64 / size as f64)).collect();
        (0..size)
            .map(|g| {
                self.conj
                    .iter()
                    .map(|c| {
                        let mut idx = 0usize;
                        let mut p = Complex64::new(0.0, 0.0);
                        for q in c {
                            p += q * twiddle[idx];
                            idx += g;
                            if idx >= size {
                                idx %= size;
                            }
                        }
                        p.norm_sqr()
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Polishes a maximum near `f0` by safeguarded Newton steps on `Q²`,
    /// each step limited to `max_step`. Returns `(f, Q(f))` with `f` wrapped
    /// into `[0, 1)`; the value never decreases below `Q(f0)`.
    pub fn refine(&self, f0: f64, max_step: f64) -> (f64, f64) {
        let mut f = f0;
        let (mut h, mut dh, mut d2h) = self.power(f);
        for _ in 0..MAX_NEWTON_STEPS {
            let mut step = if d2h < 0.0 { -dh / d2h } else { dh.signum() * max_step };
            step = step.clamp(-max_step, max_step);
            if step.abs() < 1e-13 {
                break;
            }
            let mut improved = false;
            for _ in 0..30 {
                let trial = self.power(f + step);
                if trial.0 >= h {
                    f += step;
                    (h, dh, d2h) = trial;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (f.rem_euclid(1.0), h.sqrt())
    }

    /// Refined local maxima of the grid (cyclic), sorted by frequency.
    pub fn local_maxima(&self, grid_size: usize) -> Vec<(f64, f64)> {
        let vals = self.grid(grid_size);
        let g = grid_size;
        let half_cell = 0.5 / g as f64;
        let mut peaks: Vec<(f64, f64)> = (0..g)
            .filter(|&k| {
                let prev = vals[(k + g - 1) % g];
                let next = vals[(k + 1) % g];
                vals[k] > prev && vals[k] >= next
            })
            .map(|k| self.refine(k as f64 / g as f64, half_cell))
            .collect();
        if peaks.is_empty() {
            // constant modulus: every point is a maximum
            peaks.push((0.0, vals[0]));
        }
        peaks.sort_by(|a, b| a.0.total_cmp(&b.0));
        peaks
    }

    /// `sup_f Q(f)`: grid maximum followed by Newton polishing of every
    /// local maximum.
    pub fn sup_norm(&self, grid_size: usize) -> f64 {
        self.local_maxima(grid_size).iter().map(|p| p.1).fold(0.0, f64::max)
    }
}
