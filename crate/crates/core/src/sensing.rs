//! Complex Gaussian sensing matrices and noisy linear measurements
//! `z = A x + σε`.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rng::rng_from_seed;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{self, Write};

/// Dense `m × n` complex matrix stored row-major, one measurement vector
/// `a_iᴴ` per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl SensingMatrix {
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("sensing matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(SensingMatrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        SensingMatrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i`, i.e. the conjugated measurement vector `a_iᴴ`.
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// The first `m` rows.
    pub fn first_rows(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.rows {
            return Err(Error::InvalidArgument(format!("cannot take {m} of {} rows", self.rows)));
        }
        Ok(SensingMatrix { rows: m, cols: self.cols, data: self.data[..m * self.cols].to_vec() })
    }

    /// Row-wise concatenation `[self; other]`.
    pub fn stack(&self, other: &SensingMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(SensingMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// `A x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `Aᴴ y`.
    pub fn apply_adjoint(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: y.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (i, yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * yi;
            }
        }
        Ok(out)
    }

    /// Dense copy as an `m × n` matrix.
    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// `AᴴA`.
    pub fn gram(&self) -> CMatrix {
        let a = self.to_matrix();
        a.adjoint() * a
    }
}

/// Standard complex Gaussian draw, real and imaginary parts each `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// `m × n` matrix with i.i.d. `CN(0, 1)` entries, deterministic in `seed`.
pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("sensing matrix dimensions must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let data = (0..m * n).map(|_| complex_normal(&mut rng)).collect();
    SensingMatrix::from_rows(m, n, data)
}

/// Unquantized measurements and everything needed to reproduce them.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    pub matrix: SensingMatrix,
    pub z: Vec<Complex64>,
    pub sigma: f64,
    pub seed: u64,
}

/// `z_i = ⟨a_i, x⟩ + σε_i` with `ε_i ~ CN(0, 1)` drawn from `seed`.
pub fn measure(a: &SensingMatrix, x: &[Complex64], sigma: f64, seed: u64) -> Result<MeasurementSet> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level {sigma} must be nonnegative")));
    }
    let mut z = a.apply(x)?;
    if sigma > 0.0 {
        let mut rng = rng_from_seed(seed);
        for zi in z.iter_mut() {
            *zi += complex_normal(&mut rng) * sigma;
        }
    }
    Ok(MeasurementSet { matrix: a.clone(), z, sigma, seed })
}

/// `‖x‖₂² / σ²`.
pub fn snr(x: &[Complex64], sigma: f64) -> Result<f64> {
    if sigma == 0.0 {
        return Err(Error::ZeroNoise("SNR is infinite"));
    }
    Ok(x.iter().map(|z| z.norm_sqr()).sum::<f64>() / (sigma * sigma))
}

/// Noise level giving the requested SNR (in dB) for signal energy `energy`.
pub fn sigma_for_snr_db(energy: f64, snr_db: f64) -> f64 {
    (energy / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// Dump formats for a measurement set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    /// `kind,row,col,re,im` lines; `kind` is `A` or `z`.
    Csv,
    /// Little-endian: magic `QSCSMEAS`, `u64` rows, `u64` cols, `f64` sigma,
    /// `u64` seed, then `A` row-major and `z`, each entry as `(re, im)` f64 pairs.
    Binary,
}

impl MeasurementSet {
    pub fn write_dump<W: Write>(&self, mut w: W, format: DumpFormat) -> io::Result<()> {
        let a = &self.matrix;
        match format {
            DumpFormat::Csv => {
                writeln!(w, "kind,row,col,re,im")?;
                for i in 0..a.rows() {
                    for (j, v) in a.row(i).iter().enumerate() {
                        writeln!(w, "A,{i},{j},{:e},{:e}", v.re, v.im)?;
                    }
                }
                for (i, v) in self.z.iter().enumerate() {
                    writeln!(w, "z,{i},0,{:e},{:e}", v.re, v.im)?;
                }
            }
            DumpFormat::Binary => {
                w.write_all(b"QSCSMEAS")?;
                w.write_all(&(a.rows() as u64).to_le_bytes())?;
                w.write_all(&(a.cols() as u64).to_le_bytes())?;
                w.write_all(&self.sigma.to_le_bytes())?;
                w.write_all(&self.seed.to_le_bytes())?;
                for v in a.as_slice().iter().chain(&self.z) {
                    w.write_all(&v.re.to_le_bytes())?;
                    w.write_all(&v.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    /// Reads back a [`DumpFormat::Binary`] dump.
    pub fn read_binary(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidArgument(format!("measurement dump: {msg}"));
        if bytes.len() < 40 || &bytes[..8] != b"QSCSMEAS" {
            return Err(bad("missing header"));
        }
        let word = |k: usize| u64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().unwrap());
        let (rows, cols) = (word(0) as usize, word(1) as usize);
        let sigma = f64::from_bits(word(2));
        let seed = word(3);
        let count = rows * cols + rows;
        let body = &bytes[40..];
        if body.len() != count * 16 {
            return Err(bad("truncated body"));
        }
        let vals: Vec<Complex64> = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        let matrix = SensingMatrix::from_rows(rows, cols, vals[..rows * cols].to_vec())?;
        Ok(MeasurementSet { matrix, z: vals[rows * cols..].to_vec(), sigma, seed })
    }
}
