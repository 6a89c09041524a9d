//! Dense complex linear algebra helpers shared by the solvers.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermitian eigendecomposition, eigenvalues ascending.
///
/// Only the lower triangle of `m` is read.
pub fn hermitian_eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    let view = faer::MatRef::from_column_major_slice(m.as_slice(), n, n);
    let evd = view
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::Eigen)?;
    let s = evd.S().column_vector();
    let values = (0..n).map(|i| s[i].re).collect();
    let u = evd.U();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    Ok((values, vectors))
}

/// Forces the dense kernels behind [`hermitian_eigh`] to run on the calling
/// thread. Callers that parallelize over independent problems use this so
/// results never depend on the thread pool.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}

/// Hermitian eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.nrows();
    let view = faer::MatRef::from_column_major_slice(m.as_slice(), n, n);
    let vals = view
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| Error::Eigen)?;
    Ok(vals)
}

/// Replaces `m` by `(m + mᴴ)/2`.
pub fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for j in 0..n {
        m[(j, j)].im = 0.0;
        for i in (j + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Euclidean projection onto the positive semidefinite cone.
///
/// Returns the projection together with the number of positive eigenvalues.
pub fn project_psd(m: &CMatrix) -> Result<(CMatrix, usize)> {
    let n = m.nrows();
    let (vals, vecs) = hermitian_eigh(m)?;
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.0).collect();
    if keep.is_empty() {
        return Ok((CMatrix::zeros(n, n), 0));
    }
    let mut factor = CMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let scale = vals[k].sqrt();
        for i in 0..n {
            factor[(i, c)] = vecs[(i, k)] * scale;
        }
    }
    let mut out = &factor * factor.adjoint();
    hermitize(&mut out);
    Ok((out, keep.len()))
}

/// Hermitian Toeplitz matrix with first column `u` (`u[0]` must be real).
pub fn toeplitz_hermitian(u: &[Complex64]) -> CMatrix {
    let n = u.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i >= j {
            u[i - j]
        } else {
            u[j - i].conj()
        }
    })
}

/// Least-squares fit of a Hermitian Toeplitz generator to the leading
/// `n × n` block of `c`: each diagonal is averaged (upper entries conjugated).
/// This is the adjoint of the Toeplitz embedding followed by the inverse of
/// its diagonal Gram operator.
pub fn toeplitz_average(c: &CMatrix, n: usize) -> Vec<Complex64> {
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    for (k, uk) in u.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..(n - k) {
            acc += c[(i + k, i)] + c[(i, i + k)].conj();
        }
        *uk = acc / (2.0 * (n - k) as f64);
    }
    u[0].im = 0.0;
    u
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `aᴴb`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Orthonormal basis of the column span of `m`, keeping singular directions
/// above `rel_tol · σ_max`.
pub fn orthonormal_basis(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > rel_tol * smax)
        .collect();
    CMatrix::from_fn(m.nrows(), cols.len(), |i, j| u[(i, cols[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigh_reconstructs() {
        let a = CMatrix::from_fn(4, 4, |i, j| c((i * 3 + j) as f64 * 0.1, (i as f64) - (j as f64)));
        let mut h = &a + a.adjoint();
        hermitize(&mut h);
        let (vals, vecs) = hermitian_eigh(&h).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&CVector::from_iterator(4, vals.iter().map(|&v| c(v, 0.0))));
        let back = &vecs * d * vecs.adjoint();
        assert!(frobenius_norm(&(back - &h)) < 1e-12 * frobenius_norm(&h));
    }

    #[test]
    fn psd_projection_clips_negative_part() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0, 0.0), c(-1.0, 0.0), c(0.5, 0.0)]));
        let (p, rank) = project_psd(&d).unwrap();
        assert_eq!(rank, 2);
        assert!((p[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!(p[(1, 1)].norm() < 1e-14);
        assert!((p[(2, 2)].re - 0.5).abs() < 1e-14);
        let (again, _) = project_psd(&p).unwrap();
        assert!(frobenius_norm(&(again - &p)) < 1e-13);
    }

    #[test]
    fn toeplitz_round_trip() {
        let u = vec![c(2.0, 0.0), c(0.3, -0.4), c(-0.1, 0.2)];
        let t = toeplitz_hermitian(&u);
        assert_eq!(t[(2, 0)], u[2]);
        assert_eq!(t[(0, 2)], u[2].conj());
        let back = toeplitz_average(&t, 3);
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
