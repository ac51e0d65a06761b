//! Dense linear algebra helpers on top of nalgebra.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues below this (in absolute value, negative side) are roundoff.
pub const EIG_CLAMP: f64 = 1e-10;

/// Hermitian eigendecomposition with eigenvalues sorted descending.
///
/// The input is symmetrized as `(M + M*)/2` first; it must already be
/// Hermitian to within `1e-10` relative. Eigenvalues in `[-1e-10, 0)` are
/// clamped to zero.
pub fn hermitian_eig(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
    }
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asym > 1e-10 * scale {
        return Err(Error::InvalidParameter(format!(
            "matrix is not Hermitian (asymmetry {asym:e})"
        )));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(h.clone(), 1e-15, 10_000).ok_or_else(|| {
        Error::NonConvergence { residual: f64::NAN }
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut vals = Vec::with_capacity(n);
    let mut vecs = CMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        let mut l = eig.eigenvalues[i];
        if l < 0.0 && l >= -EIG_CLAMP * scale.max(1.0) {
            l = 0.0;
        }
        vals.push(l);
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    let resid = (&h * &vecs - &vecs * CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        order.iter().map(|&i| Complex64::new(eig.eigenvalues[i], 0.0)),
    )))
    .iter()
    .map(|z| z.norm())
    .fold(0.0, f64::max);
    if !(resid <= 1e-8 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::NonConvergence { residual: resid });
    }
    Ok((vals, vecs))
}

/// Real symmetric eigendecomposition, eigenvalues descending.
pub fn symmetric_eig(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((vec![], DMatrix::zeros(0, 0)));
    }
    let h = (m + m.transpose()).scale(0.5);
    let eig = SymmetricEigen::try_new(h, 1e-15, 10_000)
        .ok_or(Error::NonConvergence { residual: f64::NAN })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok((vals, vecs))
}

/// `u* C w`.
#[inline]
pub fn c_inner(u: &CVector, c: &CMatrix, w: &CVector) -> Complex64 {
    u.dotc(&(c * w))
}

/// Modified Gram-Schmidt in the inner product `<u, w> = u* C w`.
///
/// Fails with [`Error::RankDeficient`] when a vector's remaining C-norm drops
/// below `1e-12`; vectors are never dropped silently.
pub fn gram_schmidt_c(vs: &[CVector], c: &CMatrix) -> Result<Vec<CVector>> {
    let mut out: Vec<CVector> = Vec::with_capacity(vs.len());
    for (i, v) in vs.iter().enumerate() {
        if v.len() != c.nrows() {
            return Err(Error::DimensionMismatch { expected: c.nrows(), got: v.len() });
        }
        let mut v = v.clone();
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for u in &out {
                let proj = c_inner(u, c, &v);
                v -= u * proj;
            }
        }
        let nrm2 = c_inner(&v, c, &v).re;
        if !(nrm2 > 1e-24) {
            return Err(Error::RankDeficient(format!(
                "vector {i} has C-norm {:e} after projection",
                nrm2.max(0.0).sqrt()
            )));
        }
        v.unscale_mut(nrm2.sqrt());
        out.push(v);
    }
    Ok(out)
}

/// Cholesky factor of an SPD matrix, with a descriptive error.
pub fn cholesky(m: &DMatrix<f64>, what: &str) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    m.clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter(format!("{what} is not symmetric positive definite")))
}

/// `ln det` of an SPD matrix; `-inf` when it is singular or not PD.
pub fn ln_det_spd(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    match m.clone().cholesky() {
        Some(ch) => 2.0 * ch.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>(),
        None => ln_det_general(m),
    }
}

/// `ln det` via LU; `-inf` when the determinant is not positive, which for a
/// PSD-by-construction matrix means roundoff around a singular one.
fn ln_det_general(m: &DMatrix<f64>) -> f64 {
    let d = m.clone().lu().determinant();
    if d > 0.0 {
        d.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `ln det` of a Hermitian PSD matrix; `-inf` if numerically singular.
pub fn ln_det_hpd(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    match m.clone().cholesky() {
        Some(ch) => 2.0 * ch.l_dirty().diagonal().iter().map(|x| x.re.ln()).sum::<f64>(),
        None => {
            let d = m.clone().lu().determinant().re;
            if d > 0.0 {
                d.ln()
            } else {
                f64::NEG_INFINITY
            }
        }
    }
}

/// Inverse of a symmetric matrix, adding diagonal jitter `1e-10 * max diag`
/// when the condition number exceeds `1e12`.
pub fn sym_inverse_jittered(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let (vals, _) = symmetric_eig(m)?;
    let max = vals[0].abs();
    let min = vals[n - 1];
    let mut a = m.clone();
    if !(min > 0.0) || max / min > 1e12 {
        let jitter = 1e-10 * m.diagonal().max().max(f64::MIN_POSITIVE);
        for i in 0..n {
            a[(i, i)] += jitter;
        }
    }
    match a.clone().cholesky() {
        Some(ch) => Ok(ch.inverse()),
        None => a
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular matrix in conditional update".into())),
    }
}
