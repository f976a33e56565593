//! Dense eigenvalue and singular value kernels for the matrix models.
//!
//! Everything here is self-contained: Householder reductions followed by
//! implicit QL on a real symmetric tridiagonal. Non-Hermitian input is only
//! supported when it is normal, via the commuting pair
//! `H₁ = (A + A*)/2`, `H₂ = (A − A*)/(2i)`.

mod householder;
mod shifted;
mod tridiag;

use std::cmp::Ordering;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::matmodel::{root_of_unity, CMatrix};

pub use shifted::ShiftedSigmaMin;

/// Relative tolerance of the Hermitian precondition.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default relative tolerance for [`is_normal`].
pub const NORMAL_TOL: f64 = 1e-10;
/// Relative gap below which eigenvalues of `H₁` share an eigenspace.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: defect {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },
    #[error("matrix is not normal: defect {defect:e} exceeds {tolerance:e}")]
    NotNormal { defect: f64, tolerance: f64 },
    #[error("eigenvalue iteration did not converge at index {index}")]
    ConvergenceFailure { index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    Hermitian,
    Normal,
    CirculantAnalytic,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueSet {
    /// Sorted by real part, then imaginary part; repeated per multiplicity.
    pub values: Vec<Complex64>,
    pub order: usize,
    /// Largest `‖Av − λv‖` over computed unit eigenvectors, or an a priori
    /// rounding bound where no vectors are formed (plain Hermitian and
    /// circulant paths).
    pub residual_bound: f64,
    pub method: MethodTag,
}

impl EigenvalueSet {
    /// Real parts, if every imaginary part is exactly zero.
    pub fn real_values(&self) -> Option<Vec<f64>> {
        self.values.iter().all(|z| z.im == 0.0).then(|| self.values.iter().map(|z| z.re).collect())
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }
}

/// Ordering used for every eigenvalue list: real part, then imaginary part.
pub fn compare_eigenvalues(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn require_square(a: &CMatrix) -> Result<usize, SpectralError> {
    if a.is_square() {
        Ok(a.rows())
    } else {
        Err(SpectralError::NotSquare { rows: a.rows(), cols: a.cols() })
    }
}

/// `√(‖A‖₁‖A‖∞)`, an upper bound for `‖A‖₂` within a factor `√n`.
pub(crate) fn norm_estimate(a: &CMatrix) -> f64 {
    let mut row = vec![0.0f64; a.rows()];
    let mut col_max = 0.0f64;
    for j in 0..a.cols() {
        let mut s = 0.0;
        for (r, z) in row.iter_mut().zip(a.column(j)) {
            let m = z.norm();
            s += m;
            *r += m;
        }
        col_max = col_max.max(s);
    }
    let row_max = row.into_iter().fold(0.0, f64::max);
    (col_max * row_max).sqrt()
}

struct HermitianEigen {
    values: Vec<f64>,
    vectors: Option<CMatrix>,
}

/// Eigen-decomposition of the Hermitian part of `a`, ascending.
fn hermitian_decompose(a: &CMatrix, want_vectors: bool) -> Result<HermitianEigen, SpectralError> {
    let n = a.rows();
    let t = householder::tridiagonalize(a, want_vectors);
    let (mut d, mut e, mut z) = (t.diag, t.off, t.q);
    tridiag::ql_implicit(&mut d, &mut e, z.as_mut())?;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = perm.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        let mut sorted = CMatrix::zeros(n, n);
        for (k, &i) in perm.iter().enumerate() {
            sorted.column_mut(k).copy_from_slice(z.column(i));
        }
        sorted
    });
    Ok(HermitianEigen { values, vectors })
}

fn max_residual(a: &CMatrix, vectors: &CMatrix, values: &[Complex64]) -> f64 {
    let av = a.matmul(vectors);
    let mut worst = 0.0f64;
    for (k, &lambda) in values.iter().enumerate() {
        let r = av
            .column(k)
            .iter()
            .zip(vectors.column(k))
            .map(|(x, v)| (x - v * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

fn check_hermitian(a: &CMatrix) -> Result<usize, SpectralError> {
    let n = require_square(a)?;
    let defect = a.hermitian_defect();
    let tolerance = HERMITIAN_TOL * norm_estimate(a);
    if defect > tolerance {
        return Err(SpectralError::NotHermitian { defect, tolerance });
    }
    Ok(n)
}

/// Eigenvalues of a Hermitian matrix, ascending and exactly real.
///
/// No eigenvectors are formed; `residual_bound` is the a-priori backward
/// error `4n·eps·‖A‖` of the Householder–QL pipeline. Use
/// [`hermitian_eigenpairs`] for a computed residual.
pub fn hermitian_eigenvalues(a: impl AsRef<CMatrix>) -> Result<EigenvalueSet, SpectralError> {
    let a = a.as_ref();
    let n = check_hermitian(a)?;
    let eig = hermitian_decompose(a, false)?;
    let values = eig.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let residual_bound = 4.0 * n as f64 * f64::EPSILON * norm_estimate(a);
    Ok(EigenvalueSet { values, order: n, residual_bound, method: MethodTag::Hermitian })
}

/// Eigenvalues with orthonormal eigenvectors as the columns of the matrix,
/// in the same order; `residual_bound` is `max_k ‖A x_k − λ_k x_k‖`.
pub fn hermitian_eigenpairs(a: impl AsRef<CMatrix>) -> Result<(EigenvalueSet, CMatrix), SpectralError> {
    let a = a.as_ref();
    let n = check_hermitian(a)?;
    let eig = hermitian_decompose(a, true)?;
    let values: Vec<Complex64> = eig.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let vectors = eig.vectors.expect("vectors requested");
    let residual_bound = max_residual(a, &vectors, &values);
    Ok((EigenvalueSet { values, order: n, residual_bound, method: MethodTag::Hermitian }, vectors))
}

/// `‖AA* − A*A‖ ≤ tol·‖A‖²`.
pub fn is_normal(a: impl AsRef<CMatrix>, tol: f64) -> bool {
    let a = a.as_ref();
    if !a.is_square() {
        return false;
    }
    match normality_defect(a) {
        Ok((defect, norm)) => defect <= tol * norm * norm,
        Err(_) => false,
    }
}

/// `(‖AA* − A*A‖, ‖A‖)`.
fn normality_defect(a: &CMatrix) -> Result<(f64, f64), SpectralError> {
    let adj = a.adjoint();
    let comm = &a.matmul(&adj) - &adj.matmul(a);
    let defect = hermitian_spectral_radius(&comm)?;
    Ok((defect, operator_norm(a)?))
}

fn hermitian_spectral_radius(h: &CMatrix) -> Result<f64, SpectralError> {
    if h.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let eig = hermitian_decompose(h, false)?;
    Ok(eig.values.iter().fold(0.0, |m, x| m.max(x.abs())))
}

/// First row `c` if `a[i][j] = c[(j − i) mod n]` exactly.
fn circulant_symbol(a: &CMatrix) -> Option<Vec<Complex64>> {
    let n = a.rows();
    let c: Vec<Complex64> = (0..n).map(|j| a[(0, j)]).collect();
    for j in 0..n {
        let col = a.column(j);
        for (i, &x) in col.iter().enumerate() {
            if x != c[(j + n - i) % n] {
                return None;
            }
        }
    }
    Some(c)
}

/// Eigenvalues `Σ_m c_m ω^{mk}` of a circulant matrix, `ω = e^{2πi/n}`, or
/// `None` if `a` is not exactly circulant.
pub fn circulant_eigenvalues(a: impl AsRef<CMatrix>) -> Option<EigenvalueSet> {
    let a = a.as_ref();
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    let c = circulant_symbol(a)?;
    let support: Vec<(usize, Complex64)> = c.iter().copied().enumerate().filter(|(_, z)| !z.is_zero()).collect();
    let mut values: Vec<Complex64> = (0..n)
        .map(|k| {
            support
                .iter()
                .map(|&(m, cm)| cm * root_of_unity(((m * k) % n) as i128, n as u64))
                .sum()
        })
        .collect();
    values.sort_by(compare_eigenvalues);
    let weight: f64 = support.iter().map(|(_, z)| z.norm()).sum();
    let residual_bound = 4.0 * (support.len().max(1) as f64) * f64::EPSILON * weight;
    Some(EigenvalueSet { values, order: n, residual_bound, method: MethodTag::CirculantAnalytic })
}

/// Eigenvalues of a normal matrix.
///
/// Exactly circulant input uses the discrete Fourier formula. Otherwise the
/// Hermitian part is diagonalized, its eigenvalues are grouped into clusters
/// closer than `10⁻⁸·‖A‖`, and the skew part is diagonalized inside each
/// cluster. The returned values are Rayleigh quotients `x*Ax`.
pub fn normal_eigenvalues(a: impl AsRef<CMatrix>) -> Result<EigenvalueSet, SpectralError> {
    let a = a.as_ref();
    let n = require_square(a)?;
    if n == 0 {
        return Ok(EigenvalueSet { values: vec![], order: 0, residual_bound: 0.0, method: MethodTag::Normal });
    }
    if let Some(set) = circulant_eigenvalues(a) {
        return Ok(set);
    }
    let (defect, norm) = normality_defect(a)?;
    let tolerance = NORMAL_TOL * norm * norm;
    if defect > tolerance {
        return Err(SpectralError::NotNormal { defect, tolerance });
    }
    let adj = a.adjoint();
    let h1 = (a + &adj).scale(Complex64::new(0.5, 0.0));
    let h2 = (a - &adj).scale(Complex64::new(0.0, -0.5));
    let eig = hermitian_decompose(&h1, true)?;
    let x = eig.vectors.expect("vectors requested");
    let gap = CLUSTER_TOL * norm;

    let mut y = CMatrix::zeros(n, n);
    let mut clusters = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= gap {
            end += 1;
        }
        let m = end - start;
        if m == 1 {
            y.column_mut(start).copy_from_slice(x.column(start));
        } else {
            let block = CMatrix::from_fn(n, m, |i, j| x[(i, start + j)]);
            let small = block.adjoint().matmul(&h2.matmul(&block));
            let sub = hermitian_decompose(&small, true)?;
            let rotated = block.matmul(sub.vectors.as_ref().expect("vectors requested"));
            for j in 0..m {
                y.column_mut(start + j).copy_from_slice(rotated.column(j));
            }
        }
        clusters.push(start..end);
        start = end;
    }

    let ay = a.matmul(&y);
    let mut values: Vec<Complex64> = (0..n)
        .map(|k| y.column(k).iter().zip(ay.column(k)).map(|(v, w)| v.conj() * w).sum())
        .collect();
    let residual_bound = {
        let mut worst = 0.0f64;
        for (k, &lambda) in values.iter().enumerate() {
            let r: f64 = ay.column(k).iter().zip(y.column(k)).map(|(w, v)| (w - v * lambda).norm_sqr()).sum();
            worst = worst.max(r.sqrt());
        }
        worst
    };
    // clusters are ascending in Re λ; inside one the real parts agree up to
    // the clustering tolerance and count as ties
    for range in clusters {
        values[range].sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    }
    Ok(EigenvalueSet { values, order: n, residual_bound, method: MethodTag::Normal })
}

/// Hermitian path when `a` is Hermitian, normal path otherwise.
pub fn eigenvalues(a: impl AsRef<CMatrix>) -> Result<EigenvalueSet, SpectralError> {
    let a = a.as_ref();
    require_square(a)?;
    if a.hermitian_defect() <= HERMITIAN_TOL * norm_estimate(a) {
        hermitian_eigenvalues(a)
    } else {
        normal_eigenvalues(a)
    }
}

/// All singular values, ascending.
///
/// The matrix is reduced to real bidiagonal form `B`; the singular values
/// of `B` are the nonnegative eigenvalues of the `2n×2n` symmetric
/// tridiagonal with zero diagonal and off-diagonal `d₀, e₀, d₁, e₁, …`.
pub fn singular_values(a: impl AsRef<CMatrix>) -> Result<Vec<f64>, SpectralError> {
    let a = a.as_ref();
    if a.rows() < a.cols() {
        return singular_values(a.adjoint());
    }
    let n = a.cols();
    if n == 0 {
        return Ok(vec![]);
    }
    let (d, e) = householder::bidiagonalize(a);
    let mut sv = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && e[end - 1] != 0.0 {
            end += 1;
        }
        if end - start == 1 {
            sv.push(d[start].abs());
        } else {
            sv.extend(bidiagonal_block_singular_values(&d[start..end], &e[start..end - 1])?);
        }
        start = end;
    }
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}

/// Nonnegative eigenvalues of the Golub–Kahan tridiagonal of one block.
fn bidiagonal_block_singular_values(d: &[f64], e: &[f64]) -> Result<Vec<f64>, SpectralError> {
    let n = d.len();
    let mut diag = vec![0.0; 2 * n];
    let mut off = vec![0.0; 2 * n];
    for k in 0..n {
        off[2 * k] = d[k];
        if k + 1 < n {
            off[2 * k + 1] = e[k];
        }
    }
    tridiag::ql_implicit(&mut diag, &mut off, None)?;
    diag.sort_by(|a, b| b.total_cmp(a));
    Ok(diag[..n].iter().map(|&s| s.max(0.0)).collect())
}

/// `σ_min(A)` of a square matrix; never negative.
pub fn smallest_singular_value(a: impl AsRef<CMatrix>) -> Result<f64, SpectralError> {
    let a = a.as_ref();
    require_square(a)?;
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Largest singular value. Matrices with at most one nonzero per row and
/// column (scaled permutations) are handled exactly.
pub fn operator_norm(a: impl AsRef<CMatrix>) -> Result<f64, SpectralError> {
    let a = a.as_ref();
    if a.is_monomial() {
        return Ok(a.max_abs());
    }
    Ok(singular_values(a)?.last().copied().unwrap_or(0.0))
}
