//! Householder reductions: Hermitian → real tridiagonal, general → upper
//! Hessenberg, general → real bidiagonal.

use num_complex::Complex64;
use num_traits::Zero;

use crate::matmodel::CMatrix;

/// Elementary reflector `H = I − τ v v*` with `v[0] = 1`, chosen so that
/// `H* x = β e₁` with `β` real. On return `x` holds `v`.
pub(crate) fn reflector(x: &mut [Complex64]) -> (Complex64, f64) {
    let alpha = x[0];
    let xnorm = x[1..].iter().fold(0.0f64, |acc, z| acc.hypot(z.norm()));
    x[0] = Complex64::new(1.0, 0.0);
    if xnorm == 0.0 && alpha.im == 0.0 {
        return (Complex64::zero(), alpha.re);
    }
    let beta = -alpha.re.hypot(alpha.im).hypot(xnorm).copysign(alpha.re);
    let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = (alpha - beta).inv();
    for z in &mut x[1..] {
        *z *= scale;
    }
    (tau, beta)
}

pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples `i` and `i+1`; `off[n−1] = 0`.
    pub off: Vec<f64>,
    /// `A = Q T Q*` when requested.
    pub q: Option<CMatrix>,
}

/// Unitary reduction of a Hermitian matrix to a real symmetric tridiagonal.
/// Only the Hermitian part of `a` is used.
pub(crate) fn tridiagonalize(a: &CMatrix, want_q: bool) -> Tridiagonal {
    let n = a.rows();
    let mut m = a.clone();
    let mut q = want_q.then(|| CMatrix::identity(n));
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![Complex64::zero(); n];
    let mut p = vec![Complex64::zero(); n];
    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let v = &mut v[..len];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = m[(k + 1 + i, k)];
        }
        let (tau, beta) = reflector(v);
        diag[k] = m[(k, k)].re;
        off[k] = beta;
        if tau.is_zero() {
            continue;
        }
        // p = τ A₂₂ v on the trailing block
        let p = &mut p[..len];
        p.iter_mut().for_each(|x| *x = Complex64::zero());
        for (jj, &vj) in v.iter().enumerate() {
            let col = m.column(k + 1 + jj);
            let tv = tau * vj;
            for (pi, &aij) in p.iter_mut().zip(&col[k + 1..]) {
                *pi += aij * tv;
            }
        }
        let vp: Complex64 = v.iter().zip(p.iter()).map(|(a, b)| a.conj() * b).sum();
        let kappa = 0.5 * (tau.conj() * vp).re;
        for (pi, &vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * kappa;
        }
        // A₂₂ ← A₂₂ − v p* − p v*
        for jj in 0..len {
            let (vj, pj) = (v[jj].conj(), p[jj].conj());
            let col = m.column_mut(k + 1 + jj);
            for ii in 0..len {
                col[k + 1 + ii] -= v[ii] * pj + p[ii] * vj;
            }
        }
        if let Some(q) = q.as_mut() {
            apply_right(q, 0, k + 1, v, tau);
        }
    }
    if n > 0 {
        diag[n - 1] = m[(n - 1, n - 1)].re;
    }
    Tridiagonal { diag, off, q }
}

/// `A[rows.., c0..] ← A[rows.., c0..] (I − τ v v*)`.
fn apply_right(a: &mut CMatrix, r0: usize, c0: usize, v: &[Complex64], tau: Complex64) {
    let rows = a.rows();
    let mut w = vec![Complex64::zero(); rows - r0];
    for (jj, &vj) in v.iter().enumerate() {
        let col = a.column(c0 + jj);
        for (wi, &x) in w.iter_mut().zip(&col[r0..]) {
            *wi += x * vj;
        }
    }
    for (jj, &vj) in v.iter().enumerate() {
        let f = tau * vj.conj();
        let col = a.column_mut(c0 + jj);
        for (x, &wi) in col[r0..].iter_mut().zip(&w) {
            *x -= wi * f;
        }
    }
}

/// `A[r0.., c0..] ← (I − τ v v*)* A[r0.., c0..]`.
fn apply_left_adjoint(a: &mut CMatrix, r0: usize, c0: usize, v: &[Complex64], tau: Complex64) {
    let tc = tau.conj();
    for j in c0..a.cols() {
        let col = &mut a.column_mut(j)[r0..r0 + v.len()];
        let s: Complex64 = v.iter().zip(col.iter()).map(|(vi, x)| vi.conj() * x).sum();
        if s.is_zero() {
            continue;
        }
        let f = tc * s;
        for (x, &vi) in col.iter_mut().zip(v) {
            *x -= vi * f;
        }
    }
}

/// Unitary similarity to upper Hessenberg form.
pub(crate) fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut m = a.clone();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = m.column(k)[k + 1..].to_vec();
        let (tau, beta) = reflector(&mut v);
        if tau.is_zero() {
            continue;
        }
        apply_left_adjoint(&mut m, k + 1, k, &v, tau);
        apply_right(&mut m, 0, k + 1, &v, tau);
        m[(k + 1, k)] = Complex64::new(beta, 0.0);
        for i in k + 2..n {
            m[(i, k)] = Complex64::zero();
        }
    }
    m
}

/// Golub–Kahan bidiagonalization of a square matrix. Returns the diagonal and
/// superdiagonal (both real) of a bidiagonal matrix with the same singular
/// values as `a`.
pub(crate) fn bidiagonalize(a: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.cols();
    assert!(a.rows() >= n);
    let mut m = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    for k in 0..n {
        let mut v: Vec<Complex64> = m.column(k)[k..].to_vec();
        let (tau, beta) = reflector(&mut v);
        d[k] = beta;
        if !tau.is_zero() {
            apply_left_adjoint(&mut m, k, k + 1, &v, tau);
        }
        if k + 1 < n {
            let mut w: Vec<Complex64> = (k + 1..n).map(|j| m[(k, j)].conj()).collect();
            let (tau, beta) = reflector(&mut w);
            e[k] = beta;
            if !tau.is_zero() {
                apply_right(&mut m, k + 1, k + 1, &w, tau);
            }
        }
    }
    (d, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()))
    }

    #[test]
    fn reflector_annihilates() {
        let x = vec![Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5), Complex64::new(-0.7, 0.1)];
        let mut v = x.clone();
        let (tau, beta) = reflector(&mut v);
        // H* x = x − conj(τ) v (v* x)
        let vx: Complex64 = v.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
        let hx: Vec<Complex64> = x.iter().zip(&v).map(|(xi, vi)| xi - tau.conj() * vi * vx).collect();
        assert!((hx[0] - Complex64::new(beta, 0.0)).norm() < 1e-14);
        assert!(hx[1].norm() < 1e-14 && hx[2].norm() < 1e-14);
    }

    #[test]
    fn tridiagonal_reconstructs() {
        let b = sample(7, 3);
        let a = &b + &b.adjoint();
        let t = tridiagonalize(&a, true);
        let q = t.q.unwrap();
        let mut tm = CMatrix::from_real_diagonal(&t.diag);
        for i in 0..6 {
            tm[(i, i + 1)] = Complex64::new(t.off[i], 0.0);
            tm[(i + 1, i)] = Complex64::new(t.off[i], 0.0);
        }
        let back = q.matmul(&tm).matmul(&q.adjoint());
        assert!((&back - &a).max_abs() < 1e-13);
        assert!((&q.matmul(&q.adjoint()) - &CMatrix::identity(7)).max_abs() < 1e-14);
    }

    #[test]
    fn hessenberg_preserves_trace_and_frobenius() {
        let a = sample(6, 11);
        let h = hessenberg(&a);
        for j in 0..6 {
            for i in j + 2..6 {
                assert_eq!(h[(i, j)], Complex64::zero());
            }
        }
        assert!((h.trace() - a.trace()).norm() < 1e-13);
        assert!((h.frobenius_norm() - a.frobenius_norm()).abs() < 1e-13);
    }

    #[test]
    fn bidiagonal_preserves_frobenius() {
        let a = sample(5, 5);
        let (d, e) = bidiagonalize(&a);
        let f = d.iter().chain(&e).map(|x| x * x).sum::<f64>().sqrt();
        assert!((f - a.frobenius_norm()).abs() < 1e-13);
    }
}
