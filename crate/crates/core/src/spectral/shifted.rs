//! `σ_min(λI − A)` for many shifts `λ` against one matrix.
//!
//! When `A` is Hermitian, exactly circulant or diagonal it is normal, and
//! `σ_min(λI − A) = dist(λ, σ(A))`; the eigenvalues are computed once and
//! each shift costs a nearest-point search.
//!
//! Otherwise `A` is reduced once by a unitary similarity to upper
//! Hessenberg form `H`, so each shift costs a Givens QR of `λI − H` plus a
//! short Lanczos run on `(R*R)⁻¹`, whose largest eigenvalue is
//! `1/σ_min²`. If that stagnates it restarts once from a second random
//! vector, then falls back to the full bidiagonal SVD of `R`.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::householder::{hessenberg, tridiagonalize};
use super::tridiag;
use super::{circulant_eigenvalues, hermitian_decompose, norm_estimate, singular_values, SpectralError, HERMITIAN_TOL};
use crate::matmodel::CMatrix;

const MAX_LANCZOS_STEPS: usize = 80;
const RESTART_SEED: u64 = 0x005e_ed0f_5160;

/// Precomputed data of `A` for repeated shifted `σ_min` queries.
#[derive(Clone, Debug)]
pub struct ShiftedSigmaMin {
    n: usize,
    kernel: Kernel,
}

#[derive(Clone, Debug)]
enum Kernel {
    /// ascending real spectrum
    RealSpectrum(Vec<f64>),
    Spectrum(Vec<Complex64>),
    Banded(Banded),
}

#[derive(Clone, Debug)]
struct Banded {
    n: usize,
    /// upper bandwidth of the Hessenberg form
    band: usize,
    /// row-major band storage of `H`: row `i` holds columns `i−1 ..= i+band+1`
    h: Vec<Complex64>,
    width: usize,
    start: Vec<Complex64>,
    restart: Vec<Complex64>,
}

fn is_diagonal(a: &CMatrix) -> bool {
    (0..a.cols()).all(|j| a.column(j).iter().enumerate().all(|(i, z)| i == j || z.is_zero()))
}

impl ShiftedSigmaMin {
    pub fn new(a: &CMatrix) -> Result<Self, SpectralError> {
        let n = require_square(a)?;
        if a.hermitian_defect() <= HERMITIAN_TOL * norm_estimate(a) {
            let values = hermitian_decompose(a, false)?.values;
            return Ok(Self { n, kernel: Kernel::RealSpectrum(values) });
        }
        if is_diagonal(a) {
            let values = (0..n).map(|i| a[(i, i)]).collect();
            return Ok(Self { n, kernel: Kernel::Spectrum(values) });
        }
        if let Some(set) = circulant_eigenvalues(a) {
            return Ok(Self { n, kernel: Kernel::Spectrum(set.values) });
        }
        Self::iterative(a)
    }

    /// Always use the per-shift factorization, even for normal input.
    pub fn iterative(a: &CMatrix) -> Result<Self, SpectralError> {
        let n = require_square(a)?;
        Ok(Self { n, kernel: Kernel::Banded(Banded::new(a)) })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `σ_min(λI − A)`.
    pub fn eval(&self, lambda: Complex64) -> Result<f64, SpectralError> {
        match &self.kernel {
            Kernel::RealSpectrum(mu) => {
                if mu.is_empty() {
                    return Ok(0.0);
                }
                let k = mu.partition_point(|&m| m < lambda.re);
                let dx = [k.checked_sub(1), (k < mu.len()).then_some(k)]
                    .into_iter()
                    .flatten()
                    .map(|i| (lambda.re - mu[i]).abs())
                    .fold(f64::INFINITY, f64::min);
                Ok(dx.hypot(lambda.im))
            }
            Kernel::Spectrum(points) => {
                Ok(points.iter().map(|&z| (lambda - z).norm()).fold(if points.is_empty() { 0.0 } else { f64::INFINITY }, f64::min))
            }
            Kernel::Banded(b) => b.eval(lambda),
        }
    }
}

fn require_square(a: &CMatrix) -> Result<usize, SpectralError> {
    if a.is_square() {
        Ok(a.rows())
    } else {
        Err(SpectralError::NotSquare { rows: a.rows(), cols: a.cols() })
    }
}

impl Banded {
    fn new(a: &CMatrix) -> Self {
        let n = a.rows();
        let hermitian = a.hermitian_defect() <= HERMITIAN_TOL * norm_estimate(a);
        let (band, dense) = if hermitian {
            let t = tridiagonalize(a, false);
            let mut m = CMatrix::from_real_diagonal(&t.diag);
            for i in 0..n.saturating_sub(1) {
                m[(i, i + 1)] = Complex64::new(t.off[i], 0.0);
                m[(i + 1, i)] = Complex64::new(t.off[i], 0.0);
            }
            (1.min(n.saturating_sub(1)), m)
        } else {
            (n.saturating_sub(1), hessenberg(a))
        };
        // R from the QR of a Hessenberg matrix with upper bandwidth b has
        // bandwidth b + 1; rows store columns i−1 ..= i+b+1.
        let width = band + 3;
        let mut h = vec![Complex64::zero(); n * width];
        for i in 0..n {
            for j in i.saturating_sub(1)..n.min(i + band + 1) {
                h[i * width + (j + 1 - i)] = dense[(i, j)];
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
        let mut block = || -> Vec<Complex64> {
            (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
        };
        let start = block();
        let restart = block();
        Self { n, band, h, width, start, restart }
    }

    fn eval(&self, lambda: Complex64) -> Result<f64, SpectralError> {
        let n = self.n;
        if n == 0 {
            return Ok(0.0);
        }
        let r = self.factor(lambda);
        let min_pivot = (0..n).map(|i| r[i * self.width + 1].norm()).fold(f64::INFINITY, f64::min);
        if min_pivot <= f64::MIN_POSITIVE * 1e10 {
            return Ok(0.0);
        }
        if n == 1 {
            return Ok(min_pivot);
        }
        for v in [&self.start, &self.restart] {
            if let Some(s) = self.inverse_lanczos(&r, v) {
                return Ok(s);
            }
        }
        self.full_svd_of(&r)
    }

    /// Givens QR of `λI − H`; returns `R` in band storage.
    fn factor(&self, lambda: Complex64) -> Vec<Complex64> {
        let (n, w) = (self.n, self.width);
        let mut r: Vec<Complex64> = self.h.iter().map(|&x| -x).collect();
        for i in 0..n {
            r[i * w + 1] += lambda;
        }
        for k in 0..n - 1 {
            let a = r[k * w + 1];
            let b = r[(k + 1) * w];
            if b.is_zero() {
                continue;
            }
            let (c, s) = givens(a, b);
            let last = (n - 1).min(k + self.band + 1);
            for j in k..=last {
                let x = r[k * w + (j + 1 - k)];
                // row k+1 stores columns k ..= k+b+2
                let y = r[(k + 1) * w + (j - k)];
                r[k * w + (j + 1 - k)] = x * c + s * y;
                r[(k + 1) * w + (j - k)] = -s.conj() * x + y * c;
            }
            r[(k + 1) * w] = Complex64::zero();
        }
        r
    }

    #[inline]
    fn r_at(&self, r: &[Complex64], i: usize, j: usize) -> Complex64 {
        r[i * self.width + (j + 1 - i)]
    }

    fn upper_end(&self, i: usize) -> usize {
        (self.n - 1).min(i + self.band + 1)
    }

    /// Solve `R x = b` in place.
    fn solve_upper(&self, r: &[Complex64], x: &mut [Complex64]) {
        for i in (0..self.n).rev() {
            let mut s = x[i];
            let end = self.upper_end(i);
            for (j, &xj) in x.iter().enumerate().take(end + 1).skip(i + 1) {
                s -= self.r_at(r, i, j) * xj;
            }
            x[i] = s / self.r_at(r, i, i);
        }
    }

    /// Solve `R* x = b` in place.
    fn solve_upper_adjoint(&self, r: &[Complex64], x: &mut [Complex64]) {
        for i in 0..self.n {
            let xi = x[i] / self.r_at(r, i, i).conj();
            x[i] = xi;
            let end = self.upper_end(i);
            for (j, xj) in x.iter_mut().enumerate().take(end + 1).skip(i + 1) {
                *xj -= self.r_at(r, i, j).conj() * xi;
            }
        }
    }

    /// `σ_min(R)` from Lanczos with full reorthogonalization on
    /// `(R*R)⁻¹`; `None` on stagnation.
    ///
    /// Converged when the largest Ritz value `θ`, which increases
    /// monotonically towards `1/σ_min²`, moves by less than `10⁻¹²·θ` on two
    /// consecutive steps, or when the Krylov space becomes invariant.
    fn inverse_lanczos(&self, r: &[Complex64], start: &[Complex64]) -> Option<f64> {
        let n = self.n;
        let steps = n.min(MAX_LANCZOS_STEPS);
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(steps);
        let mut alpha: Vec<f64> = Vec::with_capacity(steps);
        let mut beta: Vec<f64> = Vec::with_capacity(steps);
        let norm = dot(start, start).re.sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return None;
        }
        basis.push(start.iter().map(|z| z / norm).collect());
        let mut previous = f64::NAN;
        let mut settled_steps = 0;
        for k in 0..steps {
            let mut w = basis[k].clone();
            self.solve_upper_adjoint(r, &mut w);
            self.solve_upper(r, &mut w);
            if !w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return None;
            }
            let a = dot(&basis[k], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= qi * c;
                    }
                }
            }
            let b = dot(&w, &w).re.sqrt();
            let mut d = alpha.clone();
            let mut e = beta.clone();
            e.push(0.0);
            tridiag::ql_implicit(&mut d, &mut e, None).ok()?;
            let theta = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if theta.is_nan() || theta <= 0.0 {
                return None;
            }
            let exhausted = k + 1 == n || b <= f64::EPSILON * theta;
            if (theta - previous).abs() <= 1e-12 * theta {
                settled_steps += 1;
            } else {
                settled_steps = 0;
            }
            if exhausted || settled_steps == 2 {
                return Some(theta.sqrt().recip());
            }
            previous = theta;
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
        None
    }

    fn full_svd_of(&self, r: &[Complex64]) -> Result<f64, SpectralError> {
        let dense = CMatrix::from_fn(self.n, self.n, |i, j| {
            if j >= i && j <= self.upper_end(i) {
                self.r_at(r, i, j)
            } else {
                Complex64::zero()
            }
        });
        let sv = singular_values(&dense)?;
        Ok(sv.first().copied().unwrap_or(0.0))
    }
}

/// `(c, s)` with `[c s; −s̄ c]·[a; b] = [r; 0]`, `c` real.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    let rn = an.hypot(bn);
    if an == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0) * (b.conj() / bn));
    }
    (an / rn, (a / an) * b.conj() / rn)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
