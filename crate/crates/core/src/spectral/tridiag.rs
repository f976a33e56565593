//! Implicit-shift QL iteration for real symmetric tridiagonal matrices.

use num_complex::Complex64;

use super::SpectralError;
use crate::matmodel::CMatrix;

pub(crate) const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Diagonalize the tridiagonal `(diag, off)` in place; `off[i]` couples `i`
/// and `i+1` and `off[n−1]` is ignored. When `vectors` is given, the plane
/// rotations are accumulated into its columns. Eigenvalues are left
/// unsorted.
///
/// Off-diagonals are declared negligible against the largest `|d|+|e|` seen
/// so far, which gives absolute accuracy `O(ε‖T‖)` and guarantees deflation
/// even for zero diagonals.
pub(crate) fn ql_implicit(diag: &mut [f64], off: &mut [f64], mut vectors: Option<&mut CMatrix>) -> Result<(), SpectralError> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    let mut scale: f64 = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        scale = scale.max(diag[l].abs() + off[l].abs());
        loop {
            let mut m = l;
            while m + 1 < n {
                if off[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(SpectralError::ConvergenceFailure { index: l });
            }
            // Wilkinson-type shift from the leading 2×2 block
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = vectors.as_deref_mut() {
                    rotate_columns(z, i, c, s);
                }
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

fn rotate_columns(z: &mut CMatrix, i: usize, c: f64, s: f64) {
    let rows = z.rows();
    for k in 0..rows {
        let f: Complex64 = z[(k, i + 1)];
        let zi = z[(k, i)];
        z[(k, i + 1)] = zi * s + f * c;
        z[(k, i)] = zi * c - f * s;
    }
}
