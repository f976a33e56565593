//! Clock and shift matrices at a rational rotation `p/q`, and the `q×q`
//! matrix models of operator polynomials built from them.

mod matrix;
mod spec;

pub use matrix::CMatrix;
pub use spec::{CanonicalCoefficients, OperatorSpec, Term};

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::spectral;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatModelError {
    #[error("invalid order: need q >= 1 and 0 <= p < q, got p = {p}, q = {q}")]
    InvalidOrder { p: i64, q: i64 },
    #[error("operator spec has no terms")]
    EmptySpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureTag {
    Shift,
    Clock,
    FourTerm,
    General,
}

#[derive(Clone, Debug)]
pub struct MatrixModel {
    numerator: u64,
    matrix: CMatrix,
    tag: StructureTag,
    spec: Option<OperatorSpec>,
}

impl MatrixModel {
    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn structure_tag(&self) -> StructureTag {
        self.tag
    }

    pub fn spec(&self) -> Option<&OperatorSpec> {
        self.spec.as_ref()
    }

    /// Nonzero entries `(row, col, value)`; the sparse view of the model.
    pub fn sparse_view(&self) -> Vec<(usize, usize, Complex64)> {
        self.matrix.triplets()
    }

    /// CSV with header `row,col,re,im`, zero-based indices, nonzeros only.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "row,col,re,im")?;
        for (i, j, v) in self.sparse_view() {
            writeln!(out, "{i},{j},{:.16e},{:.16e}", v.re, v.im)?;
        }
        Ok(())
    }
}

impl AsRef<CMatrix> for MatrixModel {
    fn as_ref(&self) -> &CMatrix {
        &self.matrix
    }
}

fn check(p: u64, q: u64) -> Result<(), MatModelError> {
    if q == 0 || p >= q {
        return Err(MatModelError::InvalidOrder { p: p as i64, q: q as i64 });
    }
    Ok(())
}

/// `e^{2πi r/q}` for an integer residue `r`, reduced mod `q` before any
/// floating point so large `q` does not accumulate phase error.
pub fn root_of_unity(r: i128, q: u64) -> Complex64 {
    let q_i = q as i128;
    let r = r.rem_euclid(q_i);
    // quarter turns are exact
    if (4 * r) % q_i == 0 {
        return match (4 * r) / q_i {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    // symmetric residue in (-q/2, q/2] keeps the angle in (-π, π]
    let sym = if 2 * r > q_i { r - q_i } else { r };
    let angle = 2.0 * PI * (sym as f64) / (q as f64);
    let (s, c) = angle.sin_cos();
    Complex64::new(c, s)
}

/// The cyclic shift `u`: ones at `(i, i+1)` and `(q−1, 0)` (zero-based).
pub fn shift_matrix(q: u64) -> Result<MatrixModel, MatModelError> {
    check(0, q)?;
    Ok(MatrixModel {
        numerator: 0,
        matrix: monomial_power(q, 0, 1, 0),
        tag: StructureTag::Shift,
        spec: None,
    })
}

/// The clock `v = diag(1, ω, …, ω^{q−1})`, `ω = e^{2πi p/q}`.
pub fn clock_matrix(p: u64, q: u64) -> Result<MatrixModel, MatModelError> {
    check(p, q)?;
    Ok(MatrixModel {
        numerator: p,
        matrix: monomial_power(q, p, 0, 1),
        tag: StructureTag::Clock,
        spec: None,
    })
}

/// `u^j v^k` from the structural formula: entry `(i, i+j mod q)` equals
/// `ω^{k·(i+j mod q)}`.
fn monomial_power(q: u64, p: u64, j: i64, k: i64) -> CMatrix {
    let mut m = CMatrix::zeros(q as usize, q as usize);
    add_monomial(&mut m, q, p, j, k, Complex64::new(1.0, 0.0));
    m
}

fn add_monomial(m: &mut CMatrix, q: u64, p: u64, j: i64, k: i64, coeff: Complex64) {
    let qi = q as i128;
    let shift = (j as i128).rem_euclid(qi);
    for i in 0..qi {
        let col = (i + shift) % qi;
        let phase = root_of_unity((k as i128).rem_euclid(qi) * (p as i128) % qi * col % qi, q);
        m[(i as usize, col as usize)] += coeff * phase;
    }
}

/// Evaluate `Σ c_jk u^j v^k` at `p/q`. `p` need not be coprime to `q`.
pub fn build_operator(spec: &OperatorSpec, p: u64, q: u64) -> Result<MatrixModel, MatModelError> {
    check(p, q)?;
    if spec.terms().is_empty() {
        return Err(MatModelError::EmptySpec);
    }
    let mut m = CMatrix::zeros(q as usize, q as usize);
    for t in spec.terms() {
        if t.coeff == Complex64::new(0.0, 0.0) {
            continue;
        }
        add_monomial(&mut m, q, p, t.u, t.v, t.coeff);
    }
    let tag = if spec.is_canonical() { StructureTag::FourTerm } else { StructureTag::General };
    Ok(MatrixModel { numerator: p, matrix: m, tag, spec: Some(spec.clone()) })
}

/// `‖uv − ω vu‖` in operator norm; zero in exact arithmetic.
pub fn commutation_defect(p: u64, q: u64) -> Result<f64, MatModelError> {
    let u = shift_matrix(q)?.into_matrix();
    let v = clock_matrix(p, q)?.into_matrix();
    let omega = root_of_unity(p as i128, q);
    let d = &u.matmul(&v) - &v.matmul(&u).scale(omega);
    Ok(spectral::operator_norm(&d).expect("norm of a structured matrix"))
}

/// `Σ|c_jk|`; bounds `‖h‖` for every `p/q` because `u`, `v` are unitary.
pub fn spec_norm_bound(spec: &OperatorSpec) -> Result<f64, MatModelError> {
    spec.norm_bound()
}
