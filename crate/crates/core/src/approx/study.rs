//! Ladder of normal certificates compared against the deepest level.

use std::io::{self, Write};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use super::{expansion_for, hausdorff_distance, irrationality_gate, normal_level, ApproxError, CERTIFICATE_SLACK};
use crate::contfrac::RealNumberInput;
use crate::matmodel::OperatorSpec;
use crate::pseudospectra::PointCloud;

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub q_prev: u64,
    pub q_n: u64,
    pub epsilon_sharp: f64,
    pub epsilon_clean: f64,
    /// `d_H(cloud(n), cloud(n_max))`.
    pub empirical_dh: f64,
    /// `ε_sharp(n) + ε_sharp(n_max) + 10⁻⁸`.
    pub tolerance: f64,
}

impl ConvergenceRow {
    pub fn within_tolerance(&self) -> bool {
        self.empirical_dh <= self.tolerance
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub reference_level: usize,
    pub caveats: Vec<String>,
    #[serde(skip)]
    pub clouds: Vec<PointCloud>,
}

impl ConvergenceTable {
    pub fn is_consistent(&self) -> bool {
        self.rows.iter().all(ConvergenceRow::within_tolerance)
    }

    /// Columns `n, q_{n−1}, q_n, epsilon_sharp, epsilon_clean, empirical_dH`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,q_n_minus_1,q_n,epsilon_sharp,epsilon_clean,empirical_dH")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.16e},{:.16e},{:.16e}",
                r.n, r.q_prev, r.q_n, r.epsilon_sharp, r.epsilon_clean, r.empirical_dh
            )?;
        }
        out.flush()
    }
}

/// Certifies every level in `levels` and measures each cloud against the
/// deepest one, the affordable stand-in for `σ(h)`. Levels are evaluated in
/// parallel; the table does not depend on the schedule.
pub fn convergence_study(
    theta: &RealNumberInput,
    spec: &OperatorSpec,
    levels: RangeInclusive<usize>,
    max_q: u64,
) -> Result<ConvergenceTable, ApproxError> {
    if !spec.is_canonical() {
        return Err(ApproxError::NonCanonicalSpec);
    }
    let (first, last) = (*levels.start(), *levels.end());
    if first == 0 || first > last {
        return Err(ApproxError::InvalidInput(format!("empty or invalid level range {first}..={last}")));
    }
    let caveats = irrationality_gate(theta)?;
    let exp = expansion_for(theta, last)?;
    let q_max = exp.q(last)?;
    if q_max > &num_bigint::BigInt::from(max_q) {
        return Err(ApproxError::ResourceBudgetExceeded { q: q_max.to_string(), max_q });
    }
    let results: Vec<_> = levels
        .into_par_iter()
        .map(|n| normal_level(theta, spec, &exp, n, max_q, &caveats))
        .collect::<Result<_, _>>()?;
    let reference = &results.last().expect("nonempty range").0;
    let reference_sharp = results.last().expect("nonempty range").1.epsilon_sharp;
    let mut rows = Vec::with_capacity(results.len());
    for (cloud, cert) in &results {
        rows.push(ConvergenceRow {
            n: cert.n,
            q_prev: cert.q_pair[0],
            q_n: cert.q_pair[1],
            epsilon_sharp: cert.epsilon_sharp,
            epsilon_clean: cert.epsilon_clean,
            empirical_dh: hausdorff_distance(cloud, reference)?,
            tolerance: cert.epsilon_sharp + reference_sharp + CERTIFICATE_SLACK,
        });
    }
    let clouds = results.into_iter().map(|(c, _)| c).collect();
    Ok(ConvergenceTable { rows, reference_level: last, caveats, clouds })
}
