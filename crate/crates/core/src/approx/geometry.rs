//! Hausdorff distance and one-sided containment of finite point sets.

use super::ApproxError;
use crate::pseudospectra::PointCloud;

fn nonempty(p: &PointCloud) -> Result<(), ApproxError> {
    if p.is_empty() {
        Err(ApproxError::EmptyCloud { label: p.label.clone() })
    } else {
        Ok(())
    }
}

/// `sup_{p∈P} inf_{q∈Q} |p − q|`.
pub fn deviation(p: &PointCloud, q: &PointCloud) -> Result<f64, ApproxError> {
    nonempty(p)?;
    nonempty(q)?;
    Ok(p.points
        .iter()
        .map(|a| q.points.iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max))
}

/// `max(deviation(P, Q), deviation(Q, P))`.
pub fn hausdorff_distance(p: &PointCloud, q: &PointCloud) -> Result<f64, ApproxError> {
    Ok(deviation(p, q)?.max(deviation(q, p)?))
}

/// `P ⊂^δ Q`: every point of `P` is strictly closer than `delta` to `Q`.
pub fn one_sided_contains(p: &PointCloud, q: &PointCloud, delta: f64) -> Result<bool, ApproxError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(ApproxError::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    nonempty(p)?;
    nonempty(q)?;
    Ok(p.points.iter().all(|a| q.points.iter().any(|b| (a - b).norm() < delta)))
}
