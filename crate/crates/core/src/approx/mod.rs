//! Certified approximation of spectra and pseudospectra of rotation-algebra
//! operators by the matrix models at consecutive convergents.
//!
//! For irrational `θ` with convergents `p_k/q_k` and a four-term operator
//! `h = α₁U + α₋₁U* + β₁V + β₋₁V*`, the models `h_{n−1}`, `h_n` at
//! `p_{n−1}/q_{n−1}` and `p_n/q_n` determine the spectrum of `h` up to an
//! explicit radius `ε_n`; see [`bounds`] for the radii.

pub mod bounds;
mod geometry;
mod study;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::contfrac::{expand, ContFracError, ContinuedFractionExpansion, QuadraticValue, RealNumberInput};
use crate::matmodel::{build_operator, MatModelError, MatrixModel, OperatorSpec};
use crate::pseudospectra::{
    check_inclusion, compute_grid, level_set, GridParams, InclusionCheck, LevelMask, PointCloud, PseudospectrumError,
    PseudospectrumGrid, Region, Resolution,
};
use crate::spectral::{self, SpectralError, HERMITIAN_TOL, NORMAL_TOL};

pub use bounds::{
    clean_bound, haagerup_rordam_bound, one_sided_constant, one_sided_radius, sharp_bound, sharpness_floor,
    spectral_variation_bound,
};
pub use geometry::{deviation, hausdorff_distance, one_sided_contains};
pub use study::{convergence_study, ConvergenceRow, ConvergenceTable};

/// Largest matrix order built unless the caller says otherwise.
pub const DEFAULT_MAX_Q: u64 = 4096;

/// Slack added to certificate comparisons between floating point radii.
pub const CERTIFICATE_SLACK: f64 = 1e-8;

const DECIMAL_CAVEAT: &str = "decimal input: irrationality of θ is assumed, not certified";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("θ is rational; the approximation bounds need irrational θ")]
    ThetaRational,
    #[error("operator spec is not of the four-term form α₁U + α₋₁U* + β₁V + β₋₁V*")]
    NonCanonicalSpec,
    #[error("matrix model of order {q} is not normal")]
    ModelsNotNormal { q: u64 },
    #[error("index {index} out of range: expansion has {available} partial quotients")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("matrix order {q} exceeds the budget max_q = {max_q}")]
    ResourceBudgetExceeded { q: String, max_q: u64 },
    #[error("point cloud '{label}' is empty")]
    EmptyCloud { label: String },
    #[error("sharp bound {sharp} exceeds clean bound {clean}")]
    BoundOrder { sharp: f64, clean: f64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    ContFrac(#[from] ContFracError),
    #[error(transparent)]
    MatModel(#[from] MatModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Pseudospectrum(#[from] PseudospectrumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMode {
    PseudospectrumSandwich,
    NormalHausdorff,
}

/// Two-sided certificate at level `n`.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximationCertificate {
    pub theta: RealNumberInput,
    pub spec: OperatorSpec,
    pub n: usize,
    /// `[p_{n−1}, p_n]`
    pub p_pair: [u64; 2],
    /// `[q_{n−1}, q_n]`
    pub q_pair: [u64; 2],
    pub epsilon_sharp: f64,
    pub epsilon_clean: f64,
    pub mode: CertificateMode,
    pub caveats: Vec<String>,
}

impl ApproximationCertificate {
    /// `min(ε_sharp, ε_clean)`.
    pub fn radius(&self) -> f64 {
        self.epsilon_sharp.min(self.epsilon_clean)
    }

    /// The serialized certificate, with the cloud as `[[re, im], …]`.
    pub fn to_json(&self, cloud: &PointCloud) -> Value {
        json!({
            "theta": self.theta.to_string(),
            "spec": self.spec,
            "n": self.n,
            "p_pair": self.p_pair,
            "q_pair": self.q_pair,
            "epsilon_sharp": self.epsilon_sharp,
            "epsilon_clean": self.epsilon_clean,
            "radius": self.radius(),
            "mode": self.mode,
            "caveats": self.caveats,
            "cloud": cloud.points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        })
    }
}

/// Rejects rational `θ` and `θ ∉ (0,1)`; returns caveats to attach.
fn irrationality_gate(theta: &RealNumberInput) -> Result<Vec<String>, ApproxError> {
    theta.check_rotation_parameter()?;
    match theta {
        RealNumberInput::Rational(_) => Err(ApproxError::ThetaRational),
        RealNumberInput::QuadraticSurd(_) => Ok(vec![]),
        RealNumberInput::Decimal(_) => Ok(vec![DECIMAL_CAVEAT.to_string()]),
    }
}

fn within_budget(q: &BigInt, max_q: u64) -> Result<u64, ApproxError> {
    match q.to_u64() {
        Some(v) if v <= max_q => Ok(v),
        _ => Err(ApproxError::ResourceBudgetExceeded { q: q.to_string(), max_q }),
    }
}

/// Expansion deep enough for level `n` (needs `q_{n+1}`).
fn expansion_for(theta: &RealNumberInput, n: usize) -> Result<ContinuedFractionExpansion, ApproxError> {
    if n == 0 {
        return Err(ApproxError::InvalidInput("level n must be at least 1".into()));
    }
    let exp = expand(theta, n + 1)?;
    if exp.len() < n + 1 {
        return Err(ApproxError::IndexOutOfRange { index: n + 1, available: exp.len() });
    }
    Ok(exp)
}

struct Level {
    p_pair: [u64; 2],
    q_pair: [u64; 2],
    models: [MatrixModel; 2],
    epsilon_sharp: f64,
    epsilon_clean: f64,
}

fn build_level(spec: &OperatorSpec, exp: &ContinuedFractionExpansion, n: usize, max_q: u64) -> Result<Level, ApproxError> {
    let mut p_pair = [0u64; 2];
    let mut q_pair = [0u64; 2];
    for (slot, k) in [n - 1, n].into_iter().enumerate() {
        let (p, q) = exp.convergent(k).map_err(|_| ApproxError::IndexOutOfRange { index: k, available: exp.len() })?;
        q_pair[slot] = within_budget(q, max_q)?;
        p_pair[slot] = p.to_u64().expect("0 <= p < q");
    }
    let models = [build_operator(spec, p_pair[0], q_pair[0])?, build_operator(spec, p_pair[1], q_pair[1])?];
    Ok(Level {
        p_pair,
        q_pair,
        models,
        epsilon_sharp: sharp_bound(spec, exp, n)?,
        epsilon_clean: clean_bound(spec, exp, n)?,
    })
}

fn is_hermitian(m: &MatrixModel) -> bool {
    m.matrix().hermitian_defect() <= HERMITIAN_TOL * m.matrix().max_abs() * m.order() as f64
}

/// Spectrum of a model that must be normal.
fn model_spectrum(m: &MatrixModel) -> Result<Vec<num_complex::Complex64>, ApproxError> {
    if is_hermitian(m) {
        return Ok(spectral::hermitian_eigenvalues(m)?.values);
    }
    if spectral::circulant_eigenvalues(m).is_none() && !spectral::is_normal(m, NORMAL_TOL) {
        return Err(ApproxError::ModelsNotNormal { q: m.order() as u64 });
    }
    Ok(spectral::normal_eigenvalues(m)?.values)
}

fn normal_level(
    theta: &RealNumberInput,
    spec: &OperatorSpec,
    exp: &ContinuedFractionExpansion,
    n: usize,
    max_q: u64,
    caveats: &[String],
) -> Result<(PointCloud, ApproximationCertificate), ApproxError> {
    let level = build_level(spec, exp, n, max_q)?;
    let mut points = model_spectrum(&level.models[0])?;
    points.extend(model_spectrum(&level.models[1])?);
    let [qa, qb] = level.q_pair;
    let [pa, pb] = level.p_pair;
    let cloud = PointCloud::new(points, format!("spectra at {pa}/{qa} and {pb}/{qb}"));
    let certificate = ApproximationCertificate {
        theta: theta.clone(),
        spec: spec.clone(),
        n,
        p_pair: level.p_pair,
        q_pair: level.q_pair,
        epsilon_sharp: level.epsilon_sharp,
        epsilon_clean: level.epsilon_clean,
        mode: CertificateMode::NormalHausdorff,
        caveats: caveats.to_vec(),
    };
    Ok((cloud, certificate))
}

/// `σ(h_{n−1}) ∪ σ(h_n)`, which lies within `radius()` of `σ(h)` in
/// Hausdorff distance when both models are normal.
pub fn certify_normal(
    theta: &RealNumberInput,
    spec: &OperatorSpec,
    n: usize,
) -> Result<(PointCloud, ApproximationCertificate), ApproxError> {
    certify_normal_within(theta, spec, n, DEFAULT_MAX_Q)
}

pub fn certify_normal_within(
    theta: &RealNumberInput,
    spec: &OperatorSpec,
    n: usize,
    max_q: u64,
) -> Result<(PointCloud, ApproximationCertificate), ApproxError> {
    if !spec.is_canonical() {
        return Err(ApproxError::NonCanonicalSpec);
    }
    let caveats = irrationality_gate(theta)?;
    let exp = expansion_for(theta, n)?;
    normal_level(theta, spec, &exp, n, max_q, &caveats)
}

/// Pseudospectral enclosure at level `n`:
/// `mask(ε) ⊆ σ^{ε+ε_n}(h) ⊆ mask(ε + 2ε_n)`, each mask the union over the
/// two models.
#[derive(Clone, Debug, Serialize)]
pub struct PseudospectrumCertificate {
    pub theta: RealNumberInput,
    pub spec: OperatorSpec,
    pub n: usize,
    pub p_pair: [u64; 2],
    pub q_pair: [u64; 2],
    pub epsilon: f64,
    /// `None` for specs outside the four-term family, which only carry the
    /// `O(1/q_{n−1} + 1/q_n)` rate.
    pub epsilon_sharp: Option<f64>,
    pub epsilon_clean: Option<f64>,
    pub rate_only: bool,
    /// `ε + ε_n`, the level of the enclosed pseudospectrum of `h`.
    pub target_epsilon: Option<f64>,
    /// `ε + 2ε_n`.
    pub outer_epsilon: Option<f64>,
    pub grid: GridParams,
    pub fingerprints: [String; 2],
    pub inner_count: usize,
    pub outer_count: Option<usize>,
    /// `inner ⊆ outer` on the grid.
    pub inclusion: Option<InclusionCheck>,
    pub mode: CertificateMode,
    pub caveats: Vec<String>,
}

impl PseudospectrumCertificate {
    pub fn radius(&self) -> Option<f64> {
        match (self.epsilon_sharp, self.epsilon_clean) {
            (Some(s), Some(c)) => Some(s.min(c)),
            _ => None,
        }
    }

    pub fn holds(&self) -> bool {
        self.inclusion.as_ref().is_none_or(|c| c.holds())
    }
}

pub struct PseudospectrumOutcome {
    pub certificate: PseudospectrumCertificate,
    /// Grids of `h_{n−1}` and `h_n`.
    pub grids: [PseudospectrumGrid; 2],
    pub inner: LevelMask,
    pub outer: Option<LevelMask>,
}

/// Grids `σ_min(λ − h_{n−1})`, `σ_min(λ − h_n)` and the masks bracketing
/// `σ^{ε+ε_n}(h)`. Without a region the grid covers the square of
/// half-width `Σ|c_jk| + 2(ε + 2ε_n)`.
pub fn certify_pseudospectrum(
    theta: &RealNumberInput,
    spec: &OperatorSpec,
    n: usize,
    epsilon: f64,
    region: Option<Region>,
    resolution: Resolution,
    max_q: u64,
) -> Result<PseudospectrumOutcome, ApproxError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ApproxError::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let caveats = irrationality_gate(theta)?;
    let exp = expansion_for(theta, n)?;
    let canonical = spec.is_canonical();
    let (level, bounds) = if canonical {
        let level = build_level(spec, &exp, n, max_q)?;
        let b = (level.epsilon_sharp, level.epsilon_clean);
        (level, Some(b))
    } else {
        let mut p_pair = [0u64; 2];
        let mut q_pair = [0u64; 2];
        for (slot, k) in [n - 1, n].into_iter().enumerate() {
            let (p, q) = exp.convergent(k)?;
            q_pair[slot] = within_budget(q, max_q)?;
            p_pair[slot] = p.to_u64().expect("0 <= p < q");
        }
        let models = [build_operator(spec, p_pair[0], q_pair[0])?, build_operator(spec, p_pair[1], q_pair[1])?];
        (Level { p_pair, q_pair, models, epsilon_sharp: f64::NAN, epsilon_clean: f64::NAN }, None)
    };
    let radius = bounds.map(|(s, c)| s.min(c));
    let outer_epsilon = radius.map(|r| epsilon + 2.0 * r);
    let region = match region {
        Some(r) => r,
        None => Region::default_for(spec.norm_bound()?, outer_epsilon.unwrap_or(epsilon)),
    };
    let params = GridParams::new(region, resolution);
    let mut grids = [compute_grid(&level.models[0], params)?, compute_grid(&level.models[1], params)?];
    let inner = level_set(&grids[0], epsilon).union(&level_set(&grids[1], epsilon));
    for g in grids.iter_mut() {
        g.record_level(epsilon);
        if let Some(o) = outer_epsilon {
            g.record_level(o);
        }
    }
    let (outer, inclusion) = match outer_epsilon {
        Some(o) => {
            let mask = level_set(&grids[0], o).union(&level_set(&grids[1], o));
            let check = check_inclusion(&[&grids[0], &grids[1]], epsilon, &[&grids[0], &grids[1]], o)?;
            (Some(mask), Some(check))
        }
        None => (None, None),
    };
    let certificate = PseudospectrumCertificate {
        theta: theta.clone(),
        spec: spec.clone(),
        n,
        p_pair: level.p_pair,
        q_pair: level.q_pair,
        epsilon,
        epsilon_sharp: bounds.map(|b| b.0),
        epsilon_clean: bounds.map(|b| b.1),
        rate_only: !canonical,
        target_epsilon: radius.map(|r| epsilon + r),
        outer_epsilon,
        grid: params,
        fingerprints: [grids[0].fingerprint().to_string(), grids[1].fingerprint().to_string()],
        inner_count: inner.count(),
        outer_count: outer.as_ref().map(|m| m.count()),
        inclusion,
        mode: CertificateMode::PseudospectrumSandwich,
        caveats,
    };
    Ok(PseudospectrumOutcome { certificate, grids, inner, outer })
}

/// Containment certificate for a single model `h_n` at `p/n` closest to
/// `θ`: `σ(h_n) ⊂^{C₁/√n} σ(h)` and `σ^ε(h_n) ⊂ σ^{ε + C₁/√n}(h)`.
#[derive(Clone, Debug, Serialize)]
pub struct OneSidedCertificate {
    pub theta: RealNumberInput,
    pub spec: OperatorSpec,
    pub denominator_n: u64,
    /// In `0..n`; when `wrapped`, `p/n` stands for `(p + n)/n = 1`.
    pub chosen_p: u64,
    pub wrapped: bool,
    /// `n·θ` was a half-integer; the even neighbour was taken.
    pub tie_broken: bool,
    /// `|θ − p/n|`, verified exactly to be at most `1/(2n)`.
    pub deviation: f64,
    pub c1: f64,
    pub radius: f64,
    pub caveats: Vec<String>,
}

pub enum OneSidedSpectrum {
    Spectrum(PointCloud),
    /// The model is not normal; use [`one_sided_pseudospectrum`].
    NotNormal,
}

/// `round(n·θ)` (half-integers to even) and exact verification of
/// `|θ − p/n| ≤ 1/(2n)`. Returns `(p, tie_broken)` with `p ∈ 0..=n`.
fn nearest_numerator(theta: &RealNumberInput, n: u64) -> Result<(u64, bool), ApproxError> {
    let center = match theta {
        RealNumberInput::Decimal(d) => QuadraticValue::from_rational(d.value()),
        _ => theta.exact_value().expect("exact input"),
    };
    let nn = BigInt::from(n);
    let two = BigInt::from(2);
    // n·θ + 1/2 = (2n·a + c + 2n·b√d)/(2c)
    let shifted = QuadraticValue::new(
        &two * &nn * &center.a + &center.c,
        &two * &nn * &center.b,
        &two * &center.c,
        center.d.clone(),
    );
    let floor = shifted.floor();
    let mut p = floor.clone();
    let tie = shifted.sub_rational(&BigRational::from_integer(floor.clone())).signum().is_eq();
    if tie && (&p % &two) != BigInt::zero() {
        p -= 1;
    }
    let p = p.to_u64().filter(|&v| v <= n).expect("0 < θ < 1");
    let target = BigRational::new(BigInt::from(p), nn.clone());
    let half = BigRational::new(BigInt::from(1), &two * &nn);
    let (lo, hi) = (&target - &half, &target + &half);
    let ok = match theta {
        RealNumberInput::Decimal(d) if d.precision().is_some() => {
            let (a, b) = d.enclosure();
            a >= lo && b <= hi
        }
        _ => center.cmp_rational(&lo).is_ge() && center.cmp_rational(&hi).is_le(),
    };
    if !ok {
        return Err(ApproxError::InvalidInput(format!(
            "cannot certify |θ − {p}/{n}| ≤ 1/(2n) for θ = {theta}; give more digits"
        )));
    }
    Ok((p, tie))
}

fn one_sided_setup(
    theta: &RealNumberInput,
    spec: &OperatorSpec,
    n: u64,
    max_q: u64,
) -> Result<(MatrixModel, OneSidedCertificate), ApproxError> {
    if n == 0 {
        return Err(ApproxError::InvalidInput("denominator n must be at least 1".into()));
    }
    if !spec.is_canonical() {
        return Err(ApproxError::NonCanonicalSpec);
    }
    let mut caveats = irrationality_gate(theta)?;
    if n > max_q {
        return Err(ApproxError::ResourceBudgetExceeded { q: n.to_string(), max_q });
    }
    let (p, tie_broken) = nearest_numerator(theta, n)?;
    if tie_broken {
        caveats.push(format!("n·θ is a half-integer; took the even numerator {p}"));
    }
    let wrapped = p == n;
    let chosen_p = p % n;
    let deviation = match theta.exact_value() {
        Some(v) => v.sub_rational(&BigRational::new(BigInt::from(p), BigInt::from(n))).abs().to_f64(),
        None => (theta.to_f64() - p as f64 / n as f64).abs(),
    };
    let model = build_operator(spec, chosen_p, n)?;
    let certificate = OneSidedCertificate {
        theta: theta.clone(),
        spec: spec.clone(),
        denominator_n: n,
        chosen_p,
        wrapped,
        tie_broken,
        deviation,
        c1: one_sided_constant(spec)?,
        radius: one_sided_radius(spec, n)?,
        caveats,
    };
    Ok((model, certificate))
}

/// Spectrum of `h_n` with the one-sided radius `C₁/√n`.
pub fn one_sided(
    theta: &RealNumberInput,
    spec: &OperatorSpec,
    n: u64,
    max_q: u64,
) -> Result<(OneSidedSpectrum, OneSidedCertificate), ApproxError> {
    let (model, certificate) = one_sided_setup(theta, spec, n, max_q)?;
    let spectrum = match model_spectrum(&model) {
        Ok(points) => OneSidedSpectrum::Spectrum(PointCloud::new(
            points,
            format!("spectrum at {}/{}", certificate.chosen_p, n),
        )),
        Err(ApproxError::ModelsNotNormal { .. }) => OneSidedSpectrum::NotNormal,
        Err(e) => return Err(e),
    };
    Ok((spectrum, certificate))
}

/// Grid of `σ_min(λ − h_n)` and the mask of `σ^ε(h_n)`, which lies in
/// `σ^{ε + C₁/√n}(h)`.
pub fn one_sided_pseudospectrum(
    theta: &RealNumberInput,
    spec: &OperatorSpec,
    n: u64,
    epsilon: f64,
    params: GridParams,
    max_q: u64,
) -> Result<(PseudospectrumGrid, LevelMask, OneSidedCertificate), ApproxError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ApproxError::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let (model, certificate) = one_sided_setup(theta, spec, n, max_q)?;
    let mut grid = compute_grid(&model, params)?;
    grid.record_level(epsilon);
    let mask = level_set(&grid, epsilon);
    Ok((grid, mask, certificate))
}
