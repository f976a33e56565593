//! Sampled ε-pseudospectra: `σ_min(λI − A)` on a rectangular grid, level
//! masks `{λ : σ_min(λI − A) ≤ ε}`, and mask inclusion checks.
//!
//! Grid values are addressed row-major with the real axis fastest:
//! sample `(i, j)` sits at index `j·nx + i` and at
//! `λ = re_min + i·h_x + i·(im_min + j·h_y)`.

mod export;
mod sandwich;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::matmodel::CMatrix;
use crate::spectral::{self, ShiftedSigmaMin, SpectralError};

pub use export::{pgm_level, read_cloud_csv, write_grid_csv, write_grid_pgm, PGM_LOG10_MAX, PGM_LOG10_MIN};
pub use sandwich::{check_inclusion, sandwich_check, GridPoint, InclusionCheck, SandwichReport};

pub const DEFAULT_RESOLUTION: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PseudospectrumError {
    #[error("resolution must be at least 2 per axis, got {nx}x{ny}")]
    InvalidResolution { nx: usize, ny: usize },
    #[error("degenerate region [{re_min}, {re_max}] x [{im_min}, {im_max}]")]
    DegenerateRegion { re_min: f64, re_max: f64, im_min: f64, im_max: f64 },
    #[error("matrices have orders {left} and {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("grids do not share region and resolution")]
    GridMismatch,
    #[error("at lambda = {re} + {im}i: {source}")]
    AtPoint { re: f64, im: f64, source: SpectralError },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self { re_min, re_max, im_min, im_max }
    }

    /// Square `[−w, w]²`.
    pub fn centered_square(half_width: f64) -> Self {
        Self::new(-half_width, half_width, -half_width, half_width)
    }

    /// Square of half-width `norm_bound + 2·epsilon_max` around 0.
    pub fn default_for(norm_bound: f64, epsilon_max: f64) -> Self {
        let w = norm_bound + 2.0 * epsilon_max;
        Self::centered_square(if w > 0.0 { w } else { 1.0 })
    }

    fn validate(&self) -> Result<(), PseudospectrumError> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|x| x.is_finite())
            && self.re_min < self.re_max
            && self.im_min < self.im_max;
        if ok {
            Ok(())
        } else {
            Err(PseudospectrumError::DegenerateRegion {
                re_min: self.re_min,
                re_max: self.re_max,
                im_min: self.im_min,
                im_max: self.im_max,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub nx: usize,
    pub ny: usize,
}

impl Resolution {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self { nx, ny }
    }

    pub fn square(n: usize) -> Self {
        Self::new(n, n)
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self::square(DEFAULT_RESOLUTION)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub region: Region,
    pub resolution: Resolution,
}

impl GridParams {
    pub fn new(region: Region, resolution: Resolution) -> Self {
        Self { region, resolution }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudospectrumGrid {
    region: Region,
    resolution: Resolution,
    hx: f64,
    hy: f64,
    #[serde(skip)]
    values: Vec<f64>,
    fingerprint: String,
    /// `√(‖A‖₁‖A‖∞)`, used to scale kernel tolerances.
    norm_scale: f64,
    epsilon_levels: Vec<f64>,
}

impl PseudospectrumGrid {
    pub fn region(&self) -> Region {
        self.region
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn params(&self) -> GridParams {
        GridParams::new(self.region, self.resolution)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.hx, self.hy)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn norm_scale(&self) -> f64 {
        self.norm_scale
    }

    pub fn epsilon_levels(&self) -> &[f64] {
        &self.epsilon_levels
    }

    /// Remember `epsilon` as one of the levels extracted from this grid.
    pub fn record_level(&mut self, epsilon: f64) {
        if !self.epsilon_levels.contains(&epsilon) {
            self.epsilon_levels.push(epsilon);
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.resolution.nx + i
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }

    pub fn lambda(&self, i: usize, j: usize) -> Complex64 {
        grid_lambda(&self.region, self.hx, self.hy, i, j)
    }

    /// Accuracy of a single stored value, `10⁻⁷·(‖A‖ + |λ|)`.
    pub fn kernel_tolerance(&self, i: usize, j: usize) -> f64 {
        1e-7 * (self.norm_scale + self.lambda(i, j).norm())
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.region == other.region && self.resolution == other.resolution
    }
}

fn grid_lambda(region: &Region, hx: f64, hy: f64, i: usize, j: usize) -> Complex64 {
    Complex64::new(region.re_min + i as f64 * hx, region.im_min + j as f64 * hy)
}

/// SHA-256 over the dimensions and the IEEE bit patterns of the entries.
pub fn matrix_fingerprint(a: &CMatrix) -> String {
    let mut h = Sha256::new();
    h.update((a.rows() as u64).to_le_bytes());
    h.update((a.cols() as u64).to_le_bytes());
    for z in a.as_slice() {
        h.update(z.re.to_bits().to_le_bytes());
        h.update(z.im.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// `σ_min(λI − A)` at every grid point.
///
/// Points are evaluated on the current rayon pool; each value depends only
/// on `A` and its own `λ`, so the result is bitwise independent of the
/// degree of parallelism.
pub fn compute_grid(a: impl AsRef<CMatrix>, params: GridParams) -> Result<PseudospectrumGrid, PseudospectrumError> {
    let a = a.as_ref();
    let GridParams { region, resolution } = params;
    if resolution.nx < 2 || resolution.ny < 2 {
        return Err(PseudospectrumError::InvalidResolution { nx: resolution.nx, ny: resolution.ny });
    }
    region.validate()?;
    let kernel = ShiftedSigmaMin::new(a)?;
    let hx = (region.re_max - region.re_min) / (resolution.nx - 1) as f64;
    let hy = (region.im_max - region.im_min) / (resolution.ny - 1) as f64;
    let nx = resolution.nx;
    let results: Vec<Result<f64, SpectralError>> = (0..nx * resolution.ny)
        .into_par_iter()
        .map(|k| kernel.eval(grid_lambda(&region, hx, hy, k % nx, k / nx)))
        .collect();
    let mut values = Vec::with_capacity(results.len());
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => values.push(v),
            Err(source) => {
                let l = grid_lambda(&region, hx, hy, k % nx, k / nx);
                return Err(PseudospectrumError::AtPoint { re: l.re, im: l.im, source });
            }
        }
    }
    Ok(PseudospectrumGrid {
        region,
        resolution,
        hx,
        hy,
        values,
        fingerprint: matrix_fingerprint(a),
        norm_scale: spectral::norm_estimate(a),
        epsilon_levels: Vec::new(),
    })
}

/// Grid-point membership in a sampled ε-pseudospectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMask {
    nx: usize,
    ny: usize,
    inside: Vec<bool>,
}

impl LevelMask {
    pub fn resolution(&self) -> Resolution {
        Resolution::new(self.nx, self.ny)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.inside[j * self.nx + i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.inside
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn is_full(&self) -> bool {
        self.inside.iter().all(|&b| b)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.inside.iter().zip(&other.inside).all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!((self.nx, self.ny), (other.nx, other.ny), "mask shapes differ");
        let inside = self.inside.iter().zip(&other.inside).map(|(&a, &b)| a || b).collect();
        Self { nx: self.nx, ny: self.ny, inside }
    }

    /// `(i, j)` of every member, row-major.
    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.inside.iter().enumerate().filter(|(_, &b)| b).map(move |(k, _)| (k % self.nx, k / self.nx))
    }
}

/// Points with `σ_min ≤ epsilon` (closed sublevel set).
pub fn level_set(grid: &PseudospectrumGrid, epsilon: f64) -> LevelMask {
    LevelMask {
        nx: grid.resolution.nx,
        ny: grid.resolution.ny,
        inside: grid.values.iter().map(|&v| v <= epsilon).collect(),
    }
}

/// Finite multiset of points in the plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCloud {
    pub points: Vec<Complex64>,
    pub label: String,
}

impl PointCloud {
    pub fn new(points: Vec<Complex64>, label: impl Into<String>) -> Self {
        Self { points, label: label.into() }
    }

    pub fn from_real(points: &[f64], label: impl Into<String>) -> Self {
        Self::new(points.iter().map(|&x| Complex64::new(x, 0.0)).collect(), label)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Multiset union; the label is kept from `self`.
    pub fn extend(&mut self, other: &PointCloud) {
        self.points.extend_from_slice(&other.points);
    }
}

/// `σ(A) ∪ σ(B)` with multiplicity: the spectrum of `A ⊕ B` without
/// forming it.
pub fn union_spectrum(a: impl AsRef<CMatrix>, b: impl AsRef<CMatrix>) -> Result<PointCloud, SpectralError> {
    let mut points = spectral::eigenvalues(a)?.values;
    points.extend(spectral::eigenvalues(b)?.values);
    Ok(PointCloud::new(points, "union spectrum"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matmodel::shift_matrix;
    use crate::spectral::compare_eigenvalues;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_grid() -> PseudospectrumGrid {
        let a = CMatrix::from_real_diagonal(&[1.0, -1.0]);
        compute_grid(&a, GridParams::new(Region::new(-2.0, 2.0, -1.0, 1.0), Resolution::new(41, 21))).unwrap()
    }

    #[test]
    fn addressing_and_spacing() {
        let g = diag_grid();
        assert_eq!(g.spacing(), (0.1, 0.1));
        assert_eq!(g.values().len(), 41 * 21);
        assert_eq!(g.lambda(20, 10), c(0.0, 0.0));
        assert_eq!(g.index(3, 2), 2 * 41 + 3);
        assert!((g.value(20, 10) - 1.0).abs() < 1e-12);
        assert!(g.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn scalar_grid_is_modulus() {
        let g = compute_grid(CMatrix::zeros(1, 1), GridParams::new(Region::new(0.0, 0.6, 0.0, 0.8), Resolution::new(3, 3))).unwrap();
        assert!((g.value(1, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn jordan_block_pseudospectrum() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let g = compute_grid(&a, GridParams::new(Region::new(-0.09, 0.09, -0.09, 0.09), Resolution::new(3, 3))).unwrap();
        assert!(g.value(1, 1) < 1e-14);
        let l: f64 = 0.09;
        // σ₁σ₂ = |λ|², σ₁² + σ₂² = 2|λ|² + 1
        let x = l * l;
        let want = ((2.0 * x + 1.0 - (4.0 * x + 1.0).sqrt()) / 2.0).sqrt();
        assert!((g.value(2, 1) - want).abs() < 1e-10 * want, "{} vs {want}", g.value(2, 1));
        assert!(level_set(&g, 0.01).contains(2, 1));
    }

    #[test]
    fn masks() {
        let a = CMatrix::from_real_diagonal(&[1.0, -1.0]);
        let off = compute_grid(&a, GridParams::new(Region::new(-1.95, 2.05, -1.0, 1.0), Resolution::new(41, 21))).unwrap();
        let max = off.values().iter().cloned().fold(0.0, f64::max);
        let min = off.values().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0);
        assert!(level_set(&off, max).is_full());
        assert!(level_set(&off, min * 0.5).is_empty());

        let g = diag_grid();
        let m = level_set(&g, 0.5);
        for j in 0..21 {
            for i in 0..41 {
                let l = g.lambda(i, j);
                let d = (l - 1.0).norm().min((l + 1.0).norm());
                if (d - 0.5).abs() > 1e-9 {
                    assert_eq!(m.contains(i, j), d < 0.5, "{l}");
                }
            }
        }
        assert!(level_set(&g, 0.3).is_subset_of(&m));
    }

    #[test]
    fn normal_grid_matches_distance() {
        let a = shift_matrix(7).unwrap().into_matrix();
        let g = compute_grid(&a, GridParams::new(Region::centered_square(1.5), Resolution::square(15))).unwrap();
        let eig = spectral::normal_eigenvalues(&a).unwrap();
        for j in 0..15 {
            for i in 0..15 {
                let l = g.lambda(i, j);
                let d = eig.values.iter().map(|z| (l - z).norm()).fold(f64::INFINITY, f64::min);
                assert!((g.value(i, j) - d).abs() <= 1e-7 * (1.0 + l.norm()));
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        let a = CMatrix::identity(2);
        assert!(matches!(
            compute_grid(&a, GridParams::new(Region::centered_square(1.0), Resolution::new(1, 5))),
            Err(PseudospectrumError::InvalidResolution { .. })
        ));
        assert!(matches!(
            compute_grid(&a, GridParams::new(Region::new(1.0, 1.0, 0.0, 1.0), Resolution::square(4))),
            Err(PseudospectrumError::DegenerateRegion { .. })
        ));
    }

    #[test]
    fn fingerprint_tracks_entries() {
        let a = CMatrix::identity(3);
        let mut b = a.clone();
        assert_eq!(matrix_fingerprint(&a), matrix_fingerprint(&b));
        b[(0, 1)] = c(1e-300, 0.0);
        assert_ne!(matrix_fingerprint(&a), matrix_fingerprint(&b));
        assert_eq!(matrix_fingerprint(&a).len(), 64);
    }

    #[test]
    fn union_spectrum_examples() {
        let u = union_spectrum(CMatrix::from_real_diagonal(&[1.0]), CMatrix::from_real_diagonal(&[2.0])).unwrap();
        assert_eq!(u.points, vec![c(1.0, 0.0), c(2.0, 0.0)]);

        let mut u = union_spectrum(shift_matrix(2).unwrap(), shift_matrix(3).unwrap()).unwrap().points;
        u.sort_by(compare_eigenvalues);
        let h = 3f64.sqrt() / 2.0;
        let want = [c(-1.0, 0.0), c(-0.5, -h), c(-0.5, h), c(1.0, 0.0), c(1.0, 0.0)];
        for (g, w) in u.iter().zip(&want) {
            assert!((g - w).norm() < 1e-15);
        }

        let a = shift_matrix(4).unwrap();
        let u = union_spectrum(&a, &a).unwrap();
        assert_eq!(u.len(), 8);
    }

    #[test]
    fn union_spectrum_equals_direct_sum() {
        for (qa, qb) in [(1u64, 1u64), (3, 5), (8, 8)] {
            let a = shift_matrix(qa).unwrap().into_matrix();
            let b = crate::matmodel::clock_matrix(1 % qb, qb).unwrap().into_matrix();
            let u = union_spectrum(&a, &b).unwrap().points;
            let mut d = spectral::normal_eigenvalues(a.direct_sum(&b)).unwrap().values;
            assert_eq!(u.len(), d.len());
            // greedy nearest matching is exact here since the points are
            // well separated or coincide
            for x in &u {
                let k = (0..d.len()).min_by(|&i, &j| (x - d[i]).norm().total_cmp(&(x - d[j]).norm())).unwrap();
                assert!((x - d[k]).norm() < 1e-9, "{qa} {qb}: {x} missing");
                d.swap_remove(k);
            }
        }
    }
}
