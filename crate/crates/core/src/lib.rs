//! Finite clock/shift matrix models for operators in irrational rotation
//! algebras, with certified error radii for their spectra and pseudospectra.
//!
//! The pipeline is: expand `θ` into continued-fraction convergents
//! ([`contfrac`]), realize an operator at two consecutive convergents as
//! `q×q` matrices ([`matmodel`]), diagonalize or sample them ([`spectral`],
//! [`pseudospectra`]), and attach the error radius that transfers the finite
//! result to the infinite-dimensional operator ([`approx`]).

pub mod constants;
pub mod contfrac;
pub mod matmodel;
pub mod spectral;
pub mod pseudospectra;
pub mod approx;

pub use approx::{
    certify_normal, certify_pseudospectrum, convergence_study, hausdorff_distance, one_sided, ApproxError,
    ApproximationCertificate, OneSidedCertificate, PseudospectrumCertificate,
};
pub use contfrac::{expand, ContFracError, ContinuedFractionExpansion, RealNumberInput};
pub use matmodel::{build_operator, CMatrix, MatModelError, MatrixModel, OperatorSpec};
pub use pseudospectra::{compute_grid, GridParams, PointCloud, PseudospectrumError, PseudospectrumGrid, Region, Resolution};
pub use spectral::{EigenvalueSet, SpectralError};
