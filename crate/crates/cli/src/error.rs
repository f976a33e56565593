use std::io;
use std::path::Path;

use rotspec::approx::ApproxError;
use rotspec::pseudospectra::PseudospectrumError;
use rotspec::spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("certificate violation: {0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Violation(_) => 5,
        }
    }

    pub fn io(path: &Path, e: io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::ConvergenceFailure { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PseudospectrumError> for CliError {
    fn from(e: PseudospectrumError) -> Self {
        match e {
            PseudospectrumError::AtPoint { .. } | PseudospectrumError::Spectral(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ApproxError> for CliError {
    fn from(e: ApproxError) -> Self {
        match e {
            ApproxError::ModelsNotNormal { .. } => {
                CliError::Input(format!("{e}; run `rotspec pseudospectrum` for non-normal operators"))
            }
            ApproxError::BoundOrder { .. } => CliError::Violation(e.to_string()),
            ApproxError::Spectral(s) => s.into(),
            ApproxError::Pseudospectrum(p) => p.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}
