use std::path::PathBuf;

use thiserror::Error;

use crate::dimer::DimerError;
use crate::fock::FockError;
use crate::params::ParamError;
use crate::spectra::SpectraError;
use crate::statistics::StatisticsError;

/// Top-level error aggregating every module.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Statistics(#[from] StatisticsError),
    #[error(transparent)]
    Dimer(#[from] DimerError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("non-finite value in column `{column}` at row {row}")]
    NonFinite { column: String, row: usize },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    /// True for bad user input as opposed to numerical or I/O failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Param(_) | Error::Config(_) => true,
            Error::Statistics(_) => true,
            Error::Dimer(e) => matches!(e, DimerError::InvalidBracket { .. } | DimerError::Statistics(_)),
            Error::Fock(e) => fock_validation(e),
            Error::Spectra(e) => match e {
                SpectraError::Fock(f) => fock_validation(f),
                SpectraError::Dimer(DimerError::Statistics(_)) => true,
                SpectraError::CutoffTooSmall(_)
                | SpectraError::NonPositiveGamma(_)
                | SpectraError::InvalidAxis { .. }
                | SpectraError::AxisMismatch => true,
                _ => false,
            },
            _ => false,
        }
    }
}

fn fock_validation(e: &FockError) -> bool {
    matches!(
        e,
        FockError::CutoffTooSmall { .. }
            | FockError::NegativeTime(_)
            | FockError::Statistics(_)
            | FockError::Dimer(DimerError::Statistics(_))
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let e: Error = ParamError::NotFinite { name: "xi" }.into();
        assert!(e.is_validation());
        let e: Error = SpectraError::CutoffTooSmall(1).into();
        assert!(e.is_validation());
        let e: Error = FockError::Singular { omega: 1.0, sign: 1, condition: 1e20 }.into();
        assert!(!e.is_validation());
        let e = Error::Io { path: "x".into(), source: std::io::Error::other("boom") };
        assert!(!e.is_validation());
        assert!(e.to_string().starts_with("x: "));
    }
}
