use std::path::PathBuf;

use thiserror::Error;

use crate::scenario::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: must satisfy {bound}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("amplitude norm {norm} exceeds 1 (single-excitation sector is over-populated)")]
    AmplitudeNorm { norm: f64 },

    #[error("matrix is not Hermitian: max |m - m^H| = {defect:e}")]
    NotHermitian { defect: f64 },

    #[error("degenerate normalization {value:e} ({context})")]
    DegenerateNormalization { value: f64, context: &'static str },

    #[error("integration step dt = {dt} exceeds the bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("non-finite value in oracle integration at t = {t}")]
    NonFinite { t: f64 },

    #[error("oracle deviation {deviation:e} exceeds {tolerance:e} for curve `{curve}` at t = {t}")]
    OracleMismatch {
        curve: String,
        t: f64,
        deviation: f64,
        tolerance: f64,
    },

    #[error("curve `{curve}` at t = {t}: {source}")]
    AtPoint {
        curve: String,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("table is empty")]
    EmptyTable,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at_point(self, curve: &str, t: f64) -> Self {
        Error::AtPoint {
            curve: curve.to_owned(),
            t,
            source: Box::new(self),
        }
    }
}
