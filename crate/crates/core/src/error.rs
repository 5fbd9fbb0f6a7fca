use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("monodromy is degenerate (rotation angle {rho:e}); the periodic axis is undefined")]
    DegenerateMonodromy { rho: f64 },

    #[error("orbit passes within {gap:e} of the south pole")]
    SouthPole { gap: f64 },

    #[error("resonant drive: leading minor vanishes ({phi1:e}); use the phi1 normalization")]
    Resonant { phi1: f64 },

    #[error("small denominator in harmonic {harmonic}: (m omega)^2 - omega0^2 = {value:e}")]
    SmallDenominator { harmonic: usize, value: f64 },

    #[error("no bracket for resonance n = {n} at F = {f}; try truncation N >= {suggested_n}")]
    BracketNotFound { n: usize, f: f64, suggested_n: usize },

    #[error("truncation unstable: {0}")]
    Unstable(String),

    #[error("quadrature did not converge: last change {change:e}")]
    Quadrature { change: f64 },

    #[error("numerical overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by parameters that leave the mathematical domain
    /// of a routine (as opposed to usage errors).
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_))
    }
}
