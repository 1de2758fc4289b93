use num_complex::Complex64;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("Riccati denominator vanished (|den| = {magnitude:e})")]
    DegenerateDenominator { magnitude: f64 },

    #[error("characteristic function is not finite at u = ({}, {})", u[0], u[1])]
    NonFinite { u: [Complex64; 2] },

    #[error("characteristic function is not finite at grid node k = ({}, {}), u = ({}, {})", k[0], k[1], u[0], u[1])]
    GridNonFinite { k: [usize; 2], u: [Complex64; 2] },

    #[error("log-gamma pole at z = {z}")]
    Pole { z: Complex64 },

    #[error("damping eps = ({}, {}) violates eps2 > 0 and eps1 + eps2 < -1", eps[0], eps[1])]
    DampingViolation { eps: [f64; 2] },

    #[error("no grid index in [0, {n}) places log-moneyness {x0} on the lattice with u_bar >= {u_min}")]
    NoFeasibleStep { n: usize, x0: f64, u_min: f64 },

    #[error("invalid grid configuration: {0}")]
    InvalidGrid(&'static str),

    #[error("negative price {price}")]
    NegativePrice { price: f64 },

    #[error("imaginary residue {imag:e} is too large for price {price}")]
    ImaginaryResidue { price: f64, imag: f64 },

    #[error("invalid contract: {0}")]
    InvalidContract(&'static str),

    #[error("invalid market state: {0}")]
    InvalidMarket(&'static str),

    #[error("model failed validation: {0}")]
    InvalidModel(ValidationReport),

    #[error("matrix is not positive semi-definite (pivot {pivot:e} at row {row})")]
    NotPsd { row: usize, pivot: f64 },

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidMcConfig(&'static str),
}

impl Error {
    /// Short stable tag, used for in-cell error markers in sweep output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::NonFinite { .. } | Error::GridNonFinite { .. } => "NonFinite",
            Error::Pole { .. } => "Pole",
            Error::DampingViolation { .. } => "DampingViolation",
            Error::NoFeasibleStep { .. } => "NoFeasibleStep",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::NegativePrice { .. } => "NegativePrice",
            Error::ImaginaryResidue { .. } => "ImaginaryResidue",
            Error::InvalidContract(_) => "InvalidContract",
            Error::InvalidMarket(_) => "InvalidMarket",
            Error::InvalidModel(_) => "InvalidModel",
            Error::NotPsd { .. } => "NotPsd",
            Error::InvalidMcConfig(_) => "InvalidMcConfig",
        }
    }
}
