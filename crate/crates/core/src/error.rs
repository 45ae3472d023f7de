use crate::geometry::Vec3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point ({}, {}, {}) lies outside the domain", .0.x, .0.y, .0.z)]
    PointOutsideDomain(Vec3),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("velocity must be nonzero")]
    ZeroVelocity,

    #[error("invalid exponent {0}: p must lie in [1, inf]")]
    InvalidExponent(f64),

    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    #[error("fields live on different spatial grids")]
    GridMismatch,

    #[error("operands use different velocity quadratures")]
    QuadratureMismatch,

    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),

    #[error("power iteration start field is annihilated by the scattering operator")]
    DegenerateStart,
}
