use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state norm is {norm:.3e}, expected 1 within {tol:.1e}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("z grid must be strictly increasing and start at the state position")]
    BadZGrid,

    #[error("zero-power field")]
    ZeroPower,

    #[error("no bound mode for contrast {dn:.3e}")]
    NoBoundMode { dn: f64 },

    #[error("supermode splitting at d = {d} um is below solver resolution")]
    SplittingBelowResolution { d: f64 },

    #[error("coupling fit needs at least {need} samples spanning d_ref, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("non-positive coupling sample at d = {d} um")]
    NonPositiveCoupling { d: f64 },

    #[error("target {what} = {value:.4e} outside the usable design range")]
    TargetOutsideRange { what: &'static str, value: f64 },

    #[error("spacing {d:.3} um would overlap channels (minimum {min:.3} um)")]
    ChannelOverlap { d: f64, min: f64 },

    #[error("invalid site {site} for an array of {sites} waveguides")]
    InvalidSite { site: usize, sites: usize },

    #[error("grid violates {0}")]
    GridInvariant(String),

    #[error("field became non-finite at z = {z_um} um")]
    NonFiniteField { z_um: f64 },

    #[error("design failed: {0}")]
    DesignFailure(String),
}
