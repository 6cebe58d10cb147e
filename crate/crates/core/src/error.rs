//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arc parameter {s} outside [0, {len}]")]
    ArcParameterOutOfRange { s: f64, len: f64 },

    #[error("point at distance {r} from the curve is outside the tubular radius {r0}")]
    TubularCoordsInvalid { r: f64, r0: f64 },

    #[error("evaluation point coincides with the kernel singularity")]
    SingularEvaluation,

    #[error("derivative order {requested} exceeds supported order {supported}")]
    UnsupportedOrder { requested: usize, supported: usize },

    #[error("tangential derivative order {requested} exceeds density smoothness {smoothness}")]
    SmoothnessExceeded { requested: usize, smoothness: usize },

    #[error("non-integrable weight: violated condition {condition}")]
    NonIntegrableWeight { condition: String },

    #[error("quadrature refinement disagreement {disagreement:.3e} above tolerance {tol:.3e} (value {value:.6e}, refined {refined:.6e})")]
    QuadratureDisagreement { value: f64, refined: f64, disagreement: f64, tol: f64 },

    #[error("weight assumption violated: {0}")]
    WeightAssumption(String),

    #[error("source support is not contained in the domain: {0}")]
    SupportOutsideDomain(String),

    #[error("sample resolution {resolution} coarser than requested covering radius {r}")]
    ResolutionTooCoarse { resolution: f64, r: f64 },

    #[error("invalid curve data: {0}")]
    InvalidCurve(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
