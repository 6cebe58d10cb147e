//! Bump functions, line densities and the regularized source `sigma_rho`.

pub mod bump;
pub mod density;
pub mod source;

pub use bump::{bump_eval, bump_normalization, bump_radial, scaled_bump_deriv, scaled_bump_eval};
pub use density::{CubicSpline, LineDensity};
pub use source::{RegularizedSource, SigmaNormRegion, SourceMode};
