//! Numerical toolkit for the Poisson problem with a source concentrated on a
//! curve: mollified line sources, potential-theoretic evaluation of the
//! regularized solution, weighted norms over tubular region decompositions,
//! weight-inequality checkers and Whitney/Assouad machinery, with a sweep
//! harness on top.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod inequalities;
pub mod mollifier;
pub mod potential;
pub mod quad;
pub mod weighted_norms;
pub mod whitney;

pub use error::{Error, Result};
