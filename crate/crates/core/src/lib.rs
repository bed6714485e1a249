//! Hilbert-Schmidt volumes of generalized Pauli channels built from
//! mutually unbiased bases.
//!
//! Volumes are computed exactly by iterated integration over chambers of
//! ordered eigenvalues, with a seeded Monte Carlo estimator as an
//! independent check.

pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod mub;
pub mod rational;
pub mod regions;
pub mod volume;

pub use error::{Error, Result};
pub use geometry::{Dims, SurdValue};
pub use rational::Rational;
