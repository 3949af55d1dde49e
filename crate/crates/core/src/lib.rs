//! Loss-of-derivatives analysis for Fourier multipliers on the torus.

pub mod analysis;
pub mod arith;
pub mod diophantine;
pub mod error;
pub mod exact;
pub mod fixed;
pub mod lattice;
pub mod real;
pub mod report;
pub mod scan;
pub mod spectral;
pub mod symbol;

pub use error::{Error, Result};
