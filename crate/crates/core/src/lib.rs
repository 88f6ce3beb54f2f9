//! Numerical laboratory for Fourier components of projection kernels on
//! weighted CR spheres: exact section spaces, kernel asymptotics, cyclic
//! quotient averaging, projective embedding scans and circle reductions,
//! with a machine-readable acceptance battery.

pub mod error;
pub mod geometry;
pub mod hardy;
pub mod kernels;

pub use error::{Error, Result};
