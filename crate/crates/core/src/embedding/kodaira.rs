//! Evaluation map into projective space from an orthonormal basis of
//! sections, and the Fubini-Study distance between image points.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::point::SpherePoint;
use crate::hardy::basis::MonomialBasis;
use crate::kernels::eval::eval_all_log;

/// A point of `CP^{d-1}` stored as a unit-norm homogeneous vector.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectivePoint {
    pub homogeneous: Vec<Complex64>,
}

impl ProjectivePoint {
    pub fn new(v: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPoint(format!(
                "projective representative has |v|^2 = {norm_sq}"
            )));
        }
        Ok(Self { homogeneous: v })
    }

    pub fn dim(&self) -> usize {
        self.homogeneous.len()
    }
}

/// Evaluates the orthonormal sections at `x` and normalizes. Exponent
/// shifts keep the normalized vector meaningful at degrees where the raw
/// section values underflow. Returns a base-point error when every
/// section vanishes.
pub fn kodaira_map(basis: &MonomialBasis, x: &SpherePoint) -> Result<ProjectivePoint> {
    if basis.dim() < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 sections for a projective image (dim = {})",
            basis.dim()
        )));
    }
    let logs = eval_all_log(basis, x);
    let max_ln = logs
        .iter()
        .map(|&(ln, _)| ln)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_ln == f64::NEG_INFINITY {
        return Err(Error::BasePoint { k: basis.degree() });
    }
    let mut v: Vec<Complex64> = logs
        .iter()
        .map(|&(ln, phase)| {
            if ln == f64::NEG_INFINITY {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar((ln - max_ln).exp(), phase)
            }
        })
        .collect();
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in v.iter_mut() {
        *c /= norm;
    }
    ProjectivePoint::new(v)
}

/// Fubini-Study distance `arccos |<p, q>|`, in `[0, pi/2]`.
pub fn fs_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> f64 {
    let overlap: Complex64 = p
        .homogeneous
        .iter()
        .zip(&q.homogeneous)
        .map(|(&a, &b)| a * b.conj())
        .sum();
    overlap.norm().min(1.0).acos()
}
