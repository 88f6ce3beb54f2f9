//! Points of the unit sphere in `C^{n+1}`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A point of `X = S^{2n+1}`, stored as `n+1` complex coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    z: Vec<Complex64>,
}

impl SpherePoint {
    /// Accepts a vector already on the unit sphere (within `1e-12`).
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.len() < 2 {
            return Err(Error::InvalidPoint("need at least 2 coordinates".into()));
        }
        let norm_sq: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidPoint(format!(
                "|z|^2 = {norm_sq} is not 1 within {UNIT_NORM_TOL:e}"
            )));
        }
        Ok(Self { z })
    }

    /// Projects an arbitrary nonzero vector onto the sphere.
    pub fn normalized(z: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidPoint("cannot normalize zero vector".into()));
        }
        Ok(Self {
            z: z.into_iter().map(|c| c / norm).collect(),
        })
    }

    pub fn from_reals(parts: &[f64]) -> Result<Self> {
        if parts.len() % 2 != 0 {
            return Err(Error::InvalidPoint("odd number of real parts".into()));
        }
        Self::normalized(
            parts
                .chunks(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        )
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, j: usize) -> Complex64 {
        self.z[j]
    }

    /// Squared moduli `t_j = |z_j|^2`.
    pub fn moduli_sq(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Uniform sample via normalized complex Gaussian coordinates.
    pub fn sample_uniform(n_coords: usize, rng: &mut ChaCha8Rng) -> Self {
        loop {
            let z: Vec<Complex64> = (0..n_coords)
                .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
                .collect();
            let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                return Self {
                    z: z.into_iter().map(|c| c / norm).collect(),
                };
            }
        }
    }
}

/// Standard normal via Box-Muller; two uniforms per call keeps the stream
/// layout independent of how many samples each shard draws.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
