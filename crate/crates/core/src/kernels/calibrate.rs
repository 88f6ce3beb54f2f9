//! The single convention constant between the implemented metric stack and
//! the stated leading-coefficient formula, fixed once on round spheres and
//! required to be universal afterwards.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::levi::levi_data;
use crate::geometry::model::{make_sphere, ModelSpace};
use crate::geometry::point::SpherePoint;
use crate::geometry::weights::WeightVector;
use crate::kernels::eval::diagonal_series;
use crate::kernels::fits::fit_leading;

/// Calibrated convention constant, applied per complex dimension.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Calibration {
    pub kappa: f64,
    /// Disjoint-range consistency: relative spread between the two fits.
    pub range_spread: f64,
}

/// Calibrates on a round model `S^{2n+1}`: fits the diagonal over two
/// disjoint degree ranges, checks they agree within 1%, and requires the
/// resulting kappa to be a simple rational (quarter-integer within 0.02).
pub fn calibrate(round: &ModelSpace) -> Result<Calibration> {
    if !round.weights().is_round() {
        return Err(Error::InvalidConfig(
            "calibration requires the round weight vector (1,...,1)".into(),
        ));
    }
    let n = round.cr_dim();
    // base point is irrelevant on the round sphere (diagonal is constant)
    let mut coords = vec![num_complex::Complex64::new(0.0, 0.0); round.n_coords()];
    coords[0] = num_complex::Complex64::new(1.0, 0.0);
    let x = SpherePoint::new(coords)?;
    let levi = levi_data(round, &x)?;

    let fit_range = |ks: Vec<u64>| -> Result<f64> {
        let series = diagonal_series(round, &x, &ks)?;
        let fit = fit_leading(&series, &levi, n)?;
        Ok((fit.kappa_raw / 1.0).powf(1.0 / n as f64))
    };
    let lo: Vec<u64> = (1..=8u64).map(|i| 10 * i).collect();
    let hi: Vec<u64> = (1..=8u64).map(|i| 120 + 10 * i).collect();
    let kappa_lo = fit_range(lo)?;
    let kappa_hi = fit_range(hi)?;
    let range_spread = (kappa_lo - kappa_hi).abs() / kappa_hi;
    if range_spread > 0.01 {
        return Err(Error::QuadratureDivergence(format!(
            "calibration ranges disagree by {range_spread:.3e}"
        )));
    }
    let kappa = 0.5 * (kappa_lo + kappa_hi);
    let nearest_quarter = (kappa * 4.0).round() / 4.0;
    if (kappa - nearest_quarter).abs() > 0.02 {
        return Err(Error::CalibrationFailure { kappa });
    }
    Ok(Calibration {
        kappa,
        range_spread,
    })
}

/// Calibration for the round sphere of complex dimension `n`.
pub fn calibrate_dim(n: usize) -> Result<Calibration> {
    let round = make_sphere(WeightVector::new(vec![1; n + 1])?);
    calibrate(&round)
}
