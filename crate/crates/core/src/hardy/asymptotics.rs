//! Dimension growth: Richardson-extrapolated limit of `dim_k/(kp)^n`
//! against the geometric prediction `(l_0/2) pi^{-n-1} int |det L| dV`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::model::ModelSpace;
use crate::geometry::quad::{geometric_integral, QuadratureSpec};
use crate::hardy::lattice::dim_table;

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    /// Richardson limit of `dim/(kp)^n` along degrees `kp`.
    pub limit: f64,
    /// `(l_0/2) pi^{-n-1} int |det L| dV`.
    pub geometric_rhs: f64,
    /// Standard error carried over from the integral estimate.
    pub rhs_std_error: f64,
    /// Per-complex-dimension convention ratio `(limit/rhs)^{1/n}`.
    pub kappa_hat: f64,
    /// Correction coefficients of the `1/k` expansion from the fit.
    pub c1: f64,
    pub c2: f64,
    /// Largest relative misfit of the extrapolation model on the data.
    pub fit_residual: f64,
    pub points_used: usize,
}

/// Fits `dim/(kp)^n = L + c1/(kp) + c2/(kp)^2` by least squares over the
/// top half of `k <= k_max` (along degrees `kp` the count is a polynomial,
/// so the model is exact there) and compares with the geometric integral.
pub fn dim_asymptotics(
    model: &ModelSpace,
    k_max: u64,
    quad: &QuadratureSpec,
) -> Result<AsymptoticsReport> {
    let n = model.cr_dim();
    let strat = model.stratification();
    let p = strat.p;
    if k_max < 8 {
        return Err(Error::InvalidConfig("k_max too small for extrapolation".into()));
    }
    let table = dim_table(model.weights(), k_max * p);
    let ks: Vec<u64> = (k_max / 2..=k_max).collect();
    let mut rows = Vec::with_capacity(ks.len());
    let mut rhs_vec = Vec::with_capacity(ks.len());
    for &k in &ks {
        let degree = (k * p) as f64;
        let dim = table[(k * p) as usize] as f64;
        if dim == 0.0 {
            return Err(Error::Degenerate(format!(
                "dimension vanishes at degree {}",
                k * p
            )));
        }
        rows.push([1.0, 1.0 / degree, 1.0 / (degree * degree)]);
        rhs_vec.push(dim / degree.powi(n as i32));
    }

    let m = nalgebra::DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
    let y = nalgebra::DVector::from_vec(rhs_vec.clone());
    let svd = m.clone().svd(true, true);
    let sol = svd
        .solve(&y, 1e-14)
        .map_err(|e| Error::Degenerate(format!("extrapolation solve failed: {e}")))?;
    let (limit, c1, c2) = (sol[0], sol[1], sol[2]);

    let fit_residual = rows
        .iter()
        .zip(&rhs_vec)
        .map(|(row, &v)| {
            let fit = sol[0] * row[0] + sol[1] * row[1] + sol[2] * row[2];
            ((fit - v) / v).abs()
        })
        .fold(0.0, f64::max);

    let integral = geometric_integral(model, quad)?;
    let pi = std::f64::consts::PI;
    let prefactor = strat.ell0 as f64 / 2.0 * pi.powi(-(n as i32) - 1);
    let geometric_rhs = prefactor * integral.value;
    let kappa_hat = (limit / geometric_rhs).powf(1.0 / n as f64);

    Ok(AsymptoticsReport {
        limit,
        geometric_rhs,
        rhs_std_error: prefactor * integral.std_error,
        kappa_hat,
        c1,
        c2,
        fit_residual,
        points_used: ks.len(),
    })
}
