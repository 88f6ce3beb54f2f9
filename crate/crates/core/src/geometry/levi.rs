//! Levi form data at a point: eigenvalues, determinant and volume density.
//!
//! Conventions: the Hermitian metric is Euclidean on `T^{1,0}X`, the Reeb
//! field is unit and orthogonal to the contact plane, and the Levi form is
//! `L(U, conj(V)) = -(1/2i) d w_0(U, conj(V))`. For this family every
//! eigenvalue equals `f/2` with `f = 1/S_a(z)`, and the metric volume form
//! is `dV_X = f dsigma` (the Euclidean unit normal to `HX` inside `TX` is
//! the round Reeb `iz`, and `<R, iz> = S_a`).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::model::ModelSpace;
use crate::geometry::point::SpherePoint;

#[derive(Debug, Clone, Serialize)]
pub struct LeviData {
    /// Contact scaling `f = 1/S_a(z)`.
    pub f: f64,
    /// Levi eigenvalues with respect to the declared metric; all positive.
    pub levi_eigenvalues: Vec<f64>,
    /// Product of the eigenvalues.
    pub det_levi: f64,
    /// Density of `dV_X` against the Euclidean surface measure.
    pub vol_density: f64,
}

/// Closed-form Levi data: each eigenvalue `f/2`, determinant `(f/2)^n`,
/// volume density `f`.
pub fn levi_data(model: &ModelSpace, x: &SpherePoint) -> Result<LeviData> {
    model.isotropy_order(x)?; // validates the point has support
    let n = model.cr_dim();
    let f = model.scale_factor(x);
    let eig = vec![f / 2.0; n];
    let det_levi = eig.iter().product();
    Ok(LeviData {
        f,
        levi_eigenvalues: eig,
        det_levi,
        vol_density: f,
    })
}

/// Independent evaluation path: assembles the Levi matrix
/// `L_ij = -(1/2i) d w_0(U_i, conj(U_j))` on a frame of `T^{1,0}X` with
/// `d w_0` by finite differences, and diagonalizes it.
pub fn levi_data_fd(model: &ModelSpace, x: &SpherePoint) -> Result<LeviData> {
    model.isotropy_order(x)?;
    let n = model.cr_dim();
    let z = x.coords();
    let frame = model.holomorphic_frame(x);
    let h = 1e-5;

    // d w_0 is real-bilinear; recover the complex contraction
    // d w_0(U_i, conj(U_j)) from four real evaluations.
    let mut levi = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for (i, u) in frame.iter().enumerate() {
        for (j, v) in frame.iter().enumerate() {
            let d = d_omega0_1_0_by_0_1(model, z, u, v, h);
            levi[(i, j)] = -d / (2.0 * Complex64::i());
        }
    }

    // Hermitian up to FD error; eigenvalues via the real symmetric
    // embedding [[Re, -Im], [Im, Re]] (each eigenvalue doubled).
    let mut embed = nalgebra::DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (levi[(i, j)].re + levi[(j, i)].re);
            let im = 0.5 * (levi[(i, j)].im - levi[(j, i)].im);
            embed[(i, j)] = re;
            embed[(n + i, n + j)] = re;
            embed[(n + i, j)] = im;
            embed[(i, n + j)] = -im;
        }
    }
    let mut eig: Vec<f64> = embed.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eigenvalues: Vec<f64> = eig.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect();

    let det_levi = eigenvalues.iter().product();
    Ok(LeviData {
        f: model.scale_factor(x),
        levi_eigenvalues: eigenvalues,
        det_levi,
        vol_density: model.scale_factor(x),
    })
}

/// `d w_0(U, conj(V))` for holomorphic frame vectors `U, V`, from the
/// finite-difference real 2-form. With `w_U` the real vector whose slot-j
/// complex coordinate is `U_j` (and `J` multiplication by `i`), one has
/// `U = (w_U - i J w_U)/2` and `conj(V) = (w_V + i J w_V)/2`, so the
/// complex contraction expands into four real evaluations.
fn d_omega0_1_0_by_0_1(
    model: &ModelSpace,
    z: &[Complex64],
    u: &[Complex64],
    v: &[Complex64],
    h: f64,
) -> Complex64 {
    let j = |w: &[Complex64]| -> Vec<Complex64> { w.iter().map(|&c| Complex64::i() * c).collect() };
    let ju = j(u);
    let jv = j(v);
    let d = |a: &[Complex64], b: &[Complex64]| model.d_omega0_fd(z, a, b, h);
    let ww = d(u, v);
    let wj = d(u, &jv);
    let jw = d(&ju, v);
    let jj = d(&ju, &jv);
    0.25 * Complex64::new(ww + jj, wj - jw)
}
