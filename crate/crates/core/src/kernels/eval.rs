//! Pointwise evaluation of the degree-`k` reproducing kernel
//! `P_k(x, y) = sum_alpha f_alpha(x) conj(f_alpha(y))`.
//!
//! Sums run in log space per monomial so degrees around `k ~ 2000` neither
//! overflow nor underflow before the final combination.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::model::ModelSpace;
use crate::geometry::point::SpherePoint;
use crate::geometry::quad::{product_nodes_for, QuadMethod, QuadratureSpec};
use crate::hardy::basis::{build_basis, MonomialBasis};

/// Cached per-coordinate log-moduli and phases of a point.
pub struct PointData {
    ln_abs: Vec<f64>,
    arg: Vec<f64>,
}

impl PointData {
    pub fn new(x: &SpherePoint) -> Self {
        let ln_abs = x
            .coords()
            .iter()
            .map(|c| {
                let r = c.norm();
                if r == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    r.ln()
                }
            })
            .collect();
        let arg = x.coords().iter().map(|c| c.arg()).collect();
        PointData { ln_abs, arg }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelValue {
    pub k: u64,
    pub value_re: f64,
    pub value_im: f64,
}

impl KernelValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

/// `P_k(x, y)`, exact up to floating point.
pub fn szego_eval(basis: &MonomialBasis, x: &SpherePoint, y: &SpherePoint) -> KernelValue {
    let (ln_mag, phase_sum) = szego_eval_log(basis, x, y);
    let value = if ln_mag == f64::NEG_INFINITY {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::from_polar(ln_mag.exp(), phase_sum)
    };
    KernelValue {
        k: basis.degree(),
        value_re: value.re,
        value_im: value.im,
    }
}

/// Log-magnitude and phase of `P_k(x, y)`; the log form stays finite far
/// into the off-diagonal decay where the plain value underflows.
pub fn szego_eval_log(basis: &MonomialBasis, x: &SpherePoint, y: &SpherePoint) -> (f64, f64) {
    let px = PointData::new(x);
    let py = PointData::new(y);
    szego_eval_log_cached(basis, &px, &py)
}

pub fn szego_eval_log_cached(basis: &MonomialBasis, px: &PointData, py: &PointData) -> (f64, f64) {
    let dim = basis.dim();
    if dim == 0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let mut ln_terms = Vec::with_capacity(dim);
    let mut phases = Vec::with_capacity(dim);
    let mut max_ln = f64::NEG_INFINITY;
    for (alpha, &ln_norm_sq) in basis.exponents().iter().zip(basis.ln_norm_sq()) {
        let mut ln = -ln_norm_sq;
        let mut phase = 0.0;
        for (j, &e) in alpha.alpha.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let lx = px.ln_abs[j];
            let ly = py.ln_abs[j];
            if lx == f64::NEG_INFINITY || ly == f64::NEG_INFINITY {
                ln = f64::NEG_INFINITY;
                break;
            }
            ln += e as f64 * (lx + ly);
            phase += e as f64 * (px.arg[j] - py.arg[j]);
        }
        if ln > max_ln {
            max_ln = ln;
        }
        ln_terms.push(ln);
        phases.push(phase);
    }
    if max_ln == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (&ln, &phase) in ln_terms.iter().zip(&phases) {
        if ln == f64::NEG_INFINITY {
            continue;
        }
        acc += Complex64::from_polar((ln - max_ln).exp(), phase);
    }
    if acc.norm() == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    (max_ln + acc.norm().ln(), acc.arg())
}

/// Log-magnitude and phase of every orthonormal section at a point;
/// `NEG_INFINITY` marks exact zeros.
pub fn eval_all_log(basis: &MonomialBasis, x: &SpherePoint) -> Vec<(f64, f64)> {
    let px = PointData::new(x);
    basis
        .exponents()
        .iter()
        .zip(basis.ln_norm_sq())
        .map(|(alpha, &ln_norm_sq)| {
            let mut ln = -0.5 * ln_norm_sq;
            let mut phase = 0.0;
            for (j, &e) in alpha.alpha.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if px.ln_abs[j] == f64::NEG_INFINITY {
                    return (f64::NEG_INFINITY, 0.0);
                }
                ln += e as f64 * px.ln_abs[j];
                phase += e as f64 * px.arg[j];
            }
            (ln, phase)
        })
        .collect()
}

/// Diagonal value `P_k(x, x)`: nonnegative real by construction.
pub fn szego_diag(basis: &MonomialBasis, x: &SpherePoint) -> f64 {
    let px = PointData::new(x);
    let mut max_ln = f64::NEG_INFINITY;
    let mut ln_terms = Vec::with_capacity(basis.dim());
    for (alpha, &ln_norm_sq) in basis.exponents().iter().zip(basis.ln_norm_sq()) {
        let mut ln = -ln_norm_sq;
        for (j, &e) in alpha.alpha.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if px.ln_abs[j] == f64::NEG_INFINITY {
                ln = f64::NEG_INFINITY;
                break;
            }
            ln += 2.0 * e as f64 * px.ln_abs[j];
        }
        if ln > max_ln {
            max_ln = ln;
        }
        ln_terms.push(ln);
    }
    if max_ln == f64::NEG_INFINITY {
        return 0.0;
    }
    let sum: f64 = ln_terms
        .iter()
        .filter(|&&ln| ln != f64::NEG_INFINITY)
        .map(|&ln| (ln - max_ln).exp())
        .sum();
    max_ln.exp() * sum
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalSeries {
    /// Isotropy order of the base point.
    pub stratum: u64,
    pub entries: Vec<(u64, f64)>,
}

/// Tabulates `P_k(x, x)` over a degree list.
pub fn diagonal_series(model: &ModelSpace, x: &SpherePoint, k_list: &[u64]) -> Result<DiagonalSeries> {
    if k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("degree list must be increasing".into()));
    }
    let stratum = model.isotropy_order(x)?;
    let entries = k_list
        .iter()
        .map(|&k| {
            let basis = build_basis(model, k);
            (k, szego_diag(&basis, x))
        })
        .collect();
    Ok(DiagonalSeries { stratum, entries })
}

/// `max_alpha | int P_k(x, y) f_alpha(y) dV(y) - f_alpha(x) |`: the
/// reproducing property of the kernel against the metric volume.
pub fn reproducing_check(
    model: &ModelSpace,
    basis: &MonomialBasis,
    x: &SpherePoint,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let dim = basis.dim();
    if dim == 0 {
        return Err(Error::Degenerate("empty basis".into()));
    }
    let vx = basis.eval_all(x);
    // accumulate v_alpha := int P(x,y) f_alpha(y) dV(y) for all alpha
    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    match quad.method {
        QuadMethod::Product1d => {
            if model.cr_dim() != 1 {
                return Err(Error::InvalidConfig(
                    "product rule quadrature is only defined for n = 1".into(),
                ));
            }
            let (t_nodes, phase_nodes) = product_nodes_for(quad.samples, basis.degree());
            let (ts, ws) = crate::geometry::quad::gauss_legendre_01(t_nodes);
            let tau = std::f64::consts::TAU;
            let cell = 0.5 * (tau / phase_nodes as f64).powi(2);
            for (&t, &wt) in ts.iter().zip(&ws) {
                let r1 = (1.0 - t).sqrt();
                let r2 = t.sqrt();
                for i1 in 0..phase_nodes {
                    let p1 = tau * (i1 as f64 + 0.5) / phase_nodes as f64;
                    for i2 in 0..phase_nodes {
                        let p2 = tau * (i2 as f64 + 0.5) / phase_nodes as f64;
                        let y = SpherePoint::normalized(vec![
                            Complex64::from_polar(r1, p1),
                            Complex64::from_polar(r2, p2),
                        ])
                        .expect("nonzero");
                        let w = wt * cell * model.scale_factor(&y);
                        add_sample(&vx, basis, &y, w, &mut acc);
                    }
                }
            }
        }
        QuadMethod::MonteCarlo => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(quad.seed);
            let vol = crate::geometry::quad::sphere_volume(model.cr_dim());
            let w0 = vol / quad.samples as f64;
            for _ in 0..quad.samples {
                let y = SpherePoint::sample_uniform(model.n_coords(), &mut rng);
                let w = w0 * model.scale_factor(&y);
                add_sample(&vx, basis, &y, w, &mut acc);
            }
        }
    }
    let worst = acc
        .iter()
        .zip(&vx)
        .map(|(got, want)| (got - want).norm())
        .fold(0.0, f64::max);
    Ok(worst)
}

fn add_sample(
    vx: &[Complex64],
    basis: &MonomialBasis,
    y: &SpherePoint,
    w: f64,
    acc: &mut [Complex64],
) {
    let vy = basis.eval_all(y);
    let kernel: Complex64 = vx.iter().zip(&vy).map(|(&a, &b)| a * b.conj()).sum();
    for (a, &fy) in acc.iter_mut().zip(&vy) {
        *a += w * kernel * fy;
    }
}
