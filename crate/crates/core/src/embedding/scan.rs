//! Sampling-based injectivity and immersion certification for the
//! projective evaluation map.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::model::ModelSpace;
use crate::geometry::point::SpherePoint;
use crate::hardy::basis::{build_basis, MonomialBasis};
use crate::kernels::eval::eval_all_log;

use super::kodaira::{fs_distance, kodaira_map};

/// Orbit-distance bin edges for the stratified pair scan.
pub const SCAN_BINS: [(f64, f64); 4] = [(0.05, 0.15), (0.15, 0.3), (0.3, 0.6), (0.6, 2.0)];

#[derive(Debug, Clone, Serialize)]
pub struct BinReport {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub min_separation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub k: u64,
    pub pairs: usize,
    pub base_point_failures: usize,
    pub bins: Vec<BinReport>,
    pub pass: bool,
}

/// Draws pairs on distinct orbits stratified by orbit distance (the pair
/// stream depends only on the seed, so sweeps over `k` see identical
/// pairs) and reports the minimum Fubini-Study separation per bin. PASS
/// requires every bin separated and no base-point failures.
pub fn injectivity_scan(
    model: &ModelSpace,
    k: u64,
    n_pairs: usize,
    seed: u64,
) -> Result<ScanReport> {
    let p = model.stratification().p;
    if k == 0 || k % p != 0 {
        return Err(Error::InvalidConfig(format!(
            "scan degree must be a positive multiple of p = {p} (got {k})"
        )));
    }
    if n_pairs < 100 {
        return Err(Error::InvalidConfig("need at least 100 pairs".into()));
    }
    let basis = build_basis(model, k);
    let pairs = sample_stratified_pairs(model, n_pairs, seed);

    let mut bins: Vec<BinReport> = SCAN_BINS
        .iter()
        .map(|&(lo, hi)| BinReport {
            lo,
            hi,
            count: 0,
            min_separation: f64::INFINITY,
        })
        .collect();
    let mut base_point_failures = 0;
    let mut used = 0;
    for (x, y, d) in &pairs {
        let bin = bins
            .iter_mut()
            .find(|b| *d >= b.lo && *d < b.hi)
            .expect("pair sampler respects bin edges");
        let px = match kodaira_map(&basis, x) {
            Ok(p) => p,
            Err(Error::BasePoint { .. }) => {
                base_point_failures += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let py = match kodaira_map(&basis, y) {
            Ok(p) => p,
            Err(Error::BasePoint { .. }) => {
                base_point_failures += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let sep = fs_distance(&px, &py);
        bin.count += 1;
        bin.min_separation = bin.min_separation.min(sep);
        used += 1;
    }
    let pass = base_point_failures == 0
        && bins
            .iter()
            .all(|b| b.count > 0 && b.min_separation > 1e-9);
    Ok(ScanReport {
        k,
        pairs: used,
        base_point_failures,
        bins,
        pass,
    })
}

/// Seeded pair stream stratified over `SCAN_BINS`, aiming at equal quotas.
fn sample_stratified_pairs(
    model: &ModelSpace,
    n_pairs: usize,
    seed: u64,
) -> Vec<(SpherePoint, SpherePoint, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quota = n_pairs.div_ceil(SCAN_BINS.len());
    let mut counts = [0usize; SCAN_BINS.len()];
    let mut out = Vec::with_capacity(n_pairs);
    let mut draws = 0usize;
    let max_draws = 4000 * n_pairs;
    while out.len() < n_pairs && draws < max_draws {
        draws += 1;
        let x = SpherePoint::sample_uniform(model.n_coords(), &mut rng);
        // mix toward x with a random strength so small orbit distances
        // appear often enough to fill the near bins
        let dir = SpherePoint::sample_uniform(model.n_coords(), &mut rng);
        let s = {
            use rand::Rng;
            let u: f64 = rng.random();
            u * u * 1.2
        };
        let y = match SpherePoint::normalized(
            x.coords()
                .iter()
                .zip(dir.coords())
                .map(|(&a, &b)| a + s * b)
                .collect(),
        ) {
            Ok(y) => y,
            Err(_) => continue,
        };
        let d = model.orbit_distance(&x, &y);
        if let Some(idx) = SCAN_BINS.iter().position(|&(lo, hi)| d >= lo && d < hi) {
            if counts[idx] < quota {
                counts[idx] += 1;
                out.push((x, y, d));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ImmersionReport {
    /// Smallest singular value of the chart Jacobian along the contact
    /// directions.
    pub min_singular_value: f64,
    /// Norm of the Jacobian applied to the Reeb direction; the chart is
    /// orbit-invariant so this sits at finite-difference noise.
    pub reeb_column_norm: f64,
}

/// Numerical Jacobian of the affine chart of the evaluation map along a
/// real frame of the contact plane; the phase/Reeb direction is quotiented
/// by construction of the chart.
pub fn immersion_check(
    model: &ModelSpace,
    basis: &MonomialBasis,
    x: &SpherePoint,
) -> Result<ImmersionReport> {
    let strat = model.stratification();
    let ell = model.isotropy_order(x)?;
    if ell != strat.ell0 {
        return Err(Error::NotRegular {
            isotropy: ell,
            generic: strat.ell0,
        });
    }
    if basis.degree() % strat.p != 0 {
        return Err(Error::InvalidConfig(format!(
            "immersion check needs a degree multiple of p = {}",
            strat.p
        )));
    }
    let logs = eval_all_log(basis, x);
    let (pivot, pivot_ln) = logs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .map(|(i, &(ln, _))| (i, ln))
        .ok_or(Error::Degenerate("empty basis".into()))?;
    if pivot_ln == f64::NEG_INFINITY {
        return Err(Error::BasePoint { k: basis.degree() });
    }

    // chart ratios f_j/f_pivot are scale-invariant (equal homogeneity), so
    // ambient finite differences need no renormalization
    let chart = |z: &[Complex64]| -> Vec<Complex64> {
        let y = SpherePoint::normalized(z.to_vec()).expect("near-sphere point");
        let logs = eval_all_log(basis, &y);
        let (pln, pph) = logs[pivot];
        logs.iter()
            .enumerate()
            .filter(|&(j, _)| j != pivot)
            .map(|(_, &(ln, ph))| {
                if ln == f64::NEG_INFINITY {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar((ln - pln).exp(), ph - pph)
                }
            })
            .collect()
    };

    let h = 1e-5;
    let frame = model.contact_frame(x);
    let dim = basis.dim() - 1;
    let mut jac = nalgebra::DMatrix::<f64>::zeros(2 * dim, frame.len());
    for (col, w) in frame.iter().enumerate() {
        let shift = |s: f64| -> Vec<Complex64> {
            x.coords()
                .iter()
                .zip(w)
                .map(|(&z, &d)| z + s * d)
                .collect()
        };
        let plus = chart(&shift(h));
        let minus = chart(&shift(-h));
        for (row, (p, m)) in plus.iter().zip(&minus).enumerate() {
            let d = (p - m) / (2.0 * h);
            jac[(2 * row, col)] = d.re;
            jac[(2 * row + 1, col)] = d.im;
        }
    }
    let svd = jac.svd(false, false);
    let min_singular_value = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    // differentiating along the Reeb direction contributes nothing
    let reeb = model.reeb(x);
    let plus = chart(
        &x.coords()
            .iter()
            .zip(&reeb)
            .map(|(&z, &d)| z + h * d)
            .collect::<Vec<_>>(),
    );
    let minus = chart(
        &x.coords()
            .iter()
            .zip(&reeb)
            .map(|(&z, &d)| z - h * d)
            .collect::<Vec<_>>(),
    );
    let reeb_column_norm = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| ((p - m) / (2.0 * h)).norm_sqr())
        .sum::<f64>()
        .sqrt();

    Ok(ImmersionReport {
        min_singular_value,
        reeb_column_norm,
    })
}
