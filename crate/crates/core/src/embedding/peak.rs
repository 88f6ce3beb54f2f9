//! Normalized kernel columns as peak sections: localized on the orbit of
//! the anchor point, unit L^2 norm by the reproducing property.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::model::ModelSpace;
use crate::geometry::point::SpherePoint;
use crate::hardy::basis::MonomialBasis;
use crate::kernels::eval::{szego_diag, szego_eval};

/// The section `u = P_k(., x0) / sqrt(P_k(x0, x0))`.
pub struct PeakSection<'a> {
    basis: &'a MonomialBasis,
    anchor: SpherePoint,
    peak_height: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupScan {
    pub max_abs: f64,
    pub orbit_distance_to_anchor: f64,
}

impl<'a> PeakSection<'a> {
    pub fn new(basis: &'a MonomialBasis, anchor: SpherePoint) -> Result<Self> {
        let diag = szego_diag(basis, &anchor);
        if diag <= 0.0 {
            return Err(Error::BasePoint { k: basis.degree() });
        }
        Ok(Self {
            basis,
            anchor,
            peak_height: diag.sqrt(),
        })
    }

    /// `|u(x0)| = sqrt(P_k(x0,x0))`.
    pub fn peak_height(&self) -> f64 {
        self.peak_height
    }

    pub fn eval(&self, y: &SpherePoint) -> Complex64 {
        szego_eval(self.basis, y, &self.anchor).value() / self.peak_height
    }

    /// Random scan for the sup of `|u|`; the maximizer sits on the anchor
    /// orbit, so the report carries its orbit distance to the anchor.
    pub fn sup_scan(&self, model: &ModelSpace, samples: usize, seed: u64) -> SupScan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = self.anchor.clone();
        let mut best_val = self.eval(&self.anchor).norm();
        for _ in 0..samples {
            let y = SpherePoint::sample_uniform(model.n_coords(), &mut rng);
            let v = self.eval(&y).norm();
            if v > best_val {
                best_val = v;
                best = y;
            }
        }
        SupScan {
            max_abs: best_val,
            orbit_distance_to_anchor: model.orbit_distance(&best, &self.anchor),
        }
    }

    /// Monte-Carlo `L^2(dV)` norm; equals one by the reproducing property.
    pub fn l2_norm(&self, model: &ModelSpace, samples: usize, seed: u64) -> f64 {
        let est = crate::geometry::quad::integrate_sphere_mc(
            model.n_coords(),
            samples,
            seed,
            |y: &SpherePoint| self.eval(y).norm_sqr() * model.scale_factor(y),
        );
        est.value.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::model::make_sphere;
    use crate::geometry::weights::WeightVector;
    use crate::hardy::basis::build_basis;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn round_peak_height_closed_form() {
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        let k = 24u64;
        let b = build_basis(&m, k);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let x0 = SpherePoint::sample_uniform(2, &mut rng);
        let u = PeakSection::new(&b, x0).unwrap();
        let expect = ((k as f64 + 1.0) / (2.0 * PI * PI)).sqrt();
        assert!((u.peak_height() - expect).abs() < 1e-12);
    }

    #[test]
    fn sup_sits_on_the_anchor_orbit() {
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        let b = build_basis(&m, 40);
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let x0 = SpherePoint::sample_uniform(2, &mut rng);
        let u = PeakSection::new(&b, x0.clone()).unwrap();
        let scan = u.sup_scan(&m, 3000, 73);
        // no random point beats the anchor value
        assert!(scan.max_abs <= u.peak_height() + 1e-12);
        assert!(scan.orbit_distance_to_anchor < 0.5);
    }

    #[test]
    fn decay_away_from_the_orbit_matches_kernel_decay" () {
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        let k = 30u64;
        let b = build_basis(&m, k);
        let x0 = SpherePoint::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let u = PeakSection::new(&b, x0).unwrap();
        // |u(y)| = sqrt(P(x0,x0)) |<x0,y>|^k for the round kernel
        let y = SpherePoint::new(vec![
            Complex64::new(0.95f64.sqrt(), 0.0),
            Complex64::new(0.05f64.sqrt(), 0.0),
        ])
        .unwrap();
        let got = u.eval(&y).norm();
        let expect = u.peak_height() * 0.95f64.powi(k as i32 / 2_i32 * 0 + k as i32).sqrt();
        let expect = u.peak_height() * 0.95f64.sqrt().powi(k as i32);
        assert!((got - expect).abs() < 1e-10 * expect.max(1e-12), "{got} vs {expect}");
        let _ = expect;
    }

    #[test]
    fn unit_l2_norm() {
        let m = make_sphere(WeightVector::new(vec![1, 2]).unwrap());
        let b = build_basis(&m, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let x0 = SpherePoint::sample_uniform(2, &mut rng);
        let u = PeakSection::new(&b, x0).unwrap();
        let norm = u.l2_norm(&m, 120_000, 75);
        assert!((norm - 1.0).abs() < 5e-3, "norm {norm}");
    }
}
