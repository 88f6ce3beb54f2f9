//! Group-averaged kernels for finite cyclic actions commuting with the
//! circle action: the normalized double sum, the single sum, and the
//! invariant-subspace kernel must all coincide.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::point::SpherePoint;
use crate::hardy::basis::{MonomialBasis, SymmetryConstraint};
use crate::kernels::eval::szego_eval;

#[derive(Debug, Clone, Serialize)]
pub struct AveragedKernel {
    /// `(1/m) sum_{g,h} P_k(h.x, g.y)`
    pub double_avg_re: f64,
    pub double_avg_im: f64,
    /// `sum_g P_k(x, g.y)`
    pub single_avg_re: f64,
    pub single_avg_im: f64,
    /// `m * P^inv_k(x, y)` from the invariant sub-basis
    pub invariant_re: f64,
    pub invariant_im: f64,
    /// Largest pairwise deviation of the three routes.
    pub max_deviation: f64,
}

impl AveragedKernel {
    pub fn double_avg(&self) -> Complex64 {
        Complex64::new(self.double_avg_re, self.double_avg_im)
    }
    pub fn single_avg(&self) -> Complex64 {
        Complex64::new(self.single_avg_re, self.single_avg_im)
    }
    pub fn invariant(&self) -> Complex64 {
        Complex64::new(self.invariant_re, self.invariant_im)
    }
}

/// Applies the `r`-th power of the `Z_m` generator `z_j -> e^{2 pi i w_j/m} z_j`.
pub fn cyclic_act(x: &SpherePoint, action_weights: &[i64], m: u64, r: u64) -> SpherePoint {
    let tau = std::f64::consts::TAU;
    let z = x
        .coords()
        .iter()
        .zip(action_weights)
        .map(|(&zj, &wj)| zj * Complex64::from_polar(1.0, tau * (wj * r as i64) as f64 / m as f64))
        .collect();
    SpherePoint::new(z).expect("phase rotation preserves the unit norm")
}

/// Computes the three equivalent quotient-kernel expressions and their
/// worst pairwise deviation. Any diagonal cyclic action commutes with the
/// diagonal circle action; malformed weights are rejected.
pub fn averaged_kernel(
    basis: &MonomialBasis,
    m: u64,
    action_weights: &[i64],
    x: &SpherePoint,
    y: &SpherePoint,
) -> Result<AveragedKernel> {
    if m == 0 {
        return Err(Error::InvalidConfig("cyclic order must be positive".into()));
    }
    if action_weights.len() != x.len() {
        return Err(Error::InvalidConfig(format!(
            "action weight count {} does not match coordinate count {}",
            action_weights.len(),
            x.len()
        )));
    }

    let mut double_avg = Complex64::new(0.0, 0.0);
    for h in 0..m {
        let hx = cyclic_act(x, action_weights, m, h);
        for g in 0..m {
            let gy = cyclic_act(y, action_weights, m, g);
            double_avg += szego_eval(basis, &hx, &gy).value();
        }
    }
    double_avg /= m as f64;

    let mut single_avg = Complex64::new(0.0, 0.0);
    for g in 0..m {
        let gy = cyclic_act(y, action_weights, m, g);
        single_avg += szego_eval(basis, x, &gy).value();
    }

    let constraint = SymmetryConstraint::Cyclic {
        order: m,
        action_weights: action_weights.to_vec(),
    };
    let invariant_basis = basis.invariant_subbasis(&constraint);
    let invariant = szego_eval(&invariant_basis, x, y).value() * m as f64;

    let d1 = (double_avg - single_avg).norm();
    let d2 = (double_avg - invariant).norm();
    let d3 = (single_avg - invariant).norm();
    Ok(AveragedKernel {
        double_avg_re: double_avg.re,
        double_avg_im: double_avg.im,
        single_avg_re: single_avg.re,
        single_avg_im: single_avg.im,
        invariant_re: invariant.re,
        invariant_im: invariant.im,
        max_deviation: d1.max(d2).max(d3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::model::make_sphere;
    use crate::geometry::weights::WeightVector;
    use crate::hardy::basis::build_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn three_routes_agree_on_round_s3() {
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for k in [3u64, 7, 12] {
            let basis = build_basis(&m, k);
            for order in [2u64, 3, 4] {
                for _ in 0..20 {
                    let x = SpherePoint::sample_uniform(2, &mut rng);
                    let y = SpherePoint::sample_uniform(2, &mut rng);
                    let avg = averaged_kernel(&basis, order, &[1, 0], &x, &y).unwrap();
                    assert!(
                        avg.max_deviation < 1e-10,
                        "k={k} m={order}: deviation {}",
                        avg.max_deviation
                    );
                }
            }
        }
    }

    #[test]
    fn trivial_group_returns_plain_kernel() {
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        let basis = build_basis(&m, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x = SpherePoint::sample_uniform(2, &mut rng);
        let y = SpherePoint::sample_uniform(2, &mut rng);
        let avg = averaged_kernel(&basis, 1, &[1, 0], &x, &y).unwrap();
        let plain = szego_eval(&basis, &x, &y).value();
        assert!((avg.double_avg() - plain).norm() < 1e-14);
        assert!((avg.single_avg() - plain).norm() < 1e-14);
        assert!((avg.invariant() - plain).norm() < 1e-14);
    }

    #[test]
    fn invariant_dimension_example_k3() {
        // (1,1), k=3, Z_2 on z_1: invariants are z_2^3 and z_1^2 z_2
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        let basis = build_basis(&m, 3);
        let sub = basis.invariant_subbasis(&SymmetryConstraint::Cyclic {
            order: 2,
            action_weights: vec![1, 0],
        });
        assert_eq!(sub.dim(), 2);
        let x = SpherePoint::new(vec![
            num_complex::Complex64::new(0.0, 0.0),
            num_complex::Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let avg = averaged_kernel(&basis, 2, &[1, 0], &x, &x).unwrap();
        // at the pole only z_2^3 survives: invariant kernel = 1/c^2 with
        // c^2 = 2 pi^2 / 4, and the averaged value carries the factor m
        let expect = 2.0 * 4.0 / (2.0 * PI * PI);
        assert!((avg.single_avg().re - expect).abs() < 1e-12);
    }

    #[test]
    fn rejects_malformed_weights() {
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        let basis = build_basis(&m, 3);
        let x = SpherePoint::sample_uniform(2, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(averaged_kernel(&basis, 2, &[1, 0, 0], &x, &x).is_err());
        assert!(averaged_kernel(&basis, 0, &[1, 0], &x, &x).is_err());
    }
}
