//! The model space: `S^{2n+1}` with a weighted circle action, its contact
//! form and Reeb field, and the isotropy stratification.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::point::SpherePoint;
use crate::geometry::weights::{gcd, Stratification, WeightVector};

/// Coordinates with `|z_j|` above this count as part of the support when
/// deciding stratum membership. Points are floating-point, so membership
/// has to be thresholded.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

/// The weighted sphere `X` together with its contact structure.
///
/// The action is `e^{it} . z = (e^{i a_1 t} z_1, ..., e^{i a_{n+1} t} z_{n+1})`,
/// the contact form is `w_0 = alpha / S_a(z)` with `alpha` the standard
/// contact form of the round sphere, and the Reeb field is the generator of
/// the action, so that `w_0(R) = -1` holds identically.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    weights: WeightVector,
    stratification: Stratification,
}

/// Builds the model for a weight vector. Rejects empty or non-positive
/// weights through `WeightVector`'s own validation.
pub fn make_sphere(weights: WeightVector) -> ModelSpace {
    let stratification = Stratification::from_weights(&weights);
    ModelSpace {
        weights,
        stratification,
    }
}

impl ModelSpace {
    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn cr_dim(&self) -> usize {
        self.weights.cr_dim()
    }

    pub fn n_coords(&self) -> usize {
        self.weights.len()
    }

    pub fn stratification(&self) -> &Stratification {
        &self.stratification
    }

    /// `S_a(z)`; action-invariant, strictly positive on the sphere.
    pub fn contact_scale(&self, x: &SpherePoint) -> f64 {
        self.weights.contact_scale(&x.moduli_sq())
    }

    /// `f = 1/S_a(z)`: also the density of `dV_X` against Euclidean `dsigma`.
    pub fn scale_factor(&self, x: &SpherePoint) -> f64 {
        1.0 / self.contact_scale(x)
    }

    /// Applies `e^{it}` to a point.
    pub fn act(&self, x: &SpherePoint, theta: f64) -> SpherePoint {
        let z = x
            .coords()
            .iter()
            .zip(self.weights.as_slice())
            .map(|(&zj, &aj)| zj * Complex64::from_polar(1.0, aj as f64 * theta))
            .collect();
        SpherePoint::new(z).expect("phase rotation preserves the unit norm")
    }

    /// Infinitesimal action `R(z) = (i a_j z_j)`, the Reeb field.
    pub fn reeb(&self, x: &SpherePoint) -> Vec<Complex64> {
        x.coords()
            .iter()
            .zip(self.weights.as_slice())
            .map(|(&zj, &aj)| Complex64::i() * aj as f64 * zj)
            .collect()
    }

    /// Isotropy order `l(x) = gcd { a_j : |z_j| > threshold }`.
    pub fn isotropy_order(&self, x: &SpherePoint) -> Result<u64> {
        let mut g = 0u64;
        for (j, zj) in x.coords().iter().enumerate() {
            if zj.norm() > SUPPORT_THRESHOLD {
                g = gcd(g, self.weights.get(j));
            }
        }
        if g == 0 {
            return Err(Error::InvalidPoint(
                "all coordinates below support threshold".into(),
            ));
        }
        Ok(g)
    }

    /// Coordinate support of a point under the stratum threshold.
    pub fn support(&self, x: &SpherePoint) -> Vec<usize> {
        x.coords()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > SUPPORT_THRESHOLD)
            .map(|(j, _)| j)
            .collect()
    }

    /// Ambient contact form at `z` (not necessarily unit norm) applied to
    /// an ambient vector: `w_0(v) = sum_j Im(z_j conj(v_j)) / S_a(z)`.
    pub fn omega0(&self, z: &[Complex64], v: &[Complex64]) -> f64 {
        let alpha: f64 = z
            .iter()
            .zip(v)
            .map(|(&zj, &vj)| (zj * vj.conj()).im)
            .sum();
        let scale: f64 = z
            .iter()
            .zip(self.weights.as_slice())
            .map(|(&zj, &aj)| aj as f64 * zj.norm_sqr())
            .sum();
        alpha / scale
    }

    /// `d w_0(u, v)` for constant ambient extensions of `u, v`, by central
    /// differences of `w_0`: `d eta(u,v) = D_u(eta(v)) - D_v(eta(u))`.
    /// Restricting this ambient 2-form to tangent vectors gives the
    /// intrinsic exterior derivative (pullback commutes with d).
    pub fn d_omega0_fd(&self, z: &[Complex64], u: &[Complex64], v: &[Complex64], h: f64) -> f64 {
        let shift = |base: &[Complex64], dir: &[Complex64], s: f64| -> Vec<Complex64> {
            base.iter().zip(dir).map(|(&b, &d)| b + s * d).collect()
        };
        let du = (self.omega0(&shift(z, u, h), v) - self.omega0(&shift(z, u, -h), v)) / (2.0 * h);
        let dv = (self.omega0(&shift(z, v, h), u) - self.omega0(&shift(z, v, -h), u)) / (2.0 * h);
        du - dv
    }

    /// Euclidean-orthonormal frame `U_1..U_n` of `T^{1,0}X` at `x`
    /// (holomorphic vectors with `<U, z> = 0`), via Gram-Schmidt.
    pub fn holomorphic_frame(&self, x: &SpherePoint) -> Vec<Vec<Complex64>> {
        let z = x.coords();
        let m = z.len();
        let mut frame: Vec<Vec<Complex64>> = Vec::with_capacity(m - 1);
        for j in 0..m {
            if frame.len() == m - 1 {
                break;
            }
            // candidate e_j projected off z and the previous frame vectors
            let mut cand: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); m];
            cand[j] = Complex64::new(1.0, 0.0);
            let zc = herm(&cand, z);
            for (c, &zj) in cand.iter_mut().zip(z) {
                *c -= zc * zj;
            }
            for u in &frame {
                let uc = herm(&cand, u);
                for (c, &uj) in cand.iter_mut().zip(u) {
                    *c -= uc * uj;
                }
            }
            let norm: f64 = cand.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for c in cand.iter_mut() {
                    *c /= norm;
                }
                frame.push(cand);
            }
        }
        assert_eq!(frame.len(), m - 1, "T^{{1,0}} frame construction failed");
        frame
    }

    /// Real frame of the contact plane `HX`: for each holomorphic frame
    /// vector `U`, the real vectors corresponding to `U` and `iU`.
    pub fn contact_frame(&self, x: &SpherePoint) -> Vec<Vec<Complex64>> {
        let mut out = Vec::new();
        for u in self.holomorphic_frame(x) {
            let iu: Vec<Complex64> = u.iter().map(|&c| Complex64::i() * c).collect();
            out.push(u);
            out.push(iu);
        }
        out
    }

    /// Orbit distance `inf_theta |x - e^{it} . y|`: coarse scan of the
    /// trigonometric polynomial `Re sum x_j conj(y_j) e^{-i a_j t}` plus
    /// golden-section refinement.
    pub fn orbit_distance(&self, x: &SpherePoint, y: &SpherePoint) -> f64 {
        let coeffs: Vec<Complex64> = x
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(&xj, &yj)| xj * yj.conj())
            .collect();
        let overlap = |theta: f64| -> f64 {
            coeffs
                .iter()
                .zip(self.weights.as_slice())
                .map(|(&c, &a)| (c * Complex64::from_polar(1.0, -(a as f64) * theta)).re)
                .sum()
        };
        let grid = 64 * (*self.weights.as_slice().iter().max().unwrap()).max(16) as usize;
        let tau = std::f64::consts::TAU;
        let mut best_i = 0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..grid {
            let v = overlap(tau * i as f64 / grid as f64);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        // golden-section around the best grid cell
        let phi = 0.618_033_988_749_894_9;
        let mut lo = tau * (best_i as f64 - 1.0) / grid as f64;
        let mut hi = tau * (best_i as f64 + 1.0) / grid as f64;
        for _ in 0..60 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if overlap(m1) > overlap(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let max_overlap = overlap(0.5 * (lo + hi)).max(best);
        (2.0 - 2.0 * max_overlap).max(0.0).sqrt()
    }

    /// Contact-structure residuals at a point, all expected below `1e-6`:
    /// `|w_0(R) + 1|`, `max |w_0(W)|` over a frame of `HX`, and
    /// `max |d w_0(R, V)|` over a frame of `TX` by finite differences.
    pub fn check_contact(&self, x: &SpherePoint) -> ContactResiduals {
        let z = x.coords();
        let reeb = self.reeb(x);
        let reeb_defect = (self.omega0(z, &reeb) + 1.0).abs();

        let h_frame = self.contact_frame(x);
        let horizontal = h_frame
            .iter()
            .map(|w| self.omega0(z, w).abs())
            .fold(0.0, f64::max);

        let h = 1e-5;
        let mut tx_frame = h_frame;
        tx_frame.push(reeb.clone());
        let reeb_contraction = tx_frame
            .iter()
            .map(|v| self.d_omega0_fd(z, &reeb, v, h).abs())
            .fold(0.0, f64::max);

        ContactResiduals {
            reeb_defect,
            horizontal,
            reeb_contraction,
        }
    }
}

/// `<u, v> = sum u_j conj(v_j)`.
pub fn herm(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(&a, &b)| a * b.conj()).sum()
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ContactResiduals {
    /// `|w_0(R) + 1|`
    pub reeb_defect: f64,
    /// `max |w_0(W)|` over the contact frame
    pub horizontal: f64,
    /// `max |d w_0(R, .)|` over a tangent frame (finite differences)
    pub reeb_contraction: f64,
}

impl ContactResiduals {
    pub fn max(&self) -> f64 {
        self.reeb_defect
            .max(self.horizontal)
            .max(self.reeb_contraction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(weights: Vec<u64>) -> ModelSpace {
        make_sphere(WeightVector::new(weights).unwrap())
    }

    fn pt(coords: &[(f64, f64)]) -> SpherePoint {
        SpherePoint::new(coords.iter().map(|&(re, im)| Complex64::new(re, im)).collect()).unwrap()
    }

    #[test]
    fn isotropy_orders() {
        let x12 = model(vec![1, 2]);
        assert_eq!(x12.isotropy_order(&pt(&[(0.0, 0.0), (1.0, 0.0)])).unwrap(), 2);
        assert_eq!(x12.isotropy_order(&pt(&[(1.0, 0.0), (0.0, 0.0)])).unwrap(), 1);

        let x11 = model(vec![1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = SpherePoint::sample_uniform(2, &mut rng);
            assert_eq!(x11.isotropy_order(&x).unwrap(), 1);
        }
    }

    #[test]
    fn isotropy_divides_p_and_is_divisible_by_ell0() {
        let m = model(vec![2, 4, 6]);
        let s = m.stratification();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = SpherePoint::sample_uniform(3, &mut rng);
            let l = m.isotropy_order(&x).unwrap();
            assert_eq!(l % s.ell0, 0);
            assert_eq!(s.p % l, 0);
            // generic stratum is open dense: random points land in it
            assert_eq!(l, s.ell0);
        }
    }

    #[test]
    fn contact_scale_is_action_invariant() {
        let m = model(vec![3, 5]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = SpherePoint::sample_uniform(2, &mut rng);
            let s0 = m.contact_scale(&x);
            for theta in [0.3, 1.7, 4.4] {
                assert!((m.contact_scale(&m.act(&x, theta)) - s0).abs() < 1e-14 * s0);
            }
        }
    }

    #[test]
    fn contact_residuals_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for weights in [vec![1, 1], vec![1, 2], vec![3, 5], vec![1, 2, 3]] {
            let m = model(weights);
            for _ in 0..5 {
                let x = SpherePoint::sample_uniform(m.n_coords(), &mut rng);
                let r = m.check_contact(&x);
                assert!(r.max() < 1e-6, "residuals {r:?}");
            }
        }
        // singular stratum point of (3,5)
        let m = model(vec![3, 5]);
        let r = m.check_contact(&pt(&[(0.0, 0.0), (1.0, 0.0)]));
        assert!(r.max() < 1e-6);
    }

    #[test]
    fn frame_is_orthonormal_and_horizontal() {
        let m = model(vec![1, 2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = SpherePoint::sample_uniform(3, &mut rng);
        let frame = m.holomorphic_frame(&x);
        assert_eq!(frame.len(), 2);
        for (i, u) in frame.iter().enumerate() {
            assert!((herm(u, x.coords())).norm() < 1e-12);
            for (j, v) in frame.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((herm(u, v) - expected).norm() < 1e-12);
            }
        }
    }
}
