//! Quadrature over the sphere: seeded Monte-Carlo and, for `n = 1`, an
//! exact product rule in `(t, phi_1, phi_2)` coordinates where
//! `dsigma = (1/2) dt dphi_1 dphi_2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::model::ModelSpace;
use crate::geometry::point::SpherePoint;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadMethod {
    MonteCarlo,
    Product1d,
}

/// Value object describing one quadrature run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub samples: usize,
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            method: QuadMethod::MonteCarlo,
            samples,
            seed,
        }
    }

    pub fn product1d(samples: usize) -> Self {
        Self {
            method: QuadMethod::Product1d,
            samples,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Surface area of `S^{2n+1}`: `2 pi^{n+1} / n!`.
pub fn sphere_volume(n: usize) -> f64 {
    let mut v = 2.0 * std::f64::consts::PI.powi(n as i32 + 1);
    for j in 1..=n {
        v /= j as f64;
    }
    v
}

const SHARD: usize = 4096;

fn shard_seed(seed: u64, shard: u64) -> u64 {
    // splitmix64 step keyed by the shard index
    let mut z = seed ^ shard.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Monte-Carlo estimate of `integral_X F dsigma` over `S^{2n+1}`.
///
/// Samples are drawn in fixed-size shards with per-shard RNG streams
/// derived from the seed, and shard sums are reduced in shard order, so
/// results are bit-identical for a given seed regardless of thread count.
pub fn integrate_sphere_mc<F>(n_coords: usize, samples: usize, seed: u64, f: F) -> IntegralEstimate
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    let n_shards = samples.div_ceil(SHARD);
    let stats: Vec<(f64, f64, usize)> = (0..n_shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(shard_seed(seed, s as u64));
            let count = SHARD.min(samples - s * SHARD);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let x = SpherePoint::sample_uniform(n_coords, &mut rng);
                let v = f(&x);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq, count)
        })
        .collect();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (s, s2, _) in &stats {
        sum += s;
        sum_sq += s2;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let vol = sphere_volume(n_coords - 1);
    IntegralEstimate {
        value: vol * mean,
        std_error: vol * (var / n).sqrt(),
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Product rule on `S^3`: Gauss-Legendre in `t = |z_2|^2` and midpoint
/// phases (exact for trigonometric polynomials of degree `< phase_nodes`).
/// Estimates `integral F dsigma`.
pub fn integrate_product1d<F>(t_nodes: usize, phase_nodes: usize, f: F) -> f64
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    let (ts, ws) = gauss_legendre_01(t_nodes);
    let tau = std::f64::consts::TAU;
    let phase_w = tau / phase_nodes as f64;
    let cell = 0.5 * phase_w * phase_w;
    let total: f64 = (0..t_nodes)
        .into_par_iter()
        .map(|it| {
            let t = ts[it];
            let r1 = (1.0 - t).max(0.0).sqrt();
            let r2 = t.sqrt();
            let mut acc = 0.0;
            for i1 in 0..phase_nodes {
                let p1 = tau * (i1 as f64 + 0.5) / phase_nodes as f64;
                for i2 in 0..phase_nodes {
                    let p2 = tau * (i2 as f64 + 0.5) / phase_nodes as f64;
                    let z = vec![
                        Complex64::from_polar(r1, p1),
                        Complex64::from_polar(r2, p2),
                    ];
                    let x = SpherePoint::normalized(z).expect("nonzero");
                    acc += f(&x);
                }
            }
            ws[it] * acc * cell
        })
        .sum();
    total
}

/// Node counts for the product rule derived from a sample budget, with a
/// floor that keeps phase integration exact through the given degree.
pub fn product_nodes_for(samples: usize, degree: u64) -> (usize, usize) {
    let phase = (2 * degree + 5) as usize;
    let t = ((samples / (phase * phase)).max(32)).min(400);
    (t, phase)
}

/// `integral_X |det L_x| dV_X = integral (f/2)^n f dsigma`, with a
/// standard-error estimate (for the product rule: the drift under mesh
/// refinement).
pub fn geometric_integral(model: &ModelSpace, spec: &QuadratureSpec) -> Result<IntegralEstimate> {
    let n = model.cr_dim();
    let integrand = |x: &SpherePoint| -> f64 {
        let f = model.scale_factor(x);
        (f / 2.0).powi(n as i32) * f
    };
    match spec.method {
        QuadMethod::MonteCarlo => {
            if spec.samples < 10_000 {
                return Err(Error::InvalidConfig(format!(
                    "Monte-Carlo geometric integral needs >= 1e4 samples (got {})",
                    spec.samples
                )));
            }
            Ok(integrate_sphere_mc(
                model.n_coords(),
                spec.samples,
                spec.seed,
                integrand,
            ))
        }
        QuadMethod::Product1d => {
            if n != 1 {
                return Err(Error::InvalidConfig(
                    "product rule quadrature is only defined for n = 1".into(),
                ));
            }
            let (t, phase) = product_nodes_for(spec.samples, 0);
            let coarse = integrate_product1d(t / 2, phase, &integrand);
            let fine = integrate_product1d(t, phase, &integrand);
            Ok(IntegralEstimate {
                value: fine,
                std_error: (fine - coarse).abs(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::model::make_sphere;
    use crate::geometry::weights::WeightVector;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(1) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere_volume(2) - PI * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_01(8);
        for deg in 0..=15u32 {
            let got: f64 = x
                .iter()
                .zip(&w)
                .map(|(&t, &wt)| wt * t.powi(deg as i32))
                .sum();
            let expect = 1.0 / (deg as f64 + 1.0);
            assert!((got - expect).abs() < 1e-13, "degree {deg}");
        }
    }

    #[test]
    fn mc_volume_of_s3() {
        let est = integrate_sphere_mc(2, 40_000, 7, |_| 1.0);
        assert!((est.value - 2.0 * PI * PI).abs() < 1e-9); // constant integrand: zero variance
        assert!(est.std_error < 1e-9);
    }

    #[test]
    fn mc_moment_matches_closed_form() {
        // integral |z_1|^2 dsigma = vol/2 on S^3
        let est = integrate_sphere_mc(2, 60_000, 11, |x| x.moduli_sq()[0]);
        let exact = PI * PI;
        assert!(
            (est.value - exact).abs() < 4.0 * est.std_error,
            "value {} exact {} se {}",
            est.value,
            exact,
            est.std_error
        );
    }

    #[test]
    fn mc_is_seed_deterministic() {
        let a = integrate_sphere_mc(2, 20_000, 42, |x| x.moduli_sq()[1]);
        let b = integrate_sphere_mc(2, 20_000, 42, |x| x.moduli_sq()[1]);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn geometric_integral_round_s3() {
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        let est = geometric_integral(&m, &QuadratureSpec::product1d(20_000)).unwrap();
        assert!((est.value - PI * PI).abs() < 1e-10, "got {}", est.value);
    }

    #[test]
    fn geometric_integral_weighted_s3() {
        // a = (1,2): (1/2) * 2 pi^2 * int_0^1 (1+t)^-2 dt = pi^2/2
        let m = make_sphere(WeightVector::new(vec![1, 2]).unwrap());
        let est = geometric_integral(&m, &QuadratureSpec::product1d(40_000)).unwrap();
        assert!((est.value - PI * PI / 2.0).abs() < 1e-8, "got {}", est.value);
        // cross-check with Monte-Carlo within 4 standard errors
        let mc = geometric_integral(&m, &QuadratureSpec::monte_carlo(60_000, 3)).unwrap();
        assert!((mc.value - PI * PI / 2.0).abs() < 4.0 * mc.std_error);
    }

    #[test]
    fn geometric_integral_round_s5() {
        let m = make_sphere(WeightVector::new(vec![1, 1, 1]).unwrap());
        let est = geometric_integral(&m, &QuadratureSpec::monte_carlo(20_000, 5)).unwrap();
        assert!((est.value - PI.powi(3) / 4.0).abs() < 1e-9);
    }

    #[test]
    fn mc_rejects_tiny_sample_counts() {
        let m = make_sphere(WeightVector::new(vec![1, 1]).unwrap());
        assert!(geometric_integral(&m, &QuadratureSpec::monte_carlo(100, 1)).is_err());
    }
}
