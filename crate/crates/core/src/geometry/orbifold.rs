//! Integration over finite cyclic quotients of the sphere through explicit
//! atlases: each chart carries a group order `|G_U|` and the integral is
//! `sum_i (1/|G_Ui|) int rho_i w`. Well-definedness is checked by comparing
//! two independent atlases.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::model::ModelSpace;
use crate::geometry::point::SpherePoint;
use crate::geometry::quad::{integrate_sphere_mc, IntegralEstimate};
use crate::geometry::weights::gcd;

/// Quotient of the sphere by the order-`m` cyclic subgroup of the circle
/// action.
#[derive(Debug, Clone)]
pub struct CyclicQuotient {
    pub model: ModelSpace,
    pub order: u64,
}

/// Where a chart lives upstairs and how large its chart group is.
#[derive(Debug, Clone, Serialize)]
pub enum ChartDomain {
    /// The whole sphere, quotiented by the full cyclic group.
    Whole,
    /// A band `lo < |z_coord|^2 < hi`, stable under the action, quotiented
    /// by the full cyclic group.
    ModulusBand { coord: usize, lo: f64, hi: f64 },
    /// A fundamental-domain slice `arg z_coord in [phase0, phase0 + 2pi/m)`
    /// over a band where `z_coord` does not vanish; trivial chart group.
    /// Valid when `gcd(a_coord, m) = 1`.
    PhaseSlice {
        coord: usize,
        lo: f64,
        hi: f64,
        phase0: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbifoldChart {
    pub domain: ChartDomain,
    pub group_order: u64,
    /// Smooth bump supported on the chart's band; partition weights are the
    /// normalized bumps, so they sum to one wherever the cover does.
    bump: BumpSpec,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct BumpSpec {
    coord: usize,
    lo: f64,
    hi: f64,
}

impl BumpSpec {
    /// C^1 bump in `t = |z_coord|^2`, positive strictly inside `(lo, hi)`.
    fn eval(&self, x: &SpherePoint) -> f64 {
        let t = x.get(self.coord).norm_sqr();
        if t <= self.lo || t >= self.hi {
            return 0.0;
        }
        let s = (t - self.lo) / (self.hi - self.lo);
        let u = s * (1.0 - s);
        u * u
    }
}

#[derive(Debug, Clone)]
pub struct OrbifoldAtlas {
    pub quotient: CyclicQuotient,
    pub charts: Vec<OrbifoldChart>,
}

impl OrbifoldAtlas {
    /// Single-chart atlas: the whole sphere with the full group.
    pub fn single_chart(quotient: CyclicQuotient) -> Self {
        OrbifoldAtlas {
            charts: vec![OrbifoldChart {
                domain: ChartDomain::Whole,
                group_order: quotient.order,
                bump: BumpSpec {
                    coord: 0,
                    lo: -1.0,
                    hi: 2.0,
                },
            }],
            quotient,
        }
    }

    /// Two-chart atlas split along `t = |z_coord|^2`: a slice chart with
    /// trivial group where the coordinate is bounded away from zero, and a
    /// full-group chart over the complementary band.
    pub fn two_chart(quotient: CyclicQuotient, coord: usize) -> Result<Self> {
        let a_c = quotient.model.weights().get(coord);
        if gcd(a_c, quotient.order) != 1 {
            return Err(Error::Atlas(format!(
                "phase slice on coordinate {coord} needs gcd(a_{coord}, m) = 1"
            )));
        }
        let m = quotient.order;
        Ok(OrbifoldAtlas {
            charts: vec![
                OrbifoldChart {
                    domain: ChartDomain::PhaseSlice {
                        coord,
                        lo: 0.15,
                        hi: 2.0,
                        phase0: 0.0,
                    },
                    group_order: 1,
                    bump: BumpSpec {
                        coord,
                        lo: 0.15,
                        hi: 2.0,
                    },
                },
                OrbifoldChart {
                    domain: ChartDomain::ModulusBand {
                        coord,
                        lo: -1.0,
                        hi: 0.45,
                    },
                    group_order: m,
                    bump: BumpSpec {
                        coord,
                        lo: -1.0,
                        hi: 0.45,
                    },
                },
            ],
            quotient,
        })
    }

    fn partition_weights(&self, x: &SpherePoint) -> Vec<f64> {
        let bumps: Vec<f64> = self.charts.iter().map(|c| c.bump.eval(x)).collect();
        let total: f64 = bumps.iter().sum();
        if total <= 0.0 {
            return bumps; // gap in the cover; caught by the validity check
        }
        bumps.into_iter().map(|b| b / total).collect()
    }

    /// Checks that the partition weights are nonnegative and sum to one at
    /// sampled points of the covering sphere.
    pub fn validate_partition(&self, samples: usize, seed: u64) -> Result<()> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = SpherePoint::sample_uniform(self.quotient.model.n_coords(), &mut rng);
            let w = self.partition_weights(&x);
            if w.iter().any(|&v| v < 0.0) {
                return Err(Error::Atlas("negative partition weight".into()));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-10 {
                return Err(Error::Atlas(format!(
                    "partition of unity sums to {sum} at a sample point"
                )));
            }
        }
        Ok(())
    }

    /// Whether the lift of the chart contains the covering point. Slice
    /// charts keep one fundamental-domain sector of the cyclic action.
    fn lift_contains(&self, chart: &OrbifoldChart, x: &SpherePoint) -> bool {
        match chart.domain {
            ChartDomain::Whole => true,
            ChartDomain::ModulusBand { coord, lo, hi } => {
                let t = x.get(coord).norm_sqr();
                t > lo && t < hi
            }
            ChartDomain::PhaseSlice {
                coord,
                lo,
                hi,
                phase0,
            } => {
                let zc = x.get(coord);
                let t = zc.norm_sqr();
                if t <= lo || t >= hi {
                    return false;
                }
                let m = self.quotient.order as f64;
                let width = std::f64::consts::TAU / m;
                let phase = (zc.arg() - phase0).rem_euclid(std::f64::consts::TAU);
                phase < width
            }
        }
    }
}

/// `sum_i (1/|G_Ui|) int rho_i F dV_X`, estimated by seeded Monte-Carlo on
/// the covering sphere. The integrand must be invariant under the cyclic
/// action (it is a function on the quotient).
pub fn orbifold_integrate<F>(
    atlas: &OrbifoldAtlas,
    samples: usize,
    seed: u64,
    integrand: F,
) -> Result<IntegralEstimate>
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    atlas.validate_partition(256, seed ^ 0xA17A5)?;
    let model = &atlas.quotient.model;
    let per_sample = |x: &SpherePoint| -> f64 {
        let weights = atlas.partition_weights(x);
        let density = model.scale_factor(x); // dV_X = f dsigma
        let mut acc = 0.0;
        for (chart, w) in atlas.charts.iter().zip(&weights) {
            if *w > 0.0 && atlas.lift_contains(chart, x) {
                acc += w * integrand(x) * density / chart.group_order as f64;
            }
        }
        acc
    };
    Ok(integrate_sphere_mc(
        model.n_coords(),
        samples,
        seed,
        per_sample,
    ))
}

/// Checks invariance of an integrand under the generator of the cyclic
/// action at sampled points.
pub fn check_invariance<F>(quotient: &CyclicQuotient, samples: usize, seed: u64, f: F) -> Result<()>
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let theta = std::f64::consts::TAU / quotient.order as f64;
    let worst = (0..samples)
        .map(|_| {
            let x = SpherePoint::sample_uniform(quotient.model.n_coords(), &mut rng);
            (f(&x) - f(&quotient.model.act(&x, theta))).abs()
        })
        .fold(0.0, f64::max);
    if worst > 1e-9 {
        return Err(Error::Atlas(format!(
            "integrand is not invariant under the cyclic action (defect {worst:.3e})"
        )));
    }
    Ok(())
}

/// Integrates with two structurally different atlases and reports both
/// estimates; the quotient-independence check compares them against their
/// combined standard error.
pub fn dual_atlas_integral<F>(
    quotient: &CyclicQuotient,
    slice_coord: usize,
    samples: usize,
    seed_a: u64,
    seed_b: u64,
    integrand: F,
) -> Result<(IntegralEstimate, IntegralEstimate)>
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    check_invariance(quotient, 64, seed_a ^ 0x5EED, &integrand)?;
    let single = OrbifoldAtlas::single_chart(quotient.clone());
    let double = OrbifoldAtlas::two_chart(quotient.clone(), slice_coord)?;
    let a = orbifold_integrate(&single, samples, seed_a, &integrand)?;
    let b = orbifold_integrate(&double, samples, seed_b, &integrand)?;
    Ok((a, b))
}
