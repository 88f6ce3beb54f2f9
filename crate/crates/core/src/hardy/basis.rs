//! Orthonormal monomial bases of the degree-`k` section spaces.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::model::ModelSpace;
use crate::geometry::point::SpherePoint;
use crate::geometry::quad::{product_nodes_for, QuadMethod, QuadratureSpec};
use crate::geometry::weights::WeightVector;
use crate::hardy::lattice::{enumerate_monomials, MultiIndex};
use crate::hardy::norms::{dirichlet_mean_inv_scale, ln_round_norm_sq};

/// Orthonormal basis `{ z^alpha / c_alpha }` of the degree-`k` space, with
/// `c_alpha` the metric-volume L^2 norm kept in log form.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    weights: WeightVector,
    k: u64,
    exponents: Vec<MultiIndex>,
    ln_norm_sq: Vec<f64>,
}

/// Builds the basis for the degree-`k` space of the model.
pub fn build_basis(model: &ModelSpace, k: u64) -> MonomialBasis {
    let a = model.weights().clone();
    let exponents = enumerate_monomials(&a, k as i64);
    let n = a.cr_dim();
    let ln_norm_sq: Vec<f64> = exponents
        .par_iter()
        .map(|alpha| ln_round_norm_sq(n, alpha) + dirichlet_mean_inv_scale(&a, alpha).ln())
        .collect();
    MonomialBasis {
        weights: a,
        k,
        exponents,
        ln_norm_sq,
    }
}

impl MonomialBasis {
    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn degree(&self) -> u64 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[MultiIndex] {
        &self.exponents
    }

    pub fn ln_norm_sq(&self) -> &[f64] {
        &self.ln_norm_sq
    }

    /// Direct evaluation of the `i`-th orthonormal section. Underflows for
    /// very large degrees; kernel sums use the log path instead.
    pub fn eval_section(&self, i: usize, x: &SpherePoint) -> Complex64 {
        let alpha = &self.exponents[i];
        let mut v = Complex64::new(1.0, 0.0);
        for (j, &e) in alpha.alpha.iter().enumerate() {
            v *= x.get(j).powu(e);
        }
        v * (-0.5 * self.ln_norm_sq[i]).exp()
    }

    /// All orthonormal section values at one point.
    pub fn eval_all(&self, x: &SpherePoint) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.eval_section(i, x)).collect()
    }

    /// Keeps the sections fixed by the constraint; norms are inherited, so
    /// the sub-basis stays orthonormal in the ambient inner product.
    pub fn invariant_subbasis(&self, constraint: &SymmetryConstraint) -> MonomialBasis {
        let mut exponents = Vec::new();
        let mut ln_norm_sq = Vec::new();
        for (alpha, &ln) in self.exponents.iter().zip(&self.ln_norm_sq) {
            if constraint.keeps(alpha) {
                exponents.push(alpha.clone());
                ln_norm_sq.push(ln);
            }
        }
        MonomialBasis {
            weights: self.weights.clone(),
            k: self.k,
            exponents,
            ln_norm_sq,
        }
    }
}

/// Invariance constraints carving out sub-bases.
#[derive(Debug, Clone)]
pub enum SymmetryConstraint {
    /// Keep everything.
    Trivial,
    /// `Z_m` acting by `z_j -> e^{2 pi i w_j / m} z_j`: keep exponents with
    /// `<w, alpha> = 0 mod m`.
    Cyclic { order: u64, action_weights: Vec<i64> },
    /// Auxiliary circle action with integer weights `b`: keep exponents
    /// with `<b, alpha> = 0`.
    Linear { weights: Vec<i64> },
}

impl SymmetryConstraint {
    pub fn keeps(&self, alpha: &MultiIndex) -> bool {
        match self {
            SymmetryConstraint::Trivial => true,
            SymmetryConstraint::Cyclic {
                order,
                action_weights,
            } => {
                let pairing: i128 = alpha
                    .alpha
                    .iter()
                    .zip(action_weights)
                    .map(|(&e, &w)| e as i128 * w as i128)
                    .sum();
                pairing.rem_euclid(*order as i128) == 0
            }
            SymmetryConstraint::Linear { weights } => {
                let pairing: i128 = alpha
                    .alpha
                    .iter()
                    .zip(weights)
                    .map(|(&e, &w)| e as i128 * w as i128)
                    .sum();
                pairing == 0
            }
        }
    }
}

/// Numerically integrates all pairwise inner products against `dV_X` and
/// returns the largest deviation of the Gram matrix from the identity.
pub fn gram_check(model: &ModelSpace, basis: &MonomialBasis, quad: &QuadratureSpec) -> Result<f64> {
    let dim = basis.dim();
    if dim == 0 {
        return Err(Error::Degenerate("empty basis".into()));
    }
    let gram = match quad.method {
        QuadMethod::Product1d => {
            if model.cr_dim() != 1 {
                return Err(Error::InvalidConfig(
                    "product rule quadrature is only defined for n = 1".into(),
                ));
            }
            let (t_nodes, phase_nodes) = product_nodes_for(quad.samples, basis.degree());
            let mut gram = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
            accumulate_product1d(model, basis, t_nodes, phase_nodes, &mut gram);
            gram
        }
        QuadMethod::MonteCarlo => {
            let vol = crate::geometry::quad::sphere_volume(model.cr_dim());
            let mut rng = ChaCha8Rng::seed_from_u64(quad.seed);
            let mut gram = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
            for _ in 0..quad.samples {
                let x = SpherePoint::sample_uniform(model.n_coords(), &mut rng);
                let values = basis.eval_all(&x);
                let w = model.scale_factor(&x);
                for i in 0..dim {
                    for j in 0..dim {
                        gram[(i, j)] += w * values[i] * values[j].conj();
                    }
                }
            }
            gram * Complex64::new(vol / quad.samples as f64, 0.0)
        }
    };
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(expect, 0.0)).norm());
        }
    }
    Ok(worst)
}

fn accumulate_product1d(
    model: &ModelSpace,
    basis: &MonomialBasis,
    t_nodes: usize,
    phase_nodes: usize,
    gram: &mut nalgebra::DMatrix<Complex64>,
) {
    let (ts, ws) = crate::geometry::quad::gauss_legendre_01(t_nodes);
    let tau = std::f64::consts::TAU;
    let cell = 0.5 * (tau / phase_nodes as f64).powi(2);
    let dim = basis.dim();
    for (&t, &wt) in ts.iter().zip(&ws) {
        let r1 = (1.0 - t).sqrt();
        let r2 = t.sqrt();
        for i1 in 0..phase_nodes {
            let p1 = tau * (i1 as f64 + 0.5) / phase_nodes as f64;
            for i2 in 0..phase_nodes {
                let p2 = tau * (i2 as f64 + 0.5) / phase_nodes as f64;
                let x = SpherePoint::normalized(vec![
                    Complex64::from_polar(r1, p1),
                    Complex64::from_polar(r2, p2),
                ])
                .expect("nonzero");
                let values = basis.eval_all(&x);
                let w = wt * cell * model.scale_factor(&x);
                for i in 0..dim {
                    for j in 0..dim {
                        gram[(i, j)] += w * values[i] * values[j].conj();
                    }
                }
            }
        }
    }
}
