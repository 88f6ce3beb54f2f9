//! Circle-action weight vectors and the isotropy stratification they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The `n+1` positive integer weights of the circle action on `S^{2n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightVector {
    weights: Vec<u64>,
}

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidWeights(format!(
                "need at least 2 weights (got {})",
                weights.len()
            )));
        }
        if weights.iter().any(|&a| a == 0) {
            return Err(Error::InvalidWeights("weights must be positive".into()));
        }
        Ok(Self { weights })
    }

    /// Complex CR dimension `n`; the sphere has real dimension `2n+1`.
    pub fn cr_dim(&self) -> usize {
        self.weights.len() - 1
    }

    /// Number of complex coordinates, `n+1`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.weights
    }

    pub fn get(&self, j: usize) -> u64 {
        self.weights[j]
    }

    /// gcd of all weights: the generic isotropy order.
    pub fn gcd(&self) -> u64 {
        self.weights.iter().copied().fold(0, gcd)
    }

    pub fn is_round(&self) -> bool {
        self.weights.iter().all(|&a| a == self.weights[0])
    }

    /// `S_a(z) = sum_j a_j |z_j|^2` from squared moduli.
    pub fn contact_scale(&self, moduli_sq: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(moduli_sq)
            .map(|(&a, &t)| a as f64 * t)
            .sum()
    }
}

impl std::fmt::Display for WeightVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Distinct isotropy orders realized on the sphere, global gcd and lcm.
///
/// Every nonempty coordinate support is realized by some point, so the
/// isotropy orders are exactly the gcds of nonempty weight subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratification {
    pub ell_values: Vec<u64>,
    pub ell0: u64,
    pub p: u64,
}

impl Stratification {
    pub fn from_weights(a: &WeightVector) -> Self {
        // Subset gcds form a lattice; closing {a_j} under pairwise gcd
        // reaches every subset gcd without enumerating 2^(n+1) subsets.
        let mut values: Vec<u64> = a.as_slice().to_vec();
        values.sort_unstable();
        values.dedup();
        loop {
            let mut added = false;
            let snapshot = values.clone();
            for (i, &x) in snapshot.iter().enumerate() {
                for &y in &snapshot[i + 1..] {
                    let g = gcd(x, y);
                    if !values.contains(&g) {
                        values.push(g);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        values.sort_unstable();
        let ell0 = values[0];
        let p = values.iter().copied().fold(1, lcm);
        debug_assert_eq!(ell0, a.gcd());
        Stratification {
            ell_values: values,
            ell0,
            p,
        }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}
