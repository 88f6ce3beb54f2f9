//! Exponent lattice of weighted-homogeneous monomials: enumeration and
//! dimension counting.

use serde::{Deserialize, Serialize};

use crate::geometry::weights::WeightVector;

/// Exponent vector of a monomial `z^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub alpha: Vec<u32>,
}

impl MultiIndex {
    pub fn total_degree(&self) -> u64 {
        self.alpha.iter().map(|&a| a as u64).sum()
    }

    pub fn weighted_degree(&self, a: &WeightVector) -> u64 {
        self.alpha
            .iter()
            .zip(a.as_slice())
            .map(|(&e, &w)| e as u64 * w)
            .sum()
    }

    /// Support restricted to coordinates listed in `coords`.
    pub fn supported_on(&self, coords: &[usize]) -> bool {
        self.alpha
            .iter()
            .enumerate()
            .all(|(j, &e)| e == 0 || coords.contains(&j))
    }
}

/// All `alpha >= 0` with `<a, alpha> = k`, in ascending lexicographic
/// order. Negative degrees give the empty list.
pub fn enumerate_monomials(a: &WeightVector, k: i64) -> Vec<MultiIndex> {
    if k < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; a.len()];
    recurse(a.as_slice(), 0, k as u64, &mut current, &mut out);
    out
}

fn recurse(a: &[u64], j: usize, remaining: u64, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if j == a.len() - 1 {
        if remaining % a[j] == 0 {
            current[j] = (remaining / a[j]) as u32;
            out.push(MultiIndex {
                alpha: current.clone(),
            });
            current[j] = 0;
        }
        return;
    }
    let max_e = remaining / a[j];
    for e in 0..=max_e {
        current[j] = e as u32;
        recurse(a, j + 1, remaining - e * a[j], current, out);
    }
    current[j] = 0;
}

/// `dim Ker` at every degree `0..=k_max` by a coin-change recurrence;
/// equals the enumeration count at each degree.
pub fn dim_table(a: &WeightVector, k_max: u64) -> Vec<u64> {
    let mut table = vec![0u64; k_max as usize + 1];
    table[0] = 1;
    for &w in a.as_slice() {
        let w = w as usize;
        for d in w..=k_max as usize {
            table[d] += table[d - w];
        }
    }
    table
}

/// Dimension of the degree-`k` component.
pub fn dim_fourier(a: &WeightVector, k: i64) -> u64 {
    if k < 0 {
        return 0;
    }
    *dim_table(a, k as u64).last().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: Vec<u64>) -> WeightVector {
        WeightVector::new(v).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let m = enumerate_monomials(&w(vec![1, 1]), 5);
        assert_eq!(m.len(), 6);
        assert_eq!(m[0].alpha, vec![0, 5]);
        assert_eq!(m[5].alpha, vec![5, 0]);

        let m = enumerate_monomials(&w(vec![1, 2]), 7);
        let got: Vec<Vec<u32>> = m.iter().map(|x| x.alpha.clone()).collect();
        assert_eq!(got, vec![vec![1, 3], vec![3, 2], vec![5, 1], vec![7, 0]]);

        let m = enumerate_monomials(&w(vec![3, 5, 7]), 0);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].alpha, vec![0, 0, 0]);

        assert!(enumerate_monomials(&w(vec![1, 2]), -3).is_empty());
    }

    #[test]
    fn dim_table_matches_enumeration() {
        for weights in [vec![1, 1], vec![1, 2], vec![2, 4], vec![1, 2, 3]] {
            let a = w(weights);
            let table = dim_table(&a, 60);
            for k in 0..=60u64 {
                assert_eq!(
                    table[k as usize],
                    enumerate_monomials(&a, k as i64).len() as u64,
                    "weights {a}, k {k}"
                );
            }
        }
    }

    #[test]
    fn dims_closed_forms() {
        let a11 = w(vec![1, 1]);
        let a12 = w(vec![1, 2]);
        let a24 = w(vec![2, 4]);
        for k in 0..=100i64 {
            assert_eq!(dim_fourier(&a11, k), (k + 1) as u64);
            assert_eq!(dim_fourier(&a12, k), (k / 2 + 1) as u64);
            if k % 2 == 1 {
                assert_eq!(dim_fourier(&a24, k), 0); // ell_0 = 2 does not divide k
            }
        }
        assert_eq!(dim_fourier(&a12, 7), 4);
    }

    #[test]
    fn dims_vanish_off_the_gcd_lattice() {
        let a = w(vec![3, 6]);
        for k in 0..=60i64 {
            if k % 3 != 0 {
                assert_eq!(dim_fourier(&a, k), 0);
            }
        }
    }

    /// Ehrhart structure: per residue class mod lcm(a), the dimension is a
    /// polynomial in k of degree n, so its (n+1)-th finite differences
    /// vanish identically (exact integer arithmetic).
    #[test]
    fn dimension_is_quasi_polynomial() {
        for weights in [vec![1, 2], vec![1, 2, 3], vec![2, 3, 4]] {
            let a = w(weights);
            let n = a.cr_dim();
            let lcm: u64 = a
                .as_slice()
                .iter()
                .copied()
                .fold(1, crate::geometry::weights::lcm);
            let start = 50u64;
            let span = 3 * lcm * (n as u64 + 1);
            let table = dim_table(&a, start + span);
            for r in 0..lcm {
                let seq: Vec<i64> = (0..)
                    .map(|i| start + r + i * lcm)
                    .take_while(|&k| k <= start + span)
                    .map(|k| table[k as usize] as i64)
                    .collect();
                assert!(seq.len() > n + 1);
                let mut diffs = seq;
                for _ in 0..=n {
                    diffs = diffs.windows(2).map(|p| p[1] - p[0]).collect();
                }
                assert!(
                    diffs.iter().all(|&d| d == 0),
                    "weights {a}, residue {r}: {diffs:?}"
                );
            }
        }
    }
}
