//! L^2 norms of sphere monomials.
//!
//! Against the Euclidean surface measure the moments are classical:
//! `||z^alpha||^2 = 2 pi^{n+1} prod(alpha_j!) / (n + |alpha|)!`. The inner
//! product of the section spaces uses the metric volume `dV_X = f dsigma`
//! with `f = 1/S_a`, which multiplies each squared norm by the expectation
//! of `f` under the Dirichlet(alpha+1) law of the squared moduli. Distinct
//! monomials stay exactly orthogonal because `f` only depends on moduli.
//!
//! Everything is carried in logs so bases remain usable up to `k ~ 2000`.

use std::sync::OnceLock;

use crate::geometry::weights::WeightVector;
use crate::hardy::lattice::MultiIndex;

const LN_FACTORIAL_SIZE: usize = 1 << 15;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; LN_FACTORIAL_SIZE];
        for m in 1..LN_FACTORIAL_SIZE {
            t[m] = t[m - 1] + (m as f64).ln();
        }
        t
    })
}

pub fn ln_factorial(m: u64) -> f64 {
    let table = ln_factorial_table();
    assert!(
        (m as usize) < table.len(),
        "degree {m} beyond the norm table"
    );
    table[m as usize]
}

/// `ln ||z^alpha||^2_{L^2(dsigma)}` on `S^{2n+1}`.
pub fn ln_round_norm_sq(n: usize, alpha: &MultiIndex) -> f64 {
    let total = alpha.total_degree();
    let mut ln = std::f64::consts::LN_2 + (n as f64 + 1.0) * std::f64::consts::PI.ln();
    for &e in &alpha.alpha {
        ln += ln_factorial(e as u64);
    }
    ln - ln_factorial(n as u64 + total)
}

/// `||z^alpha||_{L^2(dsigma)}`; underflows for very large degrees, use the
/// log form beyond `|alpha| ~ 600`.
pub fn monomial_norm(n: usize, alpha: &MultiIndex) -> f64 {
    (0.5 * ln_round_norm_sq(n, alpha)).exp()
}

/// `E[1/S_a(t)]` for `t ~ Dirichlet(alpha + 1)`: the ratio between the
/// metric-volume norm and the round norm. Order one for every degree.
pub fn dirichlet_mean_inv_scale(a: &WeightVector, alpha: &MultiIndex) -> f64 {
    if a.is_round() {
        return 1.0 / a.get(0) as f64;
    }
    let params: Vec<f64> = alpha.alpha.iter().map(|&e| e as f64 + 1.0).collect();
    let weights: Vec<f64> = a.as_slice().iter().map(|&w| w as f64).collect();
    let mut coords = vec![0.0; params.len()];
    stick_breaking(&params, &weights, 0, 1.0, &mut coords)
}

/// Recursive stick-breaking integration: at level `j`, the fraction taken
/// by coordinate `j` of the remaining mass is Beta(alpha_j + 1,
/// sum_{l>j}(alpha_l + 1)) distributed. Each level uses Gauss-Legendre on
/// a window around the Beta mass, self-normalized so window truncation
/// cancels to first order.
fn stick_breaking(
    params: &[f64],
    weights: &[f64],
    level: usize,
    remaining: f64,
    coords: &mut Vec<f64>,
) -> f64 {
    let m = params.len();
    if level == m - 1 {
        coords[level] = remaining;
        let s: f64 = coords.iter().zip(weights).map(|(&t, &w)| t * w).sum();
        return 1.0 / s;
    }
    let a = params[level];
    let b: f64 = params[level + 1..].iter().sum();
    let (nodes, wts) = beta_composite_rule(a, b);
    let mut mass = 0.0;
    let mut acc = 0.0;
    for (&s, &w) in nodes.iter().zip(&wts) {
        let pdf = ln_beta_pdf(a, b, s).exp();
        if pdf == 0.0 {
            continue;
        }
        coords[level] = remaining * s;
        let inner = stick_breaking(params, weights, level + 1, remaining * (1.0 - s), coords);
        mass += w * pdf;
        acc += w * pdf * inner;
    }
    coords[level] = 0.0;
    acc / mass
}

fn ln_beta_pdf(a: f64, b: f64, s: f64) -> f64 {
    let ln_b = ln_factorial(a as u64 - 1) + ln_factorial(b as u64 - 1)
        - ln_factorial((a + b) as u64 - 1);
    (a - 1.0) * s.ln() + (b - 1.0) * (1.0 - s).ln() - ln_b
}

const BULK_NODES: usize = 48;
const TAIL_NODES: usize = 14;
const LN_DROP: f64 = 45.0;

/// Composite Gauss-Legendre rule covering all of `[0, 1]`: a dense panel
/// where the Beta log-density sits within `LN_DROP` of its maximum, plus
/// low-order panels on whatever remains. Full coverage removes truncation
/// bias; the tail panels only ever see density below `e^-45`.
fn beta_composite_rule(a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (bulk_n, bulk_w) = gl_cache(BULK_NODES);
    let (tail_n, tail_w) = gl_cache(TAIL_NODES);
    let (lo, hi) = beta_bulk_window(a, b);

    let mut nodes = Vec::with_capacity(BULK_NODES + 2 * TAIL_NODES);
    let mut weights = Vec::with_capacity(BULK_NODES + 2 * TAIL_NODES);
    let mut add_panel = |from: f64, to: f64, ns: &[f64], ws: &[f64]| {
        let width = to - from;
        if width <= 0.0 {
            return;
        }
        for (&x, &w) in ns.iter().zip(ws) {
            nodes.push(from + width * x);
            weights.push(w * width);
        }
    };
    add_panel(0.0, lo, tail_n, tail_w);
    add_panel(lo, hi, bulk_n, bulk_w);
    add_panel(hi, 1.0, tail_n, tail_w);
    (nodes, weights)
}

/// Window where the unnormalized log-density `(a-1) ln s + (b-1) ln(1-s)`
/// stays within `LN_DROP` of its maximum, found by bisection from the mode
/// toward each endpoint.
fn beta_bulk_window(a: f64, b: f64) -> (f64, f64) {
    let g = |s: f64| (a - 1.0) * s.ln() + (b - 1.0) * (1.0 - s).ln();
    let mode = if a <= 1.0 {
        0.0
    } else if b <= 1.0 {
        1.0
    } else {
        (a - 1.0) / (a + b - 2.0)
    };
    let g_max = if mode == 0.0 || mode == 1.0 {
        0.0
    } else {
        g(mode)
    };
    let target = g_max - LN_DROP;
    let bisect = |mut inside: f64, mut outside: f64| -> f64 {
        // g(inside) >= target, monotone toward `outside`
        if g(clamp_interior(outside)) >= target {
            return outside;
        }
        for _ in 0..80 {
            let mid = 0.5 * (inside + outside);
            if g(clamp_interior(mid)) >= target {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        outside
    };
    (bisect(mode, 0.0), bisect(mode, 1.0))
}

fn clamp_interior(s: f64) -> f64 {
    s.clamp(1e-300, 1.0 - 1e-16)
}

fn gl_cache(n: usize) -> (&'static [f64], &'static [f64]) {
    static BULK: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static TAIL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let cache = if n == BULK_NODES { &BULK } else { &TAIL };
    let (nodes, weights) = cache.get_or_init(|| crate::geometry::quad::gauss_legendre_01(n));
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::lattice::enumerate_monomials;

    const PI: f64 = std::f64::consts::PI;

    fn idx(alpha: Vec<u32>) -> MultiIndex {
        MultiIndex { alpha }
    }

    #[test]
    fn round_norm_examples() {
        // n=1: volume, |z_1|^2, |z_2|^{2m}
        assert!((monomial_norm(1, &idx(vec![0, 0])).powi(2) - 2.0 * PI * PI).abs() < 1e-10);
        assert!((monomial_norm(1, &idx(vec![1, 0])).powi(2) - PI * PI).abs() < 1e-10);
        for m in 1..20u32 {
            let expect = 2.0 * PI * PI / (m as f64 + 1.0);
            assert!((monomial_norm(1, &idx(vec![0, m])).powi(2) - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn round_norms_match_monte_carlo() {
        use crate::geometry::quad::integrate_sphere_mc;
        for (n, alpha) in [(1, vec![2, 1]), (2, vec![1, 0, 2]), (1, vec![4, 0])] {
            let alpha = idx(alpha);
            let est = integrate_sphere_mc(n + 1, 60_000, 23, |x| {
                x.moduli_sq()
                    .iter()
                    .zip(&alpha.alpha)
                    .map(|(&t, &e)| t.powi(e as i32))
                    .product()
            });
            let exact = ln_round_norm_sq(n, &alpha).exp();
            assert!(
                (est.value - exact).abs() < 4.0 * est.std_error,
                "n={n} alpha={:?}: {} vs {exact}",
                alpha.alpha,
                est.value
            );
        }
    }

    #[test]
    fn log_form_survives_large_degrees() {
        let alpha = idx(vec![1000, 1000]);
        let ln = ln_round_norm_sq(1, &alpha);
        assert!(ln.is_finite());
        assert!(ln < -100.0); // far below f64 direct representation after exp
    }

    #[test]
    fn dirichlet_mean_on_round_weights_is_exact() {
        let a = WeightVector::new(vec![2, 2, 2]).unwrap();
        let e = dirichlet_mean_inv_scale(&a, &idx(vec![3, 1, 2]));
        assert_eq!(e, 0.5);
    }

    #[test]
    fn dirichlet_mean_matches_direct_1d_quadrature() {
        // a = (1,2): E[1/(1+t)] with t ~ Beta(alpha_2+1, alpha_1+1),
        // computed independently by fine midpoint quadrature.
        let a = WeightVector::new(vec![1, 2]).unwrap();
        for alpha in [vec![0, 0], vec![5, 2], vec![40, 13], vec![0, 60], vec![900, 0]] {
            let alpha = idx(alpha);
            let got = dirichlet_mean_inv_scale(&a, &alpha);
            let (p, q) = (alpha.alpha[1] as f64 + 1.0, alpha.alpha[0] as f64 + 1.0);
            let m = 400_000;
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..m {
                let t = (i as f64 + 0.5) / m as f64;
                let w = ((p - 1.0) * t.ln() + (q - 1.0) * (1.0 - t).ln()).exp();
                num += w / (1.0 + t);
                den += w;
            }
            let expect = num / den;
            assert!(
                (got - expect).abs() < 1e-9,
                "alpha {:?}: {got} vs {expect}",
                alpha.alpha
            );
        }
    }

    #[test]
    fn dirichlet_mean_matches_mc_for_n2() {
        use rand::Rng;
        use rand::SeedableRng;
        let a = WeightVector::new(vec![1, 2, 3]).unwrap();
        for alpha in [vec![2, 3, 1], vec![0, 0, 25], vec![10, 0, 4]] {
            let alpha = idx(alpha);
            let got = dirichlet_mean_inv_scale(&a, &alpha);
            // Dirichlet sampling via normalized Gamma draws
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
            let mut acc = 0.0;
            let samples = 200_000;
            for _ in 0..samples {
                let g: Vec<f64> = alpha
                    .alpha
                    .iter()
                    .map(|&e| {
                        // sum of (e+1) standard exponentials is Gamma(e+1)
                        (0..=e)
                            .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
                            .sum()
                    })
                    .collect();
                let total: f64 = g.iter().sum();
                let s: f64 = g
                    .iter()
                    .zip(a.as_slice())
                    .map(|(&gi, &w)| gi / total * w as f64)
                    .sum();
                acc += 1.0 / s;
            }
            let mc = acc / samples as f64;
            assert!(
                (got - mc).abs() < 5e-3,
                "alpha {:?}: {got} vs MC {mc}",
                alpha.alpha
            );
        }
    }

    #[test]
    fn weighted_norms_are_positive_and_bounded() {
        let a = WeightVector::new(vec![1, 2, 3]).unwrap();
        for alpha in enumerate_monomials(&a, 24) {
            let e = dirichlet_mean_inv_scale(&a, &alpha);
            assert!(e >= 1.0 / 3.0 - 1e-12 && e <= 1.0 + 1e-12, "E = {e}");
        }
    }
}
