//! Seeded random points for soundness checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform points of `[−radius, radius]ⁿ`.
pub fn box_points(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-radius..=radius)).collect())
        .collect()
}

/// The smallest value of `f` over the points and where it occurs.
pub fn min_over<F: Fn(&[f64]) -> f64>(f: F, points: &[Vec<f64>]) -> (f64, Vec<f64>) {
    points
        .iter()
        .map(|x| (f(x), x.clone()))
        .fold((f64::INFINITY, Vec::new()), |best, cur| if cur.0 < best.0 { cur } else { best })
}

/// `Σ |c_α x^α|`, the natural scale for rounding error in evaluating `p(x)`.
pub fn abs_scale(terms: &[(Vec<u32>, f64)], x: &[f64]) -> f64 {
    terms
        .iter()
        .map(|(e, c)| c.abs() * e.iter().zip(x).map(|(&k, xi)| xi.abs().powi(k as i32)).product::<f64>())
        .sum()
}
