use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::poly::SparsePoly;

/// A point where a polynomial is negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativePoint {
    pub point: Vec<f64>,
    pub value: f64,
}

const SAMPLES: usize = 4096;
const DESCENT_STEPS: usize = 500;

/// Looks for `x` with `p(x) < 0` by seeded sampling in `[−2, 2]ⁿ` followed by
/// gradient descent from the best sample. Finding none proves nothing.
pub fn find_negative_point(p: &SparsePoly, seed: u64) -> Option<NegativePoint> {
    let n = p.nvars();
    let eval = |x: &[f64]| p.evaluate(x).unwrap_or(f64::INFINITY);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = vec![0.0; n];
    let mut best_val = eval(&best);
    for _ in 0..SAMPLES {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        let v = eval(&x);
        if v < best_val {
            best_val = v;
            best = x;
        }
    }
    let grad: Vec<SparsePoly> = (0..n).map(|j| p.derivative(j)).collect();
    let mut step = 0.1;
    for _ in 0..DESCENT_STEPS {
        let g: Vec<f64> = grad.iter().map(|d| d.evaluate(&best).unwrap_or(0.0)).collect();
        let norm = g.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm < 1e-14 {
            break;
        }
        loop {
            let x: Vec<f64> = best.iter().zip(&g).map(|(b, gi)| b - step * gi / norm).collect();
            let v = eval(&x);
            if v < best_val {
                best = x;
                best_val = v;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-15 {
                break;
            }
        }
        if step < 1e-15 {
            break;
        }
    }
    let scale = p.max_abs_coef().max(1.0);
    (best_val < -1e-12 * scale).then_some(NegativePoint {
        point: best,
        value: best_val,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Variables};

    #[test]
    fn finds_the_minimum_of_a_shifted_square() {
        let p = parse_poly("x1^2 + x1", &Variables::indexed(1)).unwrap();
        let c = find_negative_point(&p, 1).unwrap();
        assert!((c.point[0] + 0.5).abs() < 1e-6);
        assert!((c.value + 0.25).abs() < 1e-10);
    }

    #[test]
    fn nonnegative_polynomials_have_none() {
        let vars = Variables::indexed(2);
        let motzkin = parse_poly("x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2", &vars).unwrap();
        assert!(find_negative_point(&motzkin, 3).is_none());
        assert!(find_negative_point(&parse_poly("x1^2 + x2^2", &vars).unwrap(), 3).is_none());
    }
}
