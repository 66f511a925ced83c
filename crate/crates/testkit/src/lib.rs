//! Independent oracles for the test suites: exact rational polynomial
//! arithmetic, exact convex-hull membership, and seeded sampling.
//!
//! Nothing here depends on the library under test.

pub mod exact;
pub mod hull;
pub mod sampling;

pub use num_rational::Ratio;

/// Exact rationals with enough headroom for small test polynomials.
pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Ratio::new(n, d)
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}
