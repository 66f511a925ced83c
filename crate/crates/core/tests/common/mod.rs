#![allow(dead_code)]

use sonclyap_core::{DynSystem, Exponent, SparsePoly, Variables};
use sonclyap_testkit::exact::RPoly;
use sonclyap_testkit::sampling::{abs_scale, box_points};

pub fn to_sparse(p: &RPoly, vars: &Variables) -> SparsePoly {
    SparsePoly::from_terms(vars, p.to_f64_terms().into_iter().map(|(e, c)| (Exponent::new(e), c))).unwrap()
}

pub fn terms_of(p: &SparsePoly) -> Vec<(Vec<u32>, f64)> {
    p.terms().map(|(e, c)| (e.entries().to_vec(), c)).collect()
}

pub fn system(vars: &Variables, rhs: &[RPoly]) -> DynSystem {
    DynSystem::new(vars, rhs.iter().map(|f| to_sparse(f, vars)).collect()).unwrap()
}

/// Smallest `p(x) / (1 + Σ|c_α x^α|)` over seeded points of `[−2, 2]ⁿ`.
pub fn worst_relative_value(p: &SparsePoly, count: usize, seed: u64) -> f64 {
    let terms = terms_of(p);
    box_points(p.nvars(), count, 2.0, seed)
        .iter()
        .map(|x| p.evaluate(x).unwrap() / (1.0 + abs_scale(&terms, x)))
        .fold(f64::INFINITY, f64::min)
}

/// Every accepted certificate must survive this.
pub fn assert_nonneg_on_samples(p: &SparsePoly, seed: u64) {
    let worst = worst_relative_value(p, 10_000, seed);
    assert!(worst >= -1e-9, "{p} reaches {worst:e} (relative)");
}
