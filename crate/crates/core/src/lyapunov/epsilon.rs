//! Strictly positive margin polynomials `p = Σ ε_α x^α` with variable ε.

use std::collections::BTreeSet;
use std::ops::Range;

use crate::affine::AffineForm;
use crate::error::{Error, Result};
use crate::poly::{Exponent, LinearFormPoly};

/// Default lower bound on `Σ ε_α`.
pub const EPSILON_MIN: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonPoly {
    /// `Σ ε_α x^α`; its decision list extends the base polynomial's.
    pub poly: LinearFormPoly,
    /// `ε_α ≥ 0` and `Σ ε_α − eps_min ≥ 0`, as `f ≥ 0` forms.
    pub constraints: Vec<AffineForm>,
    /// Indices of the fresh ε variables.
    pub indices: Range<usize>,
}

/// Builds `Σ_{α ∈ a_plus} ε_α x^α` with fresh variables appended after the
/// decision variables of `base`.
pub fn build_epsilon_poly(
    base: &LinearFormPoly,
    a_plus: &BTreeSet<Exponent>,
    prefix: &str,
    eps_min: f64,
) -> Result<EpsilonPoly> {
    if a_plus.is_empty() {
        return Err(Error::EmptyPositiveSupport);
    }
    if !(eps_min > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon minimum must be positive, got {eps_min}")));
    }
    let mut poly = LinearFormPoly::zero(base.vars()).with_decision(base.decision_names());
    let indices = poly.extend_decision(prefix, a_plus.len());
    let mut constraints = Vec::with_capacity(a_plus.len() + 1);
    for (e, i) in a_plus.iter().zip(indices.clone()) {
        poly.add_term(e.clone(), &AffineForm::var(i));
        constraints.push(AffineForm::var(i));
    }
    constraints.push(AffineForm::from_terms(-eps_min, indices.clone().map(|i| (i, 1.0))));
    Ok(EpsilonPoly {
        poly,
        constraints,
        indices,
    })
}

/// Per-variable floors `Σ_k d_{2k·e_j} ≥ eps_min / n` over the pure even
/// powers among `terms`, for every variable that has one. Imposed on margin
/// coefficients they make the margin polynomial definite by a fixed amount
/// rather than by whatever share the solver leaves on the pure powers.
/// Returns the variables without any pure power alongside.
pub fn definiteness_constraints<'a>(
    n: usize,
    terms: impl IntoIterator<Item = (&'a Exponent, &'a AffineForm)>,
    eps_min: f64,
) -> (Vec<AffineForm>, Vec<usize>) {
    let mut rows = vec![AffineForm::constant(-eps_min / n as f64); n];
    let mut seen = vec![false; n];
    for (e, f) in terms {
        if e.is_pure_even_power() {
            let j = e.entries().iter().position(|&k| k > 0).expect("pure powers are nonzero");
            rows[j].add_scaled(f, 1.0);
            seen[j] = true;
        }
    }
    let missing = (0..n).filter(|&j| !seen[j]).collect();
    let rows = rows.into_iter().zip(seen).filter(|(_, s)| *s).map(|(r, _)| r).collect();
    (rows, missing)
}
