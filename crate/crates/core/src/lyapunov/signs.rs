//! Sign distribution for the coefficients of `V` and `−V̇`, and redundancy
//! pruning of the resulting linear constraints.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::affine::AffineForm;
use crate::conic::{solve_lp, ConicProgram, SolverSettings, Status};
use crate::error::{Error, Result};
use crate::geometry::polytope_vertices;
use crate::poly::{Exponent, LinearFormPoly};

/// A constraint whose maximal violation stays below this is redundant.
pub const REDUNDANCY_THRESHOLD: f64 = 1e-3;

/// Sign class of every exponent in one polynomial's support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignClasses {
    /// Odd Newton-polytope vertices; coefficient pinned to zero.
    pub zero: BTreeSet<Exponent>,
    pub nonneg: BTreeSet<Exponent>,
    /// Even non-vertices under the `interior_negative` option.
    pub nonpos: BTreeSet<Exponent>,
    pub free: BTreeSet<Exponent>,
}

impl SignClasses {
    /// Terms that enter a certificate as inner terms.
    pub fn minus(&self) -> impl Iterator<Item = &Exponent> + '_ {
        self.nonpos.iter().chain(&self.free)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SignConstraintSet {
    pub v: SignClasses,
    pub dv: SignClasses,
    /// `f = 0` for every pinned coefficient.
    pub equalities: Vec<AffineForm>,
    /// `f ≥ 0`, after pruning.
    pub inequalities: Vec<AffineForm>,
    /// Inequalities dropped as redundant.
    pub pruned: Vec<AffineForm>,
    /// A constraint on constant coefficients is violated outright.
    pub contradictory: bool,
}

/// Steps (1)–(5): pin odd hull vertices, make even exponents nonnegative
/// (or, with `interior_negative`, nonpositive off the reduced hull's
/// vertices), then prune redundant inequalities. Even terms with a fixed
/// coefficient are classed by its sign instead.
pub fn distribute_signs(
    p: &LinearFormPoly,
    q: &LinearFormPoly,
    interior_negative: bool,
    settings: &SolverSettings,
) -> Result<SignConstraintSet> {
    let v = classify(p, interior_negative);
    if v.nonneg.is_empty() {
        return Err(Error::EmptyPositiveSupport);
    }
    let dv = classify(q, interior_negative);

    let mut out = SignConstraintSet {
        v,
        dv,
        ..Default::default()
    };
    let mut candidates = Vec::new();
    for (poly, classes) in [(p, &out.v), (q, &out.dv)] {
        for e in &classes.zero {
            out.equalities.push(poly.coefficient(e));
        }
        for e in &classes.nonneg {
            candidates.push(poly.coefficient(e));
        }
        for e in &classes.nonpos {
            candidates.push(poly.coefficient(e).negated());
        }
    }

    // fixed coefficients are judged up to rounding in their own scale
    let scale = p
        .terms()
        .chain(q.terms())
        .map(|(_, f)| f.constant_part().abs())
        .fold(1.0, f64::max);
    let const_tol = crate::certificates::WITNESS_TOL * scale;
    let mut equalities = Vec::new();
    for f in std::mem::take(&mut out.equalities) {
        if f.is_constant() {
            out.contradictory |= f.constant_part().abs() > const_tol;
        } else {
            equalities.push(f);
        }
    }
    out.equalities = equalities;
    let mut variable = Vec::new();
    for f in candidates {
        if f.is_constant() {
            out.contradictory |= f.constant_part() < -const_tol;
        } else {
            variable.push(f);
        }
    }
    let as_le: Vec<AffineForm> = variable.iter().map(AffineForm::negated).collect();
    let kept: BTreeSet<usize> = reduce_redundant(&as_le, &out.equalities, settings)
        .into_iter()
        .collect();
    for (i, f) in variable.into_iter().enumerate() {
        if kept.contains(&i) {
            out.inequalities.push(f);
        } else {
            out.pruned.push(f);
        }
    }
    Ok(out)
}

fn classify(p: &LinearFormPoly, interior_negative: bool) -> SignClasses {
    let support = p.support();
    let mut classes = SignClasses::default();
    if support.is_empty() {
        return classes;
    }
    let hull0 = polytope_vertices(&support);
    classes.zero = hull0.iter().filter(|e| !e.is_even()).cloned().collect();
    let reduced: Vec<Exponent> = support.iter().filter(|e| !classes.zero.contains(e)).cloned().collect();
    let hull1: BTreeSet<Exponent> = if interior_negative {
        polytope_vertices(&reduced).into_iter().collect()
    } else {
        BTreeSet::new()
    };
    for e in reduced {
        let form = p.coefficient(&e);
        if !e.is_even() {
            classes.free.insert(e);
        } else if form.is_constant() {
            // a fixed coefficient carries its own sign
            if form.constant_part() < 0.0 {
                classes.nonpos.insert(e);
            } else {
                classes.nonneg.insert(e);
            }
        } else if interior_negative && !hull1.contains(&e) {
            classes.nonpos.insert(e);
        } else {
            classes.nonneg.insert(e);
        }
    }
    classes
}

/// Prunes an ordered list of constraints `g_j ≤ 0`: the first is kept, and
/// each later `g_j` is kept iff `max g_j` subject to the kept ones (and the
/// equalities `h = 0`) reaches [`REDUNDANCY_THRESHOLD`]. Unbounded or
/// inconclusive subproblems keep the constraint. Returns kept indices.
pub fn reduce_redundant(
    constraints: &[AffineForm],
    equalities: &[AffineForm],
    settings: &SolverSettings,
) -> Vec<usize> {
    let nvars = constraints
        .iter()
        .chain(equalities)
        .map(AffineForm::var_bound)
        .max()
        .unwrap_or(0);
    let mut kept: Vec<usize> = Vec::new();
    for (j, g) in constraints.iter().enumerate() {
        if kept.is_empty() {
            kept.push(j);
            continue;
        }
        let mut prog = ConicProgram::new();
        prog.add_vars("y", nvars);
        for h in equalities {
            prog.add_eq(h.clone());
        }
        for &k in &kept {
            prog.add_ineq(constraints[k].negated());
        }
        prog.maximize(g.clone());
        let keep = match solve_lp(&prog, settings) {
            Ok(r) => match r.status {
                Status::Feasible => r.objective_value.is_none_or(|v| v >= REDUNDANCY_THRESHOLD),
                Status::Unbounded | Status::Unknown => true,
                // an empty kept set makes every constraint redundant; keep it anyway
                Status::Infeasible => true,
            },
            Err(_) => true,
        };
        if keep {
            kept.push(j);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{lie_derivative_symbolic, DynSystem, Variables};

    fn st() -> SolverSettings {
        SolverSettings::default()
    }

    fn c(i: usize) -> AffineForm {
        AffineForm::var(i)
    }

    #[test]
    fn pruning_examples() {
        assert_eq!(reduce_redundant(&[c(0), c(0).scaled(2.0)], &[], &st()), vec![0]);
        assert_eq!(reduce_redundant(&[c(0), c(1), c(0).plus(&c(1))], &[], &st()), vec![0, 1]);
        let shifted = AffineForm::from_terms(-1e-4, [(0, 1.0)]);
        assert_eq!(reduce_redundant(&[c(0), shifted], &[], &st()), vec![0]);
        assert_eq!(reduce_redundant(&[c(0), c(0)], &[], &st()), vec![0]);
        // independent constraints stay
        assert_eq!(reduce_redundant(&[c(0), c(0).negated()], &[], &st()), vec![0, 1]);
    }

    fn example_33() -> (LinearFormPoly, LinearFormPoly) {
        let vars = Variables::indexed(3);
        let f = DynSystem::parse(&vars, &["-x1^3 - x1 - x1*x3^2", "x1^2 - x2", "-x3"]).unwrap();
        let support: Vec<Exponent> = (0..3).map(|j| Exponent::unit(3, j, 2)).collect();
        let v = LinearFormPoly::template(&vars, &support, "c").unwrap();
        let d = lie_derivative_symbolic(&v, &f).unwrap().scale(-1.0);
        (v, d)
    }

    #[test]
    fn example_33_signs() {
        let (v, d) = example_33();
        let s = distribute_signs(&v, &d, false, &st()).unwrap();
        assert!(s.v.zero.is_empty() && s.dv.zero.is_empty());
        assert_eq!(s.v.nonneg.len(), 3);
        assert_eq!(s.dv.free, [Exponent::from([2, 1, 0])].into());
        assert_eq!(s.dv.nonneg.len(), 5);
        // d ≥ 0 on the pure squares repeats c ≥ 0
        assert_eq!(s.inequalities.len(), 3);
        assert!(!s.contradictory);
    }

    #[test]
    fn odd_vertex_is_pinned() {
        let vars = Variables::indexed(1);
        let mut p = LinearFormPoly::zero(&vars);
        let idx = p.extend_decision("c", 2);
        p.add_term(Exponent::from([1]), &AffineForm::var(idx.start));
        p.add_term(Exponent::from([2]), &AffineForm::var(idx.start + 1));
        let s = distribute_signs(&p, &LinearFormPoly::zero(&vars), false, &st()).unwrap();
        assert_eq!(s.v.zero, [Exponent::from([1])].into());
        assert_eq!(s.equalities, vec![AffineForm::var(0)]);
        assert_eq!(s.v.nonneg, [Exponent::from([2])].into());
    }

    #[test]
    fn odd_only_support_is_rejected() {
        let vars = Variables::indexed(1);
        let p = LinearFormPoly::template(&vars, &[Exponent::from([1]), Exponent::from([3])], "c").unwrap();
        assert_eq!(
            distribute_signs(&p, &LinearFormPoly::zero(&vars), false, &st()),
            Err(Error::EmptyPositiveSupport)
        );
    }

    #[test]
    fn fixed_negative_even_term_is_inner() {
        let vars = Variables::indexed(2);
        let p = LinearFormPoly::from_poly(
            &crate::poly::parse_poly("x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2", &vars).unwrap(),
        );
        let s = distribute_signs(&p, &LinearFormPoly::zero(&vars), false, &st()).unwrap();
        assert_eq!(s.v.nonpos, [Exponent::from([2, 2])].into());
        assert!(!s.contradictory);
    }

    #[test]
    fn reapplying_changes_nothing() {
        let (v, d) = example_33();
        let s = distribute_signs(&v, &d, false, &st()).unwrap();
        let s2 = distribute_signs(&v, &d, false, &st()).unwrap();
        assert_eq!(s, s2);
    }
}
