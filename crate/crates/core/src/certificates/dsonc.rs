use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::builder::add_dsonc;
use super::{check_split, witness_tol, SoncBlock, SoncWitness, WitnessCheck};
use crate::affine::AffineForm;
use crate::conic::{solve, solve_lp, ConicProgram, SolverSettings, Status};
use crate::error::{Error, Result};
use crate::geometry::polytope_vertices;
use crate::poly::{Exponent, LinearFormPoly, SparsePoly};

/// Tolerance on the log-space inequalities `ln(|c_β|/c_α) ≤ (α−β)ᵀτ`.
const LOG_TOL: f64 = 1e-8;
/// Tolerance on the barycentric weights carried by each block.
const LAMBDA_TOL: f64 = 1e-9;

/// One dual-circuit block: split outer coefficients `c`, direction `tau`,
/// and convex weights `lambda` on the outer exponents reproducing `beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsoncBlock {
    pub beta: Exponent,
    #[serde(with = "crate::poly::exponent_map")]
    pub c: BTreeMap<Exponent, f64>,
    pub tau: Vec<f64>,
    #[serde(with = "crate::poly::exponent_map")]
    pub lambda: BTreeMap<Exponent, f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DsoncWitness {
    pub blocks: Vec<DsoncBlock>,
}

impl DsoncWitness {
    /// The SONC witness `v^(β) = |c_β|·λ^(β)` implied by this one.
    pub fn to_sonc(&self, p: &SparsePoly) -> SoncWitness {
        SoncWitness {
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    let cb = p.coefficient(&b.beta).abs();
                    SoncBlock {
                        beta: b.beta.clone(),
                        c: b.c.clone(),
                        v: b.lambda.iter().map(|(a, l)| (a.clone(), cb * l.max(0.0))).collect(),
                    }
                })
                .collect(),
        }
    }
}

/// Independent re-check: split accounting, the τ inequalities over outer
/// terms with nonzero share, and the barycentric weights.
pub fn check_dsonc_witness(p: &SparsePoly, w: &DsoncWitness) -> WitnessCheck {
    let mut check = WitnessCheck::new(witness_tol(p));
    let tol = check.tol;
    check_split(p, w.blocks.iter().map(|b| (&b.beta, &b.c)), &mut check);
    for b in &w.blocks {
        let cb = p.coefficient(&b.beta).abs();
        if cb <= tol {
            // a vanished block: its split coefficients are plain monomial squares
            continue;
        }
        if b.tau.len() != p.nvars() || b.beta.dim() != p.nvars() {
            check.fail("block dimension differs from polynomial".into());
            continue;
        }
        for (a, &ca) in &b.c {
            if ca <= tol {
                continue;
            }
            let lhs = (cb / ca).ln();
            let rhs: f64 = a.diff(&b.beta).iter().zip(&b.tau).map(|(d, t)| d * t).sum();
            let excess = lhs - rhs;
            check.record_entropy(excess.max(0.0));
            if !(excess <= LOG_TOL) {
                check.fail(format!(
                    "log inequality violated at {:?} in block {:?} by {excess:.3e}",
                    a.entries(),
                    b.beta.entries()
                ));
            }
        }
        let mut sum = 0.0;
        let mut centroid = vec![0.0; p.nvars()];
        for (a, &l) in &b.lambda {
            if l < -LAMBDA_TOL {
                check.fail(format!("negative barycentric weight at {:?}", a.entries()));
            }
            if l > LAMBDA_TOL && b.c.get(a).copied().unwrap_or(0.0) <= tol {
                check.fail(format!("barycentric weight on empty term {:?}", a.entries()));
            }
            sum += l;
            for (k, e) in a.entries().iter().enumerate() {
                centroid[k] += l * f64::from(*e);
            }
        }
        let mut worst = (sum - 1.0).abs();
        for (k, e) in b.beta.entries().iter().enumerate() {
            worst = worst.max((centroid[k] - f64::from(*e)).abs() / (1.0 + f64::from(*e)));
        }
        check.record_balance(worst);
        if !(worst <= LAMBDA_TOL) {
            check.fail(format!(
                "barycentric weights miss block {:?} by {worst:.3e}",
                b.beta.entries()
            ));
        }
    }
    check
}

pub fn verify_dsonc_witness(p: &SparsePoly, w: &DsoncWitness) -> bool {
    check_dsonc_witness(p, w).ok
}

/// Replaces each block's direction and weights by exact LP solutions for the
/// block's actual coefficients, and drops blocks whose inner term vanished.
pub(crate) fn polish(p: &SparsePoly, w: DsoncWitness, settings: &SolverSettings) -> DsoncWitness {
    let tol = witness_tol(p);
    let blocks = w
        .blocks
        .into_iter()
        .filter(|b| p.coefficient(&b.beta).abs() > tol)
        .map(|mut b| {
            let cb = p.coefficient(&b.beta).abs();
            let active: Vec<(&Exponent, f64)> =
                b.c.iter().filter(|(_, &c)| c > tol).map(|(a, &c)| (a, c)).collect();
            if let Some(tau) = best_tau(&b.beta, cb, &active, settings) {
                b.tau = tau;
            }
            b.lambda = convex_weights(&b.beta, &active, settings).unwrap_or_default();
            b
        })
        .collect();
    DsoncWitness { blocks }
}

/// `max s` s.t. `(α−β)ᵀτ − s ≥ ln(|c_β|/c_α)`, `s ≤ 1`.
fn best_tau(
    beta: &Exponent,
    cb: f64,
    active: &[(&Exponent, f64)],
    settings: &SolverSettings,
) -> Option<Vec<f64>> {
    let mut prog = ConicProgram::new();
    let tau = prog.add_vars("tau", beta.dim());
    let s = prog.add_var("s");
    for (a, c) in active {
        let mut f = AffineForm::from_terms(-(cb / c).ln(), tau.clone().zip(a.diff(beta)));
        f.add_term(s, -1.0);
        prog.add_ineq(f);
    }
    prog.add_ineq(AffineForm::from_terms(1.0, [(s, -1.0)]));
    prog.maximize(AffineForm::var(s));
    let r = solve_lp(&prog, settings).ok()?;
    let y = r.assignment?;
    Some(y[tau].to_vec())
}

/// Convex weights on the active outer exponents reproducing `beta`.
fn convex_weights(
    beta: &Exponent,
    active: &[(&Exponent, f64)],
    settings: &SolverSettings,
) -> Option<BTreeMap<Exponent, f64>> {
    let mut prog = ConicProgram::new();
    let lam = prog.add_vars("l", active.len());
    for i in lam.clone() {
        prog.add_ineq(AffineForm::var(i));
    }
    prog.add_eq(AffineForm::from_terms(-1.0, lam.clone().map(|i| (i, 1.0))));
    for k in 0..beta.dim() {
        prog.add_eq(AffineForm::from_terms(
            -f64::from(beta.entries()[k]),
            lam.clone().zip(active).map(|(i, (a, _))| (i, f64::from(a.entries()[k]))),
        ));
    }
    let r = solve_lp(&prog, settings).ok()?;
    let y = r.assignment?;
    Some(
        active
            .iter()
            .zip(lam)
            .map(|((a, _), i)| ((*a).clone(), y[i].max(0.0)))
            .filter(|(_, l)| *l > 0.0)
            .collect(),
    )
}

fn vertices_positive(support: &[Exponent], plus: &BTreeSet<Exponent>) -> bool {
    polytope_vertices(support).iter().all(|v| plus.contains(v))
}

/// DSONC membership of a fixed polynomial. A single inner term is an LP in
/// `τ`; several inner terms share the outer coefficients through a split,
/// which is solved in the scaled relative-entropy form.
pub fn dsonc_membership(p: &SparsePoly, settings: &SolverSettings) -> Result<Option<DsoncWitness>> {
    let split = p.support_split();
    if split.a_minus.is_empty() {
        return Ok(Some(DsoncWitness::default()));
    }
    if split.a_plus.is_empty() || !vertices_positive(&p.support(), &split.a_plus) {
        return Ok(None);
    }
    let scale = p.max_abs_coef();
    let q = p.scale(1.0 / scale);
    let raw = if split.a_minus.len() == 1 {
        let beta = split.a_minus.iter().next().expect("one inner term");
        let cb = q.coefficient(beta).abs();
        let mut prog = ConicProgram::new();
        let tau = prog.add_vars("tau", p.nvars());
        for a in &split.a_plus {
            prog.add_ineq(AffineForm::from_terms(
                -(cb / q.coefficient(a)).ln(),
                tau.clone().zip(a.diff(beta)),
            ));
        }
        let r = solve_lp(&prog, settings)?;
        match r.status {
            Status::Feasible => {
                let y = r.assignment.expect("feasible results carry a point");
                DsoncWitness {
                    blocks: vec![DsoncBlock {
                        beta: beta.clone(),
                        c: split.a_plus.iter().map(|a| (a.clone(), p.coefficient(a))).collect(),
                        tau: y[tau].to_vec(),
                        lambda: BTreeMap::new(),
                    }],
                }
            }
            Status::Infeasible => return Ok(None),
            _ => return Err(Error::SolverUnknown(r.detail)),
        }
    } else {
        let terms = |set: &BTreeSet<Exponent>| -> Vec<(Exponent, AffineForm)> {
            set.iter()
                .map(|e| (e.clone(), AffineForm::constant(q.coefficient(e))))
                .collect()
        };
        let mut prog = ConicProgram::new();
        let layout = add_dsonc(&mut prog, &terms(&split.a_plus), &terms(&split.a_minus), "");
        let r = solve(&prog, settings);
        match r.status {
            Status::Feasible => layout.extract(&r.assignment.expect("feasible results carry a point"), scale),
            Status::Infeasible => return Ok(None),
            _ => return Err(Error::SolverUnknown(r.detail)),
        }
    };
    let w = polish(p, raw, settings);
    let check = check_dsonc_witness(p, &w);
    if check.ok {
        Ok(Some(w))
    } else {
        Err(Error::SolverUnknown(format!(
            "solver point failed independent verification: {}",
            check.failure.unwrap_or_default()
        )))
    }
}

/// Magnitude bounds `lo ≤ |c| ≤ hi` on template coefficients.
pub type MagnitudeBounds = BTreeMap<Exponent, (f64, f64)>;

/// Coefficient values found for a DSONC template, with their witness.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableDsonc {
    pub poly: SparsePoly,
    pub witness: DsoncWitness,
}

/// DSONC search over coefficient magnitudes in log space: with
/// `c_α = Σ_β e^{ρ^(α,β)}` and `|c_β| = e^{−σ^(β)}`, membership is the LP
/// `(α−β)ᵀτ^(β) + σ^(β) + ρ^(α,β) ≥ 0`. Terms in `plus` receive positive
/// coefficients, all others negative ones. Bounds apply per block share.
pub fn dsonc_membership_variable(
    template: &LinearFormPoly,
    plus: &BTreeSet<Exponent>,
    bounds: &MagnitudeBounds,
    settings: &SolverSettings,
) -> Result<Option<VariableDsonc>> {
    let support = template.support();
    let minus: Vec<Exponent> = support.iter().filter(|e| !plus.contains(e)).cloned().collect();
    let outer: Vec<Exponent> = support.iter().filter(|e| plus.contains(e)).cloned().collect();
    if outer.iter().any(|a| !a.is_even()) {
        return Err(Error::InvalidArgument("positive template terms must be even".into()));
    }
    if !vertices_positive(&support, plus) {
        return Ok(None);
    }
    let vars = template.vars();
    let clamp1 = |e: &Exponent| bounds.get(e).map_or(1.0, |&(lo, hi)| 1.0f64.clamp(lo, hi));
    if minus.is_empty() {
        let poly = SparsePoly::from_terms(vars, outer.iter().map(|a| (a.clone(), clamp1(a))))?;
        return Ok(Some(VariableDsonc {
            poly,
            witness: DsoncWitness::default(),
        }));
    }

    let m = minus.len() as f64;
    let mut prog = ConicProgram::new();
    let mut rho = Vec::new();
    let mut sigma = Vec::new();
    let mut taus = Vec::new();
    for (b, beta) in minus.iter().enumerate() {
        let s = prog.add_var(format!("sigma{b}"));
        let tau = prog.add_vars(&format!("tau{b}_"), beta.dim());
        if let Some(&(lo, hi)) = bounds.get(beta) {
            prog.add_ineq(AffineForm::from_terms(hi.ln(), [(s, 1.0)]));
            prog.add_ineq(AffineForm::from_terms(-lo.ln(), [(s, -1.0)]));
        }
        let mut row = Vec::new();
        for a in &outer {
            let r = prog.add_var(format!("rho{b}_{}", row.len()));
            if let Some(&(lo, hi)) = bounds.get(a) {
                prog.add_ineq(AffineForm::from_terms((hi / m).ln(), [(r, -1.0)]));
                prog.add_ineq(AffineForm::from_terms(-(lo / m).ln(), [(r, 1.0)]));
            }
            let mut f = AffineForm::from_terms(0.0, tau.clone().zip(a.diff(beta)));
            f.add_term(s, 1.0);
            f.add_term(r, 1.0);
            prog.add_ineq(f);
            row.push(r);
        }
        rho.push(row);
        sigma.push(s);
        taus.push(tau);
    }
    let r = solve_lp(&prog, settings)?;
    let y = match r.status {
        Status::Feasible => r.assignment.expect("feasible results carry a point"),
        Status::Infeasible => return Ok(None),
        _ => return Err(Error::SolverUnknown(r.detail)),
    };
    let mut terms: Vec<(Exponent, f64)> = Vec::new();
    let mut blocks = Vec::new();
    for (b, beta) in minus.iter().enumerate() {
        terms.push((beta.clone(), -(-y[sigma[b]]).exp()));
        let c: BTreeMap<Exponent, f64> = outer
            .iter()
            .zip(&rho[b])
            .map(|(a, &r)| (a.clone(), y[r].exp()))
            .collect();
        terms.extend(c.iter().map(|(a, v)| (a.clone(), *v)));
        blocks.push(DsoncBlock {
            beta: beta.clone(),
            c,
            tau: y[taus[b].clone()].to_vec(),
            lambda: BTreeMap::new(),
        });
    }
    let poly = SparsePoly::from_terms(vars, terms)?;
    let witness = polish(&poly, DsoncWitness { blocks }, settings);
    let check = check_dsonc_witness(&poly, &witness);
    if !check.ok {
        return Err(Error::SolverUnknown(format!(
            "solver point failed independent verification: {}",
            check.failure.unwrap_or_default()
        )));
    }
    Ok(Some(VariableDsonc { poly, witness }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::verify_sonc_witness;
    use crate::poly::{parse_poly, Variables};

    fn st() -> SolverSettings {
        SolverSettings::default()
    }

    fn parse(s: &str, n: usize) -> SparsePoly {
        parse_poly(s, &Variables::indexed(n)).unwrap()
    }

    #[test]
    fn half_derivative_admits_zero_direction() {
        let q = parse("x1^4 + x1^2*x3^2 - x1^2*x2 + x1^2 + x2^2 + x3^2", 3);
        let w = dsonc_membership(&q, &st()).unwrap().unwrap();
        assert_eq!(w.blocks.len(), 1);
        // τ = 0 is feasible because every outer coefficient equals |c_β| = 1
        let zero = DsoncWitness {
            blocks: vec![DsoncBlock {
                tau: vec![0.0; 3],
                ..w.blocks[0].clone()
            }],
        };
        assert!(verify_dsonc_witness(&q, &zero));
        assert!(verify_sonc_witness(&q, &w.to_sonc(&q)));
    }

    #[test]
    fn motzkin_is_not_dsonc() {
        let m = parse("x1^4*x2^2 + x1^2*x2^4 + 1 - 3*x1^2*x2^2", 2);
        assert!(dsonc_membership(&m, &st()).unwrap().is_none());
        assert!(dsonc_membership(&parse("x1^2 + x2^2", 2), &st())
            .unwrap()
            .unwrap()
            .blocks
            .is_empty());
    }

    #[test]
    fn several_inner_terms_share_outer_coefficients() {
        let q = parse("4*x1^4 + 4*x2^4 + 4 - x1*x2 - x1^2*x2 + 4*x1^2*x2^2", 2);
        let w = dsonc_membership(&q, &st()).unwrap().unwrap();
        assert_eq!(w.blocks.len(), 2);
        assert!(verify_dsonc_witness(&q, &w));
        assert!(verify_sonc_witness(&q, &w.to_sonc(&q)));
    }

    #[test]
    fn variable_templates() {
        let vars = Variables::indexed(2);
        let support = [Exponent::from([4, 0]), Exponent::from([0, 2]), Exponent::from([2, 1])];
        let t = LinearFormPoly::template(&vars, &support, "c").unwrap();
        let plus: BTreeSet<Exponent> = support[..2].iter().cloned().collect();
        let r = dsonc_membership_variable(&t, &plus, &MagnitudeBounds::new(), &st())
            .unwrap()
            .unwrap();
        assert!(verify_dsonc_witness(&r.poly, &r.witness));

        // an inner term sitting on a vertex
        let plus_bad: BTreeSet<Exponent> = [support[0].clone()].into();
        assert!(dsonc_membership_variable(&t, &plus_bad, &MagnitudeBounds::new(), &st())
            .unwrap()
            .is_none());

        let motzkin = [
            Exponent::from([4, 2]),
            Exponent::from([2, 4]),
            Exponent::from([0, 0]),
            Exponent::from([2, 2]),
        ];
        let t = LinearFormPoly::template(&vars, &motzkin, "c").unwrap();
        let plus: BTreeSet<Exponent> = motzkin[..3].iter().cloned().collect();
        let mut bounds: MagnitudeBounds = motzkin[..3].iter().map(|e| (e.clone(), (1e-6, 1.0))).collect();
        bounds.insert(motzkin[3].clone(), (3.0, 1e6));
        assert!(dsonc_membership_variable(&t, &plus, &bounds, &st()).unwrap().is_none());
    }
}
