//! Newton-polytope queries over lattice point sets.
//!
//! All hull questions are answered with small LPs rather than facet
//! enumeration; supports here have at most a few hundred points.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::affine::AffineForm;
use crate::conic::{solve_lp, ConicProgram, SolverSettings, Status};
use crate::error::{Error, Result};
use crate::poly::Exponent;

/// L1 distance to the hull of the other points above which a point is a vertex.
const VERTEX_GAP: f64 = 1e-7;
/// Minimum barycentric weight for strict interiority.
pub const INTERIOR_TOL: f64 = 1e-9;
/// Residual accepted by [`barycentric`].
const AFFINE_TOL: f64 = 1e-9;

/// Outer vertices, optional inner point and its barycentric weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitStructure {
    pub outer: Vec<Exponent>,
    pub inner: Option<Exponent>,
    /// Weight of each outer point; empty when there is no inner point.
    #[serde(with = "crate::poly::exponent_map")]
    pub lambda: BTreeMap<Exponent, f64>,
}

fn settings() -> SolverSettings {
    SolverSettings::default()
}

fn dedup(points: &[Exponent]) -> Vec<Exponent> {
    points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Vertices of `conv(points)`, sorted.
pub fn polytope_vertices(points: &[Exponent]) -> Vec<Exponent> {
    let pts = dedup(points);
    if pts.len() <= 2 {
        return pts;
    }
    pts.iter()
        .enumerate()
        .filter(|(k, _)| distance_to_others(&pts, *k) > VERTEX_GAP)
        .map(|(_, p)| p.clone())
        .collect()
}

/// `min ‖Σ λ_j p_j − p_k‖₁` over the simplex on the points other than `p_k`.
fn distance_to_others(pts: &[Exponent], k: usize) -> f64 {
    let target = &pts[k];
    let others: Vec<&Exponent> = pts.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, p)| p).collect();
    let dim = target.dim();
    let mut prog = ConicProgram::new();
    let lam = prog.add_vars("l", others.len());
    let slack = prog.add_vars("t", dim);
    for i in lam.clone() {
        prog.add_ineq(AffineForm::var(i));
    }
    prog.add_eq(AffineForm::from_terms(-1.0, lam.clone().map(|i| (i, 1.0))));
    for (coord, t) in slack.clone().enumerate() {
        let gap = AffineForm::from_terms(
            -f64::from(target.entries()[coord]),
            lam.clone()
                .zip(&others)
                .map(|(i, p)| (i, f64::from(p.entries()[coord]))),
        );
        prog.add_ineq(AffineForm::var(t).minus(&gap));
        prog.add_ineq(AffineForm::var(t).plus(&gap));
    }
    prog.minimize(AffineForm::from_terms(0.0, slack.map(|t| (t, 1.0))));
    match solve_lp(&prog, &settings()) {
        Ok(r) if r.status == Status::Feasible => r.objective_value.unwrap_or(f64::INFINITY),
        // the program is always feasible and bounded; treat failure as "vertex"
        // so that no point is silently dropped from a hull
        _ => f64::INFINITY,
    }
}

/// True iff `beta` lies in the relative interior of `conv(points)`.
pub fn is_strict_interior(beta: &Exponent, points: &[Exponent]) -> bool {
    let mut all = dedup(points);
    all.push(beta.clone());
    let verts = polytope_vertices(&all);
    if verts.contains(beta) {
        return false;
    }
    max_min_weight(beta, &verts).is_some_and(|s| s > INTERIOR_TOL)
}

/// `max s` s.t. `β = Σ λ_v v`, `Σ λ = 1`, `λ_v ≥ s`.
fn max_min_weight(beta: &Exponent, verts: &[Exponent]) -> Option<f64> {
    let mut prog = ConicProgram::new();
    let lam = prog.add_vars("l", verts.len());
    let s = prog.add_var("s");
    for i in lam.clone() {
        prog.add_ineq(AffineForm::var(i).minus(&AffineForm::var(s)));
    }
    prog.add_ineq(AffineForm::from_terms(1.0, [(s, -1.0)]));
    prog.add_eq(AffineForm::from_terms(-1.0, lam.clone().map(|i| (i, 1.0))));
    for coord in 0..beta.dim() {
        prog.add_eq(AffineForm::from_terms(
            -f64::from(beta.entries()[coord]),
            lam.clone()
                .zip(verts)
                .map(|(i, v)| (i, f64::from(v.entries()[coord]))),
        ));
    }
    prog.maximize(AffineForm::var(s));
    match solve_lp(&prog, &settings()) {
        Ok(r) if r.status == Status::Feasible => r.objective_value,
        _ => None,
    }
}

/// Affine independence of `points` (rank of the difference matrix).
pub fn affinely_independent(points: &[Exponent]) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let dim = points[0].dim();
    if points.len() - 1 > dim {
        return false;
    }
    let base = points[0].as_f64();
    let diffs = DMatrix::from_fn(dim, points.len() - 1, |r, c| {
        f64::from(points[c + 1].entries()[r]) - base[r]
    });
    diffs.rank(1e-9) == points.len() - 1
}

/// Unique affine coordinates of `beta` with respect to affinely independent `outer`.
pub fn barycentric(beta: &Exponent, outer: &[Exponent]) -> Result<Vec<f64>> {
    if outer.is_empty() || !affinely_independent(outer) {
        return Err(Error::NotInAffineHull);
    }
    let dim = beta.dim();
    let k = outer.len();
    let m = DMatrix::from_fn(dim + 1, k, |r, c| {
        if r < dim {
            f64::from(outer[c].entries()[r])
        } else {
            1.0
        }
    });
    let mut rhs = beta.as_f64();
    rhs.push(1.0);
    let rhs = DVector::from_vec(rhs);
    let lambda = m
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|_| Error::NotInAffineHull)?;
    if (&m * &lambda - &rhs).amax() > AFFINE_TOL {
        return Err(Error::NotInAffineHull);
    }
    Ok(lambda.iter().copied().collect())
}

/// Recognizes a simplicial circuit: even affinely independent vertices plus at
/// most one point in the relative interior of their simplex.
pub fn detect_circuit(points: &[Exponent]) -> Option<CircuitStructure> {
    let pts = dedup(points);
    if pts.is_empty() {
        return None;
    }
    let outer = polytope_vertices(&pts);
    if !outer.iter().all(Exponent::is_even) || !affinely_independent(&outer) {
        return None;
    }
    let rest: Vec<&Exponent> = pts.iter().filter(|p| !outer.contains(p)).collect();
    match rest.as_slice() {
        [] => Some(CircuitStructure {
            outer,
            inner: None,
            lambda: BTreeMap::new(),
        }),
        [beta] => {
            let lambda = barycentric(beta, &outer).ok()?;
            if lambda.iter().any(|&l| l <= INTERIOR_TOL) {
                return None;
            }
            Some(CircuitStructure {
                lambda: outer.iter().cloned().zip(lambda).collect(),
                inner: Some((*beta).clone()),
                outer,
            })
        }
        _ => None,
    }
}
