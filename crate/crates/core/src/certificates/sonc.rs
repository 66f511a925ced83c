use std::collections::BTreeMap;
use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use super::builder::add_sonc;
use super::{check_split, witness_tol, WitnessCheck};
use crate::affine::AffineForm;
use crate::conic::{solve, ConicProgram, SolverSettings, Status};
use crate::error::{Error, Result};
use crate::poly::{Exponent, SparsePoly};

/// One AM/GM block: outer coefficients `c` and entropy weights `v` for the
/// inner term `beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoncBlock {
    pub beta: Exponent,
    #[serde(with = "crate::poly::exponent_map")]
    pub c: BTreeMap<Exponent, f64>,
    #[serde(with = "crate::poly::exponent_map")]
    pub v: BTreeMap<Exponent, f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SoncWitness {
    pub blocks: Vec<SoncBlock>,
}

impl SoncWitness {
    pub fn scaled(&self, factor: f64) -> SoncWitness {
        let scale = |m: &BTreeMap<Exponent, f64>| m.iter().map(|(k, v)| (k.clone(), v * factor)).collect();
        SoncWitness {
            blocks: self
                .blocks
                .iter()
                .map(|b| SoncBlock {
                    beta: b.beta.clone(),
                    c: scale(&b.c),
                    v: scale(&b.v),
                })
                .collect(),
        }
    }

    /// Drops blocks whose inner coefficient in `p` vanished and which carry no weight.
    pub(crate) fn prune(mut self, p: &SparsePoly) -> SoncWitness {
        let tol = witness_tol(p);
        self.blocks
            .retain(|b| p.coefficient(&b.beta).abs() > tol || b.v.values().any(|&v| v > tol));
        self
    }
}

/// `Σ v ln(v / (e·c))` with `0·ln 0 = 0`; infinite when `v > 0 = c`.
fn entropy(b: &SoncBlock) -> f64 {
    b.v.iter()
        .map(|(a, &v)| {
            if v <= 0.0 {
                return 0.0;
            }
            let c = b.c.get(a).copied().unwrap_or(0.0);
            if c <= 0.0 {
                f64::INFINITY
            } else {
                v * (v / (E * c)).ln()
            }
        })
        .sum()
}

/// Independent re-check of the split, entropy and balance conditions.
pub fn check_sonc_witness(p: &SparsePoly, w: &SoncWitness) -> WitnessCheck {
    let mut check = WitnessCheck::new(witness_tol(p));
    let tol = check.tol;
    check_split(p, w.blocks.iter().map(|b| (&b.beta, &b.c)), &mut check);
    for b in &w.blocks {
        if b.beta.dim() != p.nvars() {
            check.fail("block dimension differs from polynomial".into());
            continue;
        }
        if let Some((a, _)) = b.v.iter().find(|(_, &v)| v < -tol) {
            check.fail(format!("negative weight at {:?}", a.entries()));
        }
        let excess = entropy(b) + p.coefficient(&b.beta).abs();
        check.record_entropy(excess.max(0.0));
        if !(excess <= tol) {
            check.fail(format!(
                "entropy bound violated for block {:?} by {excess:.3e}",
                b.beta.entries()
            ));
        }
        for coord in 0..p.nvars() {
            let r: f64 = b
                .v
                .iter()
                .map(|(a, &v)| v * (f64::from(a.entries()[coord]) - f64::from(b.beta.entries()[coord])))
                .sum();
            check.record_balance(r.abs());
            if !(r.abs() <= tol) {
                check.fail(format!(
                    "balance violated for block {:?} in coordinate {coord} by {:.3e}",
                    b.beta.entries(),
                    r.abs()
                ));
            }
        }
    }
    check
}

pub fn verify_sonc_witness(p: &SparsePoly, w: &SoncWitness) -> bool {
    check_sonc_witness(p, w).ok
}

/// SONC membership of a fixed polynomial. `Ok(None)` means the solver
/// certified that no certificate over the support split exists.
pub fn sonc_membership(p: &SparsePoly, settings: &SolverSettings) -> Result<Option<SoncWitness>> {
    let split = p.support_split();
    if split.a_minus.is_empty() {
        return Ok(Some(SoncWitness::default()));
    }
    if split.a_plus.is_empty() {
        return Ok(None);
    }
    let scale = p.max_abs_coef();
    let q = p.scale(1.0 / scale);
    let terms = |set: &std::collections::BTreeSet<Exponent>| -> Vec<(Exponent, AffineForm)> {
        set.iter()
            .map(|e| (e.clone(), AffineForm::constant(q.coefficient(e))))
            .collect()
    };
    let mut prog = ConicProgram::new();
    let layout = add_sonc(&mut prog, &terms(&split.a_plus), &terms(&split.a_minus), "");
    let r = solve(&prog, settings);
    match r.status {
        Status::Feasible => {
            let y = r.assignment.expect("feasible results carry a point");
            let w = layout.extract(&y, scale).prune(p);
            let check = check_sonc_witness(p, &w);
            if check.ok {
                Ok(Some(w))
            } else {
                Err(Error::SolverUnknown(format!(
                    "solver point failed independent verification: {}",
                    check.failure.unwrap_or_default()
                )))
            }
        }
        Status::Infeasible => Ok(None),
        Status::Unbounded | Status::Unknown => Err(Error::SolverUnknown(r.detail)),
    }
}
