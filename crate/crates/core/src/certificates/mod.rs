//! Nonnegativity certificates: circuit-number tests, SONC membership via
//! relative-entropy programs and DSONC membership via (log-)linear programs.
//!
//! Fixed-coefficient membership tests return witnesses that
//! [`verify_sonc_witness`] / [`verify_dsonc_witness`] re-check without a
//! solver. A witness is only ever handed out after it has passed that check.

pub(crate) mod builder;
mod circuit;
mod counterexample;
pub(crate) mod dsonc;
mod sonc;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::poly::{Exponent, SparsePoly};

pub use builder::{DsoncLayout, SoncLayout};
pub use circuit::{circuit_number, is_nonneg_circuit};
pub use counterexample::{find_negative_point, NegativePoint};
pub use dsonc::{
    check_dsonc_witness, dsonc_membership, dsonc_membership_variable, verify_dsonc_witness,
    DsoncBlock, DsoncWitness, MagnitudeBounds, VariableDsonc,
};
pub use sonc::{check_sonc_witness, sonc_membership, verify_sonc_witness, SoncBlock, SoncWitness};

/// Relative part of the witness tolerance.
pub const WITNESS_TOL: f64 = 1e-8;

/// Absolute tolerance for verifying a witness of `p`: `10⁻⁸·max(1, max|c|)`.
pub fn witness_tol(p: &SparsePoly) -> f64 {
    WITNESS_TOL * p.max_abs_coef().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Sonc,
    Dsonc,
    Circuit,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateKind::Sonc => "sonc",
            CertificateKind::Dsonc => "dsonc",
            CertificateKind::Circuit => "circuit",
        })
    }
}

impl FromStr for CertificateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "sonc" => Ok(CertificateKind::Sonc),
            "dsonc" => Ok(CertificateKind::Dsonc),
            "circuit" => Ok(CertificateKind::Circuit),
            other => Err(Error::InvalidArgument(format!("unknown certificate kind `{other}`"))),
        }
    }
}

/// Outcome of an independent witness check, with the worst residual per group.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub ok: bool,
    pub tol: f64,
    /// Worst shortfall in `Σ_β c^(β)_α ≤ c_α` and odd/negative leftovers.
    pub split: f64,
    /// Worst violation of the per-block entropy or τ inequalities.
    pub entropy: f64,
    /// Worst violation of the per-block balance (or barycentric) equations.
    pub balance: f64,
    /// First failed condition, if any.
    pub failure: Option<String>,
}

impl WitnessCheck {
    fn new(tol: f64) -> Self {
        Self {
            ok: true,
            tol,
            ..Self::default()
        }
    }

    fn fail(&mut self, msg: String) {
        if self.ok {
            self.ok = false;
            self.failure = Some(msg);
        }
    }

    fn record_split(&mut self, v: f64) {
        self.split = self.split.max(v);
    }

    fn record_entropy(&mut self, v: f64) {
        self.entropy = self.entropy.max(v);
    }

    fn record_balance(&mut self, v: f64) {
        self.balance = self.balance.max(v);
    }
}

/// Checks that the blocks' outer coefficients fit inside `p`.
///
/// With `used_γ = Σ_β c^(β)_γ`, every exponent's leftover
/// `p_γ − used_γ − [γ is a block's inner term]·p_γ` must be nonnegative and,
/// unless negligible, sit on an even exponent; such leftovers are monomial
/// squares. Block inner terms must be distinct, and inner terms of `p` that
/// are not covered by a block must be negligible.
fn check_split<'a>(
    p: &SparsePoly,
    blocks: impl Iterator<Item = (&'a Exponent, &'a BTreeMap<Exponent, f64>)>,
    check: &mut WitnessCheck,
) {
    let tol = check.tol;
    let mut used: BTreeMap<Exponent, f64> = BTreeMap::new();
    let mut inner: BTreeSet<Exponent> = BTreeSet::new();
    for (beta, c) in blocks {
        if !inner.insert(beta.clone()) {
            check.fail(format!("inner exponent {:?} appears in two blocks", beta.entries()));
        }
        for (alpha, &v) in c {
            if !alpha.is_even() {
                check.fail(format!("outer exponent {:?} is not even", alpha.entries()));
            }
            if v < -tol {
                check.record_split(-v);
                check.fail(format!("negative split coefficient at {:?}", alpha.entries()));
            }
            *used.entry(alpha.clone()).or_insert(0.0) += v.max(0.0);
        }
    }
    let mut exps: BTreeSet<Exponent> = p.support().into_iter().collect();
    exps.extend(used.keys().cloned());
    exps.extend(inner.iter().cloned());
    for gamma in exps {
        let pg = p.coefficient(&gamma);
        let covered = if inner.contains(&gamma) { pg } else { 0.0 };
        let leftover = pg - used.get(&gamma).copied().unwrap_or(0.0) - covered;
        if leftover < -tol {
            check.record_split(-leftover);
            check.fail(format!(
                "split exceeds coefficient at {:?} by {:.3e}",
                gamma.entries(),
                -leftover
            ));
        } else if leftover.abs() > tol && !gamma.is_even() {
            check.record_split(leftover.abs());
            check.fail(format!("uncovered odd term at {:?}", gamma.entries()));
        }
    }
}
