//! Polynomials whose coefficients are affine forms in decision variables.

use std::collections::BTreeMap;
use std::ops::Range;

use super::{DynSystem, Exponent, SparsePoly, Variables};
use crate::affine::AffineForm;
use crate::error::{Error, Result};

/// `Σ_α d_α(y) x^α` with each `d_α` affine in the decision vector `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFormPoly {
    vars: Variables,
    decision: Vec<String>,
    terms: BTreeMap<Exponent, AffineForm>,
}

impl LinearFormPoly {
    pub fn zero(vars: &Variables) -> Self {
        Self {
            vars: vars.clone(),
            decision: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    /// `Σ_i c_i x^{α_i}` with one fresh decision variable `prefix{i}` per exponent.
    pub fn template(vars: &Variables, support: &[Exponent], prefix: &str) -> Result<Self> {
        let mut p = Self::zero(vars);
        let idx = p.extend_decision(prefix, support.len());
        for (e, i) in support.iter().zip(idx) {
            if e.dim() != vars.len() {
                return Err(Error::DimensionMismatch {
                    expected: vars.len(),
                    found: e.dim(),
                });
            }
            p.add_term(e.clone(), &AffineForm::var(i));
        }
        Ok(p)
    }

    /// Constant-coefficient embedding of `p`.
    pub fn from_poly(p: &SparsePoly) -> Self {
        let mut out = Self::zero(p.vars());
        for (e, c) in p.terms() {
            out.terms.insert(e.clone(), AffineForm::constant(c));
        }
        out
    }

    /// Appends `count` decision variables named `prefix1..`, returning their indices.
    pub fn extend_decision(&mut self, prefix: &str, count: usize) -> Range<usize> {
        let start = self.decision.len();
        for k in 1..=count {
            self.decision.push(format!("{prefix}{k}"));
        }
        start..start + count
    }

    /// Adopts a (longer) decision list so polynomials built separately share indices.
    pub fn with_decision(mut self, names: &[String]) -> Self {
        debug_assert!(names.len() >= self.decision.len());
        self.decision = names.to_vec();
        self
    }

    pub fn vars(&self) -> &Variables {
        &self.vars
    }

    pub fn decision_names(&self) -> &[String] {
        &self.decision
    }

    pub fn num_decision(&self) -> usize {
        self.decision.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &AffineForm)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponent) -> AffineForm {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Exponent, form: &AffineForm) {
        let entry = self.terms.entry(e.clone()).or_default();
        entry.add_scaled(form, 1.0);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &LinearFormPoly) -> Result<LinearFormPoly> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch {
                left: self.vars.names().to_vec(),
                right: other.vars.names().to_vec(),
            });
        }
        let mut out = self.clone();
        if other.decision.len() > out.decision.len() {
            out.decision = other.decision.clone();
        }
        for (e, f) in &other.terms {
            out.add_term(e.clone(), f);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LinearFormPoly) -> Result<LinearFormPoly> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> LinearFormPoly {
        let mut out = Self {
            vars: self.vars.clone(),
            decision: self.decision.clone(),
            terms: BTreeMap::new(),
        };
        for (e, f) in &self.terms {
            out.add_term(e.clone(), &f.scaled(factor));
        }
        out
    }

    /// Evaluates every coefficient form at `y`.
    pub fn substitute(&self, y: &[f64]) -> SparsePoly {
        SparsePoly::from_terms(&self.vars, self.terms.iter().map(|(e, f)| (e.clone(), f.eval(y))))
            .expect("exponent dimensions are checked on insertion")
    }
}

/// `V̇` for a variable-coefficient `V`; each output coefficient is affine in
/// `V`'s decision variables.
pub fn lie_derivative_symbolic(v: &LinearFormPoly, f: &DynSystem) -> Result<LinearFormPoly> {
    if v.vars != *f.vars() {
        return Err(Error::VariableMismatch {
            left: v.vars.names().to_vec(),
            right: f.vars().names().to_vec(),
        });
    }
    let mut out = LinearFormPoly {
        vars: v.vars.clone(),
        decision: v.decision.clone(),
        terms: BTreeMap::new(),
    };
    for (j, fj) in f.rhs().iter().enumerate() {
        for (alpha, form) in &v.terms {
            let k = alpha.entries()[j];
            if k == 0 {
                continue;
            }
            let mut reduced = alpha.entries().to_vec();
            reduced[j] -= 1;
            let reduced = Exponent::new(reduced);
            for (gamma, c) in fj.terms() {
                out.add_term(reduced.add(gamma), &form.scaled(f64::from(k) * c));
            }
        }
    }
    Ok(out)
}
