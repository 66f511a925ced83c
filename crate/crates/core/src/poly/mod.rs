//! Sparse multivariate polynomials with real coefficients.
//!
//! Every polynomial carries its ordered variable list; binary operations
//! require identical lists. Coefficients below [`ZERO_TOL`] in magnitude are
//! dropped after every operation, so the stored term map is exactly the
//! support.

mod linear;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use crate::affine::ZERO_TOL;
use crate::error::{Error, Result};
pub use linear::{lie_derivative_symbolic, LinearFormPoly};
pub use parse::parse_poly;

/// Multi-index `α ∈ ℕⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `power · e_j` in `n` variables.
    pub fn unit(n: usize, j: usize, power: u32) -> Self {
        let mut e = vec![0; n];
        e[j] = power;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Membership in `(2ℕ)ⁿ`.
    pub fn is_even(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// True for `2k·e_j`, k ≥ 1.
    pub fn is_pure_even_power(&self) -> bool {
        self.is_even() && self.0.iter().filter(|&&e| e > 0).count() == 1
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&e| f64::from(e)).collect()
    }

    /// `self − other` as a real vector.
    pub fn diff(&self, other: &Exponent) -> Vec<f64> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| f64::from(a) - f64::from(b))
            .collect()
    }

    /// `x^α`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }

    fn render(&self, vars: &[String]) -> String {
        let factors: Vec<String> = self
            .0
            .iter()
            .zip(vars)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        factors.join("*")
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for Exponent {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

/// Ordered variable names shared by polynomials built over the same ring.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Variables(Arc<Vec<String>>);

impl Variables {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Self {
        Self(Arc::new(names.into_iter().map(Into::into).collect()))
    }

    /// `x1, …, xn`.
    pub fn indexed(n: usize) -> Self {
        Self::new((1..=n).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }

    pub fn check_same(&self, other: &Variables) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VariableMismatch {
                left: self.0.to_vec(),
                right: other.0.to_vec(),
            })
        }
    }
}

impl PartialEq for Variables {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

/// Serde adapter writing `BTreeMap<Exponent, f64>` as a list of pairs, since
/// exponents cannot be JSON object keys.
pub mod exponent_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    use super::Exponent;

    pub fn serialize<S: Serializer>(m: &BTreeMap<Exponent, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Exponent, f64>, D::Error> {
        Ok(Vec::<(Exponent, f64)>::deserialize(d)?.into_iter().collect())
    }
}

/// `p(x) = Σ c_α x^α` with only nonzero coefficients stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PolyRepr", try_from = "PolyRepr")]
pub struct SparsePoly {
    vars: Variables,
    terms: BTreeMap<Exponent, f64>,
}

/// Serialized form: variable names and a term list.
#[derive(Serialize, Deserialize)]
struct PolyRepr {
    vars: Vec<String>,
    terms: Vec<(Exponent, f64)>,
}

impl From<SparsePoly> for PolyRepr {
    fn from(p: SparsePoly) -> Self {
        Self {
            vars: p.vars.names().to_vec(),
            terms: p.terms.into_iter().collect(),
        }
    }
}

impl TryFrom<PolyRepr> for SparsePoly {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        SparsePoly::from_terms(&Variables::new(r.vars), r.terms)
    }
}

impl SparsePoly {
    pub fn zero(vars: &Variables) -> Self {
        Self {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Variables, value: f64) -> Self {
        Self::monomial(vars, Exponent::zero(vars.len()), value)
    }

    /// The coordinate polynomial `x_j`.
    pub fn var(vars: &Variables, j: usize) -> Self {
        Self::monomial(vars, Exponent::unit(vars.len(), j, 1), 1.0)
    }

    pub fn monomial(vars: &Variables, exponent: Exponent, coef: f64) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(exponent, coef);
        p
    }

    /// Builds a polynomial from possibly repeated terms; like terms are merged.
    pub fn from_terms<I>(vars: &Variables, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, f64)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            if e.dim() != vars.len() {
                return Err(Error::DimensionMismatch {
                    expected: vars.len(),
                    found: e.dim(),
                });
            }
            p.accumulate(e, c);
        }
        p.normalize();
        Ok(p)
    }

    pub fn vars(&self) -> &Variables {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coefficient(&self, exponent: &Exponent) -> f64 {
        self.terms.get(exponent).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Exponent::zero(self.nvars()))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: x.len(),
            });
        }
        Ok(self.terms.iter().map(|(e, c)| c * e.monomial(x)).sum())
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.vars.check_same(&other.vars)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.accumulate(e.clone(), c);
        }
        out.normalize();
        Ok(out)
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> SparsePoly {
        let mut out = Self::zero(&self.vars);
        for (e, &c) in &self.terms {
            out.accumulate(e.clone(), factor * c);
        }
        out.normalize();
        out
    }

    pub fn neg(&self) -> SparsePoly {
        self.scale(-1.0)
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.vars.check_same(&other.vars)?;
        let mut out = Self::zero(&self.vars);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.accumulate(a.add(b), ca * cb);
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut out = Self::constant(&self.vars, 1.0);
        for _ in 0..k {
            out = out.mul(self).expect("same ring");
        }
        out
    }

    /// `∂p/∂x_j`.
    pub fn derivative(&self, j: usize) -> SparsePoly {
        let mut out = Self::zero(&self.vars);
        for (e, &c) in &self.terms {
            let k = e.0[j];
            if k > 0 {
                let mut d = e.clone();
                d.0[j] -= 1;
                out.accumulate(d, c * f64::from(k));
            }
        }
        out.normalize();
        out
    }

    /// Positive/negative support split: even exponents with positive
    /// coefficient versus everything else.
    pub fn support_split(&self) -> SupportSplit {
        let mut split = SupportSplit::default();
        for (e, &c) in &self.terms {
            if e.is_even() && c > 0.0 {
                split.a_plus.insert(e.clone());
            } else {
                split.a_minus.insert(e.clone());
            }
        }
        split
    }

    /// The sub-polynomial supported on `exponents`.
    pub fn restrict<'a, I: IntoIterator<Item = &'a Exponent>>(&self, exponents: I) -> SparsePoly {
        let mut out = Self::zero(&self.vars);
        for e in exponents {
            if let Some(&c) = self.terms.get(e) {
                out.terms.insert(e.clone(), c);
            }
        }
        out
    }

    fn add_term(&mut self, e: Exponent, c: f64) {
        self.accumulate(e, c);
        self.normalize();
    }

    fn accumulate(&mut self, e: Exponent, c: f64) {
        *self.terms.entry(e).or_insert(0.0) += c;
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| c.abs() >= ZERO_TOL);
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        for (i, (e, &c)) in terms.into_iter().enumerate() {
            let mono = e.render(self.vars.names());
            let mag = c.abs();
            let sign = if c < 0.0 { "-" } else { "+" };
            if i == 0 {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (mono.is_empty(), mag == 1.0) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

/// `A⁺` (even, positive coefficient) and `A⁻` (the rest) of a support.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportSplit {
    pub a_plus: BTreeSet<Exponent>,
    pub a_minus: BTreeSet<Exponent>,
}

/// Polynomial vector field `ẋ = f(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DynSystem {
    vars: Variables,
    rhs: Vec<SparsePoly>,
}

impl DynSystem {
    pub fn new(vars: &Variables, rhs: Vec<SparsePoly>) -> Result<Self> {
        if rhs.len() != vars.len() {
            return Err(Error::DimensionMismatch {
                expected: vars.len(),
                found: rhs.len(),
            });
        }
        for f in &rhs {
            vars.check_same(f.vars())?;
        }
        Ok(Self {
            vars: vars.clone(),
            rhs,
        })
    }

    /// Parses one expression per variable.
    pub fn parse<S: AsRef<str>>(vars: &Variables, odes: &[S]) -> Result<Self> {
        let rhs = odes
            .iter()
            .map(|s| parse_poly(s.as_ref(), vars))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vars, rhs)
    }

    pub fn vars(&self) -> &Variables {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn rhs(&self) -> &[SparsePoly] {
        &self.rhs
    }

    pub fn has_origin_equilibrium(&self) -> bool {
        self.rhs.iter().all(|f| f.constant_term() == 0.0)
    }

    /// Errors naming the first component with a constant term.
    pub fn check_origin_equilibrium(&self) -> Result<()> {
        match self
            .rhs
            .iter()
            .enumerate()
            .find(|(_, f)| f.constant_term() != 0.0)
        {
            Some((index, f)) => Err(Error::NoOriginEquilibrium {
                index,
                value: f.constant_term(),
            }),
            None => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.rhs.iter().map(|f| f.evaluate(x)).collect()
    }
}

/// `V̇ = Σᵢ ∂V/∂xᵢ · fᵢ`.
pub fn lie_derivative(v: &SparsePoly, f: &DynSystem) -> Result<SparsePoly> {
    v.vars.check_same(&f.vars)?;
    let mut out = SparsePoly::zero(v.vars());
    for (j, fj) in f.rhs.iter().enumerate() {
        out = out.add(&v.derivative(j).mul(fj)?)?;
    }
    Ok(out)
}
