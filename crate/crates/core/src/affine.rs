//! Affine forms over indexed decision variables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Weights and constants with magnitude below this are treated as exact zeros.
pub const ZERO_TOL: f64 = 1e-12;

/// `constant + Σ weight_i · y_i` over decision variables `y`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AffineForm {
    constant: f64,
    weights: BTreeMap<usize, f64>,
}

impl AffineForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        let mut form = Self::zero();
        form.constant = value;
        form.normalize();
        form
    }

    /// The single variable `y_index`.
    pub fn var(index: usize) -> Self {
        Self::term(index, 1.0)
    }

    pub fn term(index: usize, weight: f64) -> Self {
        let mut form = Self::zero();
        form.add_term(index, weight);
        form
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, f64)>>(constant: f64, terms: I) -> Self {
        let mut form = Self::constant(constant);
        for (i, w) in terms {
            form.add_term(i, w);
        }
        form
    }

    pub fn constant_part(&self) -> f64 {
        self.constant
    }

    pub fn weights(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().map(|(&i, &w)| (i, w))
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights.get(&index).copied().unwrap_or(0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty() && self.constant == 0.0
    }

    /// One past the largest referenced variable index (0 for constants).
    pub fn var_bound(&self) -> usize {
        self.weights.keys().next_back().map_or(0, |i| i + 1)
    }

    pub fn add_term(&mut self, index: usize, weight: f64) {
        let entry = self.weights.entry(index).or_insert(0.0);
        *entry += weight;
        if entry.abs() < ZERO_TOL {
            self.weights.remove(&index);
        }
    }

    pub fn add_constant(&mut self, value: f64) {
        self.constant += value;
        if self.constant.abs() < ZERO_TOL {
            self.constant = 0.0;
        }
    }

    pub fn add_scaled(&mut self, other: &AffineForm, factor: f64) {
        self.constant += factor * other.constant;
        for (&i, &w) in &other.weights {
            let entry = self.weights.entry(i).or_insert(0.0);
            *entry += factor * w;
        }
        self.normalize();
    }

    pub fn plus(&self, other: &AffineForm) -> AffineForm {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    pub fn minus(&self, other: &AffineForm) -> AffineForm {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn scaled(&self, factor: f64) -> AffineForm {
        let mut out = AffineForm::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn negated(&self) -> AffineForm {
        self.scaled(-1.0)
    }

    /// Value at `y`. Indices beyond `y.len()` are treated as zero.
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.constant
            + self
                .weights
                .iter()
                .map(|(&i, &w)| w * y.get(i).copied().unwrap_or(0.0))
                .sum::<f64>()
    }

    /// `|constant| + Σ |w_i y_i|`, the magnitude scale of an evaluation at `y`.
    pub fn eval_scale(&self, y: &[f64]) -> f64 {
        self.constant.abs()
            + self
                .weights
                .iter()
                .map(|(&i, &w)| (w * y.get(i).copied().unwrap_or(0.0)).abs())
                .sum::<f64>()
    }

    /// Re-index variables through `map` (old index -> new index).
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> AffineForm {
        AffineForm::from_terms(self.constant, self.weights().map(|(i, w)| (map(i), w)))
    }

    fn normalize(&mut self) {
        self.weights.retain(|_, w| w.abs() >= ZERO_TOL);
        if self.constant.abs() < ZERO_TOL {
            self.constant = 0.0;
        }
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (i, w) in self.weights() {
            write!(f, " {i}:{w}")?;
        }
        Ok(())
    }
}
