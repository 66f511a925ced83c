//! Membership constraints shared by fixed- and variable-coefficient programs.
//!
//! A polynomial enters as two coefficient lists: `plus` (even exponents whose
//! coefficient is kept nonnegative) and `minus` (every other term). Each
//! coefficient is an affine form in the program's variables; fixed
//! polynomials simply use constant forms.

use std::collections::BTreeMap;
use std::f64::consts::E;

use crate::affine::AffineForm;
use crate::conic::ConicProgram;
use crate::poly::Exponent;

use super::{DsoncBlock, DsoncWitness, SoncBlock, SoncWitness};

pub type Terms = [(Exponent, AffineForm)];

/// `|f|` as an affine form: the constant itself, or an epigraph variable
/// `s ≥ ±f` for variable coefficients.
fn abs_form(prog: &mut ConicProgram, f: &AffineForm, name: String) -> AffineForm {
    if f.is_constant() {
        return AffineForm::constant(f.constant_part().abs());
    }
    let s = AffineForm::var(prog.add_var(name));
    prog.add_ineq(s.minus(f));
    prog.add_ineq(s.plus(f));
    s
}

fn require_nonneg(prog: &mut ConicProgram, plus: &Terms) {
    for (_, f) in plus {
        if !(f.is_constant() && f.constant_part() >= 0.0) {
            prog.add_ineq(f.clone());
        }
    }
}

/// `Σ_β c^(β)_α = c_α` for every outer exponent.
fn add_split(prog: &mut ConicProgram, plus: &Terms, split: &[Vec<usize>]) {
    for (k, (_, f)) in plus.iter().enumerate() {
        let sum = AffineForm::from_terms(0.0, split.iter().map(|block| (block[k], 1.0)));
        prog.add_eq(sum.minus(f));
    }
}

#[derive(Clone, Debug)]
struct SoncBlockLayout {
    beta: Exponent,
    c: Vec<usize>,
    v: Vec<usize>,
}

/// Variable indices of a SONC membership block family inside a program.
#[derive(Clone, Debug)]
pub struct SoncLayout {
    alphas: Vec<Exponent>,
    blocks: Vec<SoncBlockLayout>,
}

/// For each inner term β: `c^(β), v^(β) ≥ 0` over the outer exponents,
/// `Σ_α v_α ln(v_α / (e·c_α)) ≤ −|c_β|` through per-term epigraphs, and
/// `Σ_α v_α (α − β) = 0`.
pub fn add_sonc(prog: &mut ConicProgram, plus: &Terms, minus: &Terms, label: &str) -> SoncLayout {
    require_nonneg(prog, plus);
    let alphas: Vec<Exponent> = plus.iter().map(|(e, _)| e.clone()).collect();
    let mut blocks = Vec::with_capacity(minus.len());
    if minus.is_empty() {
        return SoncLayout { alphas, blocks };
    }
    for (b, (beta, coef)) in minus.iter().enumerate() {
        let abs = abs_form(prog, coef, format!("{label}abs{b}"));
        let c = prog.add_vars(&format!("{label}c{b}_"), alphas.len()).collect::<Vec<_>>();
        let v = prog.add_vars(&format!("{label}v{b}_"), alphas.len()).collect::<Vec<_>>();
        let t = prog.add_vars(&format!("{label}t{b}_"), alphas.len()).collect::<Vec<_>>();
        for k in 0..alphas.len() {
            prog.add_relative_entropy(
                AffineForm::var(v[k]),
                AffineForm::term(c[k], E),
                AffineForm::var(t[k]),
            );
        }
        let mut budget = abs.negated();
        for &tk in &t {
            budget.add_term(tk, -1.0);
        }
        prog.add_ineq(budget);
        for coord in 0..beta.dim() {
            let row = AffineForm::from_terms(
                0.0,
                alphas.iter().zip(&v).map(|(a, &vk)| {
                    (vk, f64::from(a.entries()[coord]) - f64::from(beta.entries()[coord]))
                }),
            );
            if !row.is_zero() {
                prog.add_eq(row);
            }
        }
        blocks.push(SoncBlockLayout {
            beta: beta.clone(),
            c,
            v,
        });
    }
    let split: Vec<Vec<usize>> = blocks.iter().map(|b| b.c.clone()).collect();
    add_split(prog, plus, &split);
    SoncLayout { alphas, blocks }
}

impl SoncLayout {
    /// Reads the block family off a solver assignment, scaled by `scale`.
    pub fn extract(&self, y: &[f64], scale: f64) -> SoncWitness {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let read = |idx: &[usize]| -> BTreeMap<Exponent, f64> {
                    self.alphas
                        .iter()
                        .zip(idx)
                        .map(|(a, &i)| (a.clone(), (y[i] * scale).max(0.0)))
                        .collect()
                };
                let c = read(&b.c);
                let mut v = read(&b.v);
                // a weight on an empty share is solver noise; the entropy term needs c > 0
                for (a, w) in v.iter_mut() {
                    if c[a] <= 0.0 {
                        *w = 0.0;
                    }
                }
                SoncBlock {
                    beta: b.beta.clone(),
                    c,
                    v,
                }
            })
            .collect();
        SoncWitness { blocks }
    }
}

#[derive(Clone, Debug)]
struct DsoncBlockLayout {
    beta: Exponent,
    abs: AffineForm,
    c: Vec<usize>,
    tau: Vec<usize>,
}

/// Variable indices of a DSONC membership block family inside a program.
#[derive(Clone, Debug)]
pub struct DsoncLayout {
    alphas: Vec<Exponent>,
    blocks: Vec<DsoncBlockLayout>,
}

/// For each inner term β: split coefficients `c^(β)` and a scaled direction
/// `τ̃` with `|c_β|·ln(|c_β| / c^(β)_α) ≤ (α − β)ᵀτ̃` for every outer α.
pub fn add_dsonc(prog: &mut ConicProgram, plus: &Terms, minus: &Terms, label: &str) -> DsoncLayout {
    require_nonneg(prog, plus);
    let alphas: Vec<Exponent> = plus.iter().map(|(e, _)| e.clone()).collect();
    let mut blocks = Vec::with_capacity(minus.len());
    if minus.is_empty() {
        return DsoncLayout { alphas, blocks };
    }
    for (b, (beta, coef)) in minus.iter().enumerate() {
        let abs = abs_form(prog, coef, format!("{label}abs{b}"));
        let c = prog.add_vars(&format!("{label}c{b}_"), alphas.len()).collect::<Vec<_>>();
        let tau = prog.add_vars(&format!("{label}tau{b}_"), beta.dim()).collect::<Vec<_>>();
        for (k, a) in alphas.iter().enumerate() {
            let t = AffineForm::from_terms(
                0.0,
                tau.iter()
                    .zip(a.diff(beta))
                    .map(|(&ti, d)| (ti, d)),
            );
            prog.add_relative_entropy(abs.clone(), AffineForm::var(c[k]), t);
        }
        blocks.push(DsoncBlockLayout {
            beta: beta.clone(),
            abs,
            c,
            tau,
        });
    }
    let split: Vec<Vec<usize>> = blocks.iter().map(|b| b.c.clone()).collect();
    add_split(prog, plus, &split);
    DsoncLayout { alphas, blocks }
}

impl DsoncLayout {
    /// Reads split coefficients and `τ = τ̃ / |c_β|` (zero for vanished blocks).
    /// The result still needs [`super::dsonc::polish`] before verification.
    pub fn extract(&self, y: &[f64], scale: f64) -> DsoncWitness {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let abs = b.abs.eval(y);
                let tau = b
                    .tau
                    .iter()
                    .map(|&i| if abs > 1e-12 { y[i] / abs } else { 0.0 })
                    .collect();
                DsoncBlock {
                    beta: b.beta.clone(),
                    c: self
                        .alphas
                        .iter()
                        .zip(&b.c)
                        .map(|(a, &i)| (a.clone(), (y[i] * scale).max(0.0)))
                        .collect(),
                    tau,
                    lambda: BTreeMap::new(),
                }
            })
            .collect();
        DsoncWitness { blocks }
    }
}
