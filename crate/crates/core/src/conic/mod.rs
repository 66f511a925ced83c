//! Linear and relative-entropy programs behind a solver-agnostic interface.
//!
//! A [`ConicProgram`] is a list of affine constraints over indexed decision
//! variables: equalities `f(y) = 0`, inequalities `f(y) ≥ 0` and
//! relative-entropy epigraphs `u·ln(u/w) ≤ t`. [`solve`] hands it to the
//! backend and re-checks any returned point independently.

mod clarabel_backend;

use std::fmt::Write as _;
use std::ops::Range;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::affine::AffineForm;
use crate::error::{Error, Result};

/// Smallest value used in place of a vanishing `w` when evaluating `u·ln(u/w)`.
const LOG_CLAMP: f64 = 1e-300;

/// `u·ln(u/w) ≤ t`, with `u, w ≥ 0` implied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelEntropy {
    pub u: AffineForm,
    pub w: AffineForm,
    pub t: AffineForm,
}

impl RelEntropy {
    /// Constraint violation at `y` (≤ 0 when satisfied) and its magnitude scale.
    fn violation(&self, y: &[f64]) -> (f64, f64) {
        let (u, w, t) = (self.u.eval(y), self.w.eval(y), self.t.eval(y));
        let scale = 1.0 + self.u.eval_scale(y) + self.w.eval_scale(y) + self.t.eval_scale(y);
        let sign_viol = (-u).max(-w).max(0.0);
        let entropy = if u <= 0.0 {
            0.0
        } else {
            u * (u / w.max(LOG_CLAMP)).ln()
        };
        let scale = scale + entropy.abs();
        ((entropy - t).max(sign_viol), scale)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[default]
    Minimize,
    Maximize,
}

/// Decision variables plus linear and relative-entropy constraints.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConicProgram {
    names: Vec<String>,
    sense: Sense,
    objective: AffineForm,
    eqs: Vec<AffineForm>,
    ineqs: Vec<AffineForm>,
    relents: Vec<RelEntropy>,
}

impl ConicProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    /// `count` variables named `prefix1..`.
    pub fn add_vars(&mut self, prefix: &str, count: usize) -> Range<usize> {
        let start = self.names.len();
        for k in 1..=count {
            self.names.push(format!("{prefix}{k}"));
        }
        start..self.names.len()
    }

    /// `f(y) = 0`.
    pub fn add_eq(&mut self, f: AffineForm) -> usize {
        self.check(&f);
        self.eqs.push(f);
        self.eqs.len() - 1
    }

    /// `f(y) ≥ 0`.
    pub fn add_ineq(&mut self, f: AffineForm) -> usize {
        self.check(&f);
        self.ineqs.push(f);
        self.ineqs.len() - 1
    }

    /// `lhs(y) ≤ rhs(y)`.
    pub fn add_le(&mut self, lhs: &AffineForm, rhs: &AffineForm) -> usize {
        self.add_ineq(rhs.minus(lhs))
    }

    /// `u·ln(u/w) ≤ t`; one exponential-cone membership `(−t, u, w) ∈ K_exp`.
    pub fn add_relative_entropy(&mut self, u: AffineForm, w: AffineForm, t: AffineForm) -> usize {
        self.check(&u);
        self.check(&w);
        self.check(&t);
        self.relents.push(RelEntropy { u, w, t });
        self.relents.len() - 1
    }

    pub fn minimize(&mut self, f: AffineForm) {
        self.check(&f);
        self.sense = Sense::Minimize;
        self.objective = f;
    }

    pub fn maximize(&mut self, f: AffineForm) {
        self.check(&f);
        self.sense = Sense::Maximize;
        self.objective = f;
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &AffineForm {
        &self.objective
    }

    pub fn eqs(&self) -> &[AffineForm] {
        &self.eqs
    }

    pub fn ineqs(&self) -> &[AffineForm] {
        &self.ineqs
    }

    pub fn relents(&self) -> &[RelEntropy] {
        &self.relents
    }

    pub fn is_lp(&self) -> bool {
        self.relents.is_empty()
    }

    pub fn has_objective(&self) -> bool {
        !self.objective.is_constant()
    }

    /// Largest scaled constraint violation `viol / (1 + scale)` at `y`.
    pub fn max_violation(&self, y: &[f64]) -> f64 {
        let eq = self
            .eqs
            .iter()
            .map(|f| f.eval(y).abs() / (1.0 + f.eval_scale(y)));
        let ineq = self
            .ineqs
            .iter()
            .map(|f| (-f.eval(y)).max(0.0) / (1.0 + f.eval_scale(y)));
        let rel = self.relents.iter().map(|r| {
            let (v, s) = r.violation(y);
            v.max(0.0) / s
        });
        eq.chain(ineq).chain(rel).fold(0.0, f64::max)
    }

    /// Text dump, one constraint per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vars {}", self.num_vars());
        for (i, n) in self.names.iter().enumerate() {
            let _ = writeln!(out, "# {i} {n}");
        }
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        let _ = writeln!(out, "OBJ {sense} {}", render(&self.objective));
        for f in &self.eqs {
            let _ = writeln!(out, "EQ {}", render(f));
        }
        for f in &self.ineqs {
            let _ = writeln!(out, "INEQ {}", render(f));
        }
        for r in &self.relents {
            let _ = writeln!(
                out,
                "RELENT u=[{}] w=[{}] t=[{}]",
                render(&r.u),
                render(&r.w),
                render(&r.t)
            );
        }
        out
    }

    fn check(&self, f: &AffineForm) {
        assert!(
            f.var_bound() <= self.num_vars(),
            "affine form references variable {} but program has {}",
            f.var_bound().saturating_sub(1),
            self.num_vars()
        );
    }
}

fn render(f: &AffineForm) -> String {
    let mut s = format!("const {:e}", f.constant_part());
    for (i, w) in f.weights() {
        let _ = write!(s, " {i}:{w:e}");
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Feasible,
    Infeasible,
    /// The objective is unbounded in the optimization direction.
    Unbounded,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: Status,
    pub assignment: Option<Vec<f64>>,
    pub objective_value: Option<f64>,
    /// Scaled maximum violation of the returned point.
    pub residual: Option<f64>,
    /// Backend status string, for reports.
    pub detail: String,
}

impl SolveResult {
    fn bare(status: Status, detail: impl Into<String>) -> Self {
        Self {
            status,
            assignment: None,
            objective_value: None,
            residual: None,
            detail: detail.into(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSettings {
    /// Acceptance threshold for the independent residual check.
    pub feas_tol: f64,
    /// Interior-point stopping tolerance.
    pub ipm_tol: f64,
    pub max_iter: u32,
    /// Write every solved program here as text.
    pub dump_dir: Option<PathBuf>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            ipm_tol: 1e-10,
            max_iter: 300,
            dump_dir: None,
        }
    }
}

static DUMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

/// Solves `prog`. `Feasible` results are re-checked against every constraint;
/// `Infeasible` is only reported with a verified Farkas certificate.
pub fn solve(prog: &ConicProgram, settings: &SolverSettings) -> SolveResult {
    if let Some(dir) = &settings.dump_dir {
        let k = DUMP_COUNTER.fetch_add(1, Ordering::Relaxed);
        let path = dir.join(format!("program_{k:04}.txt"));
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, prog.to_text())) {
            log::warn!("could not dump program to {}: {e}", path.display());
        }
    }
    if prog.num_vars() == 0 {
        return solve_constant(prog, settings);
    }
    clarabel_backend::solve(prog, settings)
}

/// [`solve`] restricted to programs without relative-entropy constraints.
pub fn solve_lp(prog: &ConicProgram, settings: &SolverSettings) -> Result<SolveResult> {
    if !prog.is_lp() {
        return Err(Error::InvalidArgument(
            "solve_lp called on a program with relative-entropy constraints".into(),
        ));
    }
    Ok(solve(prog, settings))
}

fn solve_constant(prog: &ConicProgram, settings: &SolverSettings) -> SolveResult {
    let viol = prog.max_violation(&[]);
    let mut r = if viol <= settings.feas_tol {
        SolveResult::bare(Status::Feasible, "constant")
    } else {
        SolveResult::bare(Status::Infeasible, "constant")
    };
    if r.status == Status::Feasible {
        r.assignment = Some(Vec::new());
        r.objective_value = Some(prog.objective.constant_part());
        r.residual = Some(viol);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st() -> SolverSettings {
        SolverSettings::default()
    }

    #[test]
    fn empty_program_is_feasible() {
        let r = solve(&ConicProgram::new(), &st());
        assert_eq!(r.status, Status::Feasible);
        assert_eq!(r.assignment, Some(vec![]));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut p = ConicProgram::new();
        let x = p.add_var("x");
        p.add_ineq(AffineForm::from_terms(-1.0, [(x, 1.0)]));
        p.add_ineq(AffineForm::term(x, -1.0));
        assert_eq!(solve(&p, &st()).status, Status::Infeasible);
        assert_eq!(solve_lp(&p, &st()).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn entropy_at_the_minimizer() {
        // c·ln(c/(e·c)) = −c ≤ 0
        let mut p = ConicProgram::new();
        let c = p.add_var("c");
        p.add_ineq(AffineForm::var(c));
        p.add_relative_entropy(
            AffineForm::var(c),
            AffineForm::term(c, std::f64::consts::E),
            AffineForm::zero(),
        );
        let r = solve(&p, &st());
        assert_eq!(r.status, Status::Feasible);
        assert!(r.residual.unwrap() <= 1e-8);
    }

    #[test]
    fn entropy_lower_bound_violated() {
        // 1·ln(1/1) = 0 > −0.5
        let mut p = ConicProgram::new();
        let x = p.add_var("x");
        p.add_eq(AffineForm::from_terms(-1.0, [(x, 1.0)]));
        p.add_relative_entropy(
            AffineForm::constant(1.0),
            AffineForm::var(x),
            AffineForm::constant(-0.5),
        );
        assert_eq!(solve(&p, &st()).status, Status::Infeasible);
    }

    #[test]
    fn entropy_decomposition_matches_direct_sum() {
        // v1 ln(v1/(e c1)) + v2 ln(v2/(e c2)) ≤ −1 with c = (2, 2), v free
        let mut p = ConicProgram::new();
        let v = p.add_vars("v", 2);
        let t = p.add_vars("t", 2);
        for (vi, ti) in v.clone().zip(t.clone()) {
            p.add_relative_entropy(
                AffineForm::var(vi),
                AffineForm::constant(2.0 * std::f64::consts::E),
                AffineForm::var(ti),
            );
        }
        p.add_ineq(AffineForm::from_terms(-1.0, t.clone().map(|i| (i, -1.0))));
        let r = solve(&p, &st());
        assert_eq!(r.status, Status::Feasible);
        let y = r.assignment.unwrap();
        let d: f64 = v
            .map(|i| y[i] * (y[i] / (2.0 * std::f64::consts::E)).ln())
            .sum();
        assert!(d <= -1.0 + 1e-7, "{d}");
    }

    #[test]
    fn lp_objective_and_redundancy() {
        let mut p = ConicProgram::new();
        let c = p.add_var("c1");
        p.add_ineq(AffineForm::term(c, -1.0));
        p.maximize(AffineForm::var(c));
        let r = solve_lp(&p, &st()).unwrap();
        assert_eq!(r.status, Status::Feasible);
        assert!(r.objective_value.unwrap().abs() < 1e-7);

        // maximizing a duplicated constraint's slack under the original
        let mut q = ConicProgram::new();
        let c = q.add_var("c1");
        q.add_ineq(AffineForm::term(c, -1.0));
        q.maximize(AffineForm::var(c));
        let r = solve_lp(&q, &st()).unwrap();
        assert!(r.objective_value.unwrap() <= 1e-7);

        let mut u = ConicProgram::new();
        let c = u.add_var("c1");
        u.maximize(AffineForm::var(c));
        assert_eq!(solve_lp(&u, &st()).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn solve_lp_rejects_entropy() {
        let mut p = ConicProgram::new();
        let x = p.add_var("x");
        p.add_relative_entropy(AffineForm::var(x), AffineForm::var(x), AffineForm::var(x));
        assert!(solve_lp(&p, &st()).is_err());
    }

    #[test]
    fn text_dump_lists_every_constraint() {
        let mut p = ConicProgram::new();
        let x = p.add_var("x");
        p.add_eq(AffineForm::var(x));
        p.add_ineq(AffineForm::constant(1.0));
        p.add_relative_entropy(AffineForm::var(x), AffineForm::var(x), AffineForm::zero());
        let text = p.to_text();
        assert!(text.contains("# vars 1"));
        assert!(text.lines().any(|l| l.starts_with("EQ const 0e0 0:1e0")));
        assert!(text.lines().any(|l| l.starts_with("INEQ")));
        assert!(text.lines().any(|l| l.starts_with("RELENT u=[")));
    }
}
