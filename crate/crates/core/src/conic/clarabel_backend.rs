//! Clarabel realization of [`super::solve`].
//!
//! Clarabel solves `min qᵀx s.t. Ax + s = b, s ∈ K`. A constraint
//! `g(x) + h ∈ K` therefore becomes the row block `A = −G, b = h`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, ExponentialConeT, IPSolver, NonnegativeConeT, SolverStatus,
    SupportedConeT, ZeroConeT,
};

use super::{ConicProgram, Sense, SolveResult, SolverSettings, Status};
use crate::affine::AffineForm;

/// Accepted size of `‖Aᵀz‖∞` for a Farkas certificate normalized to `bᵀz = −1`.
/// Such a certificate rules out every feasible point with `‖x‖₁ < 1/‖Aᵀz‖∞`.
const FARKAS_TOL: f64 = 1e-6;
/// Accepted dual-cone violation of a normalized certificate.
const DUAL_CONE_TOL: f64 = 1e-7;

struct Rows {
    i: Vec<usize>,
    j: Vec<usize>,
    v: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    /// Appends the row for the slack `s = f(x)`.
    fn push(&mut self, f: &AffineForm) {
        let r = self.b.len();
        for (j, w) in f.weights() {
            self.i.push(r);
            self.j.push(j);
            self.v.push(-w);
        }
        self.b.push(f.constant_part());
    }
}

pub(super) fn solve(prog: &ConicProgram, settings: &SolverSettings) -> SolveResult {
    let n = prog.num_vars();
    let mut rows = Rows {
        i: vec![],
        j: vec![],
        v: vec![],
        b: vec![],
    };
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    if !prog.eqs.is_empty() {
        prog.eqs.iter().for_each(|f| rows.push(f));
        cones.push(ZeroConeT(prog.eqs.len()));
    }
    if !prog.ineqs.is_empty() {
        prog.ineqs.iter().for_each(|f| rows.push(f));
        cones.push(NonnegativeConeT(prog.ineqs.len()));
    }
    for r in &prog.relents {
        rows.push(&r.t.negated());
        rows.push(&r.u);
        rows.push(&r.w);
        cones.push(ExponentialConeT());
    }
    let m = rows.b.len();
    let a = CscMatrix::new_from_triplets(m, n, rows.i, rows.j, rows.v);
    let p = CscMatrix::zeros((n, n));
    let sign = match prog.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut q = vec![0.0; n];
    for (j, w) in prog.objective.weights() {
        q[j] = sign * w;
    }

    let clarabel_settings = DefaultSettings {
        verbose: false,
        max_iter: settings.max_iter,
        tol_gap_abs: settings.ipm_tol,
        tol_gap_rel: settings.ipm_tol,
        tol_feas: settings.ipm_tol,
        tol_ktratio: 1e-7,
        ..DefaultSettings::default()
    };
    let mut solver = match DefaultSolver::new(&p, &q, &a, &rows.b, &cones, clarabel_settings) {
        Ok(s) => s,
        Err(e) => return SolveResult::bare(Status::Unknown, format!("setup failed: {e:?}")),
    };
    solver.solve();
    let sol = &solver.solution;
    let detail = format!("{:?}", sol.status);
    log::debug!(
        "clarabel: {detail} after {} iterations ({} vars, {m} rows)",
        sol.iterations,
        n
    );

    match sol.status {
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            if farkas_certificate_holds(&a, &rows.b, &cones, &sol.z) {
                SolveResult::bare(Status::Infeasible, detail)
            } else {
                SolveResult::bare(Status::Unknown, format!("{detail} (certificate rejected)"))
            }
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            if prog.has_objective() {
                SolveResult::bare(Status::Unbounded, detail)
            } else {
                SolveResult::bare(Status::Unknown, detail)
            }
        }
        SolverStatus::Solved | SolverStatus::AlmostSolved => accept_point(prog, settings, &sol.x, detail),
        // a feasibility problem only needs a feasible point, wherever the
        // iteration stopped
        _ if !prog.has_objective() => accept_point(prog, settings, &sol.x, detail),
        _ => SolveResult::bare(Status::Unknown, detail),
    }
}

fn accept_point(prog: &ConicProgram, settings: &SolverSettings, x: &[f64], detail: String) -> SolveResult {
    if x.iter().any(|v| !v.is_finite()) {
        return SolveResult::bare(Status::Unknown, format!("{detail} (non-finite point)"));
    }
    let residual = prog.max_violation(x);
    if residual > settings.feas_tol {
        return SolveResult {
            residual: Some(residual),
            ..SolveResult::bare(Status::Unknown, format!("{detail} (residual {residual:.3e})"))
        };
    }
    SolveResult {
        status: Status::Feasible,
        objective_value: Some(prog.objective.eval(x)),
        assignment: Some(x.to_vec()),
        residual: Some(residual),
        detail,
    }
}

/// Checks `z ∈ K*`, `Aᵀz ≈ 0`, `bᵀz < 0` after normalizing `bᵀz = −1`.
fn farkas_certificate_holds(
    a: &CscMatrix<f64>,
    b: &[f64],
    cones: &[SupportedConeT<f64>],
    z: &[f64],
) -> bool {
    if z.len() != b.len() || z.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let btz: f64 = b.iter().zip(z).map(|(b, z)| b * z).sum();
    if btz >= 0.0 {
        return false;
    }
    let z: Vec<f64> = z.iter().map(|v| v / -btz).collect();

    let mut atz = vec![0.0; a.n];
    for (col, out) in atz.iter_mut().enumerate() {
        for k in a.colptr[col]..a.colptr[col + 1] {
            *out += a.nzval[k] * z[a.rowval[k]];
        }
    }
    if atz.iter().any(|v| v.abs() > FARKAS_TOL) {
        log::debug!(
            "farkas check: |A'z| = {:.3e}",
            atz.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        );
        return false;
    }

    let mut r = 0;
    for cone in cones {
        match cone {
            SupportedConeT::ZeroConeT(k) => r += k,
            SupportedConeT::NonnegativeConeT(k) => {
                if z[r..r + k].iter().any(|&v| v < -DUAL_CONE_TOL) {
                    return false;
                }
                r += k;
            }
            SupportedConeT::ExponentialConeT() => {
                if !in_dual_exp_cone(z[r], z[r + 1], z[r + 2]) {
                    return false;
                }
                r += 3;
            }
            _ => return false,
        }
    }
    true
}

/// `K_exp* = cl{(z1, z2, z3) : z1 < 0, z3 ≥ −z1·exp(z2/z1 − 1)}`.
fn in_dual_exp_cone(z1: f64, z2: f64, z3: f64) -> bool {
    let tol = DUAL_CONE_TOL;
    if z1 > tol || z3 < -tol {
        return false;
    }
    if z1 > -tol {
        return z2 >= -tol;
    }
    let expo = z2 / z1 - 1.0;
    if expo > 700.0 {
        return false;
    }
    z3 + tol >= -z1 * expo.exp()
}
