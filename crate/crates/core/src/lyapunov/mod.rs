//! Lyapunov certification: verify a candidate `V` or search for one over a
//! support, requiring `V − p₁` and `−V̇ − p₂` to carry SONC or DSONC
//! certificates, where `p₁, p₂` are margin polynomials with variable
//! coefficients solved for in the same program.

mod epsilon;
mod signs;
mod simulate;
mod support;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affine::AffineForm;
use crate::certificates::builder::{add_dsonc, add_sonc, Terms};
use crate::certificates::{
    check_dsonc_witness, check_sonc_witness, dsonc, witness_tol, CertificateKind, DsoncWitness, SoncWitness,
    WitnessCheck,
};
use crate::conic::{solve, ConicProgram, SolverSettings, Status};
use crate::error::{Error, Result};
use crate::poly::{lie_derivative, lie_derivative_symbolic, DynSystem, Exponent, LinearFormPoly, SparsePoly};

pub use epsilon::{build_epsilon_poly, definiteness_constraints, EpsilonPoly, EPSILON_MIN};
pub use signs::{distribute_signs, reduce_redundant, SignClasses, SignConstraintSet, REDUNDANCY_THRESHOLD};
pub use simulate::{simulate, Sample};
pub use support::{generate_support, Template};

/// Margin coefficients must exceed this multiple of the witness tolerance to
/// count towards definiteness.
const DEFINITE_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `p₂ ≡ 0`: only `−V̇ ≥ 0` is certified.
    Stable,
    #[default]
    Asymptotic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Stable => "stable",
            Mode::Asymptotic => "asymptotic",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stable" => Ok(Mode::Stable),
            "asymptotic" => Ok(Mode::Asymptotic),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AsymptoticallyStable,
    Stable,
    NotCertified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AsymptoticallyStable => "asymptotically_stable",
            Verdict::Stable => "stable",
            Verdict::NotCertified => "not_certified",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    Sonc(SoncWitness),
    Dsonc(DsoncWitness),
}

impl Certificate {
    pub fn kind(&self) -> CertificateKind {
        match self {
            Certificate::Sonc(_) => CertificateKind::Sonc,
            Certificate::Dsonc(_) => CertificateKind::Dsonc,
        }
    }

    /// Independent check that `p` is certified by this witness.
    pub fn check(&self, p: &SparsePoly) -> WitnessCheck {
        match self {
            Certificate::Sonc(w) => check_sonc_witness(p, w),
            Certificate::Dsonc(w) => check_dsonc_witness(p, w),
        }
    }
}

/// How a search picks among feasible candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Whatever point the solver returns.
    Feasibility,
    /// Minimize the sum of `V`'s nonnegative coefficients.
    #[default]
    MinCoefficientSum,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Feasibility => "feasibility",
            Objective::MinCoefficientSum => "min_coefficient_sum",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "feasibility" => Ok(Objective::Feasibility),
            "min_coefficient_sum" | "min_coef_sum" => Ok(Objective::MinCoefficientSum),
            other => Err(Error::InvalidArgument(format!("unknown objective `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    pub mode: Mode,
    /// Selection rule among feasible candidates; never changes feasibility.
    pub objective: Objective,
    /// Make even non-vertex coefficients nonpositive instead of nonnegative.
    pub interior_negative: bool,
    /// Lower bound on the sum of each margin polynomial's coefficients.
    pub epsilon_min: f64,
    pub solver: SolverSettings,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Asymptotic,
            objective: Objective::MinCoefficientSum,
            interior_negative: false,
            epsilon_min: EPSILON_MIN,
            solver: SolverSettings::default(),
        }
    }
}

/// A candidate together with certificates for `V − p₁` and `−V̇ − p₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovResult {
    pub v: SparsePoly,
    pub neg_vdot: SparsePoly,
    pub p1: SparsePoly,
    pub p2: SparsePoly,
    pub cert_v: Certificate,
    pub cert_dv: Certificate,
    pub check_v: WitnessCheck,
    pub check_dv: WitnessCheck,
    pub verdict: Verdict,
    pub certificate_kind: CertificateKind,
    pub mode: Mode,
}

impl LyapunovResult {
    /// `V − p₁`.
    pub fn certified_v(&self) -> Result<SparsePoly> {
        self.v.sub(&self.p1)
    }

    /// `−V̇ − p₂`.
    pub fn certified_dv(&self) -> Result<SparsePoly> {
        self.neg_vdot.sub(&self.p2)
    }

    /// Re-derives the verdict from the payload alone: recomputes `−V̇`,
    /// re-checks both witnesses and the definiteness of the margins.
    pub fn reverify(&self, f: &DynSystem) -> Result<Verdict> {
        let neg_vdot = lie_derivative(&self.v, f)?.neg();
        let drift = neg_vdot.sub(&self.neg_vdot)?.max_abs_coef();
        if drift > witness_tol(&neg_vdot) || self.v.constant_term() != 0.0 {
            return Ok(Verdict::NotCertified);
        }
        let pv = self.certified_v()?;
        let pdv = self.certified_dv()?;
        if !self.cert_v.check(&pv).ok || !self.cert_dv.check(&pdv).ok {
            return Ok(Verdict::NotCertified);
        }
        if self.p1.terms().chain(self.p2.terms()).any(|(_, c)| c < 0.0) {
            return Ok(Verdict::NotCertified);
        }
        Ok(verdict_for(self.certificate_kind, self.mode, &self.p1, &pv, &self.p2, &pdv))
    }
}

/// Outcome of [`verify_candidate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub result: Option<LyapunovResult>,
    /// Backend status of the joint program.
    pub solver_status: String,
    /// Why no certificate was produced, when that is the case.
    pub reason: Option<String>,
    pub elapsed_ms: f64,
}

/// Checks a fixed candidate `V` for `ẋ = f(x)`.
pub fn verify_candidate(
    v: &SparsePoly,
    f: &DynSystem,
    kind: CertificateKind,
    options: &SearchOptions,
) -> Result<StabilityReport> {
    let start = Instant::now();
    f.check_origin_equilibrium()?;
    f.vars().check_same(v.vars())?;
    if v.constant_term() != 0.0 {
        return Err(Error::CandidateConstantTerm(v.constant_term()));
    }
    if v.is_zero() {
        return Err(Error::ZeroCandidate);
    }
    let outcome = match run(&LinearFormPoly::from_poly(v), f, kind, options) {
        Err(Error::EmptyPositiveSupport) => Outcome::rejected("candidate has no even terms that could be positive"),
        other => other?,
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(match outcome {
        Outcome::Found(r) => StabilityReport {
            verdict: r.verdict,
            solver_status: "feasible".into(),
            reason: (r.verdict == Verdict::NotCertified)
                .then(|| "margin polynomials are not positive definite".into()),
            result: Some(*r),
            elapsed_ms,
        },
        Outcome::Infeasible { detail } => StabilityReport {
            verdict: Verdict::NotCertified,
            result: None,
            solver_status: detail,
            reason: Some("no certificate exists for this candidate".into()),
            elapsed_ms,
        },
        Outcome::Rejected { reason } => StabilityReport {
            verdict: Verdict::NotCertified,
            result: None,
            solver_status: "not run".into(),
            reason: Some(reason),
            elapsed_ms,
        },
    })
}

/// Searches for `V` supported on `support` with SONC certificates.
pub fn search_sonc(f: &DynSystem, support: &[Exponent], options: &SearchOptions) -> Result<Option<LyapunovResult>> {
    search(f, support, CertificateKind::Sonc, options)
}

/// Searches for `V` supported on `support` with DSONC certificates.
pub fn search_dsonc(f: &DynSystem, support: &[Exponent], options: &SearchOptions) -> Result<Option<LyapunovResult>> {
    search(f, support, CertificateKind::Dsonc, options)
}

/// Searches with the given certificate kind. `None` means the joint program
/// is infeasible for this support (or no coefficient can be positive).
pub fn search(
    f: &DynSystem,
    support: &[Exponent],
    kind: CertificateKind,
    options: &SearchOptions,
) -> Result<Option<LyapunovResult>> {
    Ok(match search_outcome(f, support, kind, options)? {
        SearchOutcome::Found(r) => Some(*r),
        SearchOutcome::Infeasible { .. } | SearchOutcome::Rejected { .. } => None,
    })
}

/// Like [`search`], but tells a solver-certified infeasibility apart from a
/// rejection before any program was solved.
pub fn search_outcome(
    f: &DynSystem,
    support: &[Exponent],
    kind: CertificateKind,
    options: &SearchOptions,
) -> Result<SearchOutcome> {
    f.check_origin_equilibrium()?;
    if support.iter().any(Exponent::is_zero) {
        return Err(Error::ZeroExponentInSupport);
    }
    if support.is_empty() {
        return Err(Error::InvalidArgument("empty support".into()));
    }
    let template = LinearFormPoly::template(f.vars(), support, "c")?;
    match run(&template, f, kind, options) {
        Err(Error::EmptyPositiveSupport) => Ok(SearchOutcome::Rejected {
            reason: "no coefficient of V can be positive".into(),
        }),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    Found(Box<LyapunovResult>),
    /// The solver certified that the joint program has no solution.
    Infeasible { detail: String },
    /// The structure rules out a certificate before any program is solved.
    Rejected { reason: String },
}

type Outcome = SearchOutcome;

impl SearchOutcome {
    fn rejected(reason: impl Into<String>) -> Self {
        SearchOutcome::Rejected { reason: reason.into() }
    }
}

enum Layout {
    Sonc(crate::certificates::SoncLayout),
    Dsonc(crate::certificates::DsoncLayout),
}

type TermList = Vec<(Exponent, AffineForm)>;

fn split_terms(p: &LinearFormPoly, classes: &SignClasses) -> (TermList, TermList) {
    let minus: BTreeSet<&Exponent> = classes.minus().collect();
    let mut plus_terms = Vec::new();
    let mut minus_terms = Vec::new();
    for (e, f) in p.terms() {
        if classes.nonneg.contains(e) {
            plus_terms.push((e.clone(), f.clone()));
        } else if minus.contains(e) {
            minus_terms.push((e.clone(), f.clone()));
        }
    }
    (plus_terms, minus_terms)
}

fn add_membership(prog: &mut ConicProgram, kind: CertificateKind, plus: &Terms, minus: &Terms, label: &str) -> Layout {
    match kind {
        CertificateKind::Dsonc => Layout::Dsonc(add_dsonc(prog, plus, minus, label)),
        _ => Layout::Sonc(add_sonc(prog, plus, minus, label)),
    }
}

fn extract(layout: &Layout, y: &[f64], p: &SparsePoly, settings: &SolverSettings) -> Certificate {
    match layout {
        Layout::Sonc(l) => Certificate::Sonc(l.extract(y, 1.0).prune(p)),
        Layout::Dsonc(l) => Certificate::Dsonc(dsonc::polish(p, l.extract(y, 1.0), settings)),
    }
}

/// The shared pipeline: sign distribution, margins, one joint program,
/// substitution and independent re-verification.
fn run(v: &LinearFormPoly, f: &DynSystem, kind: CertificateKind, options: &SearchOptions) -> Result<Outcome> {
    if kind == CertificateKind::Circuit {
        return Err(Error::InvalidArgument(
            "circuit certificates are a fixed-polynomial test; use sonc or dsonc for stability".into(),
        ));
    }
    let settings = &options.solver;
    let neg_vdot = lie_derivative_symbolic(v, f)?.scale(-1.0);
    let signs = distribute_signs(v, &neg_vdot, options.interior_negative, settings)?;
    if signs.contradictory {
        return Ok(Outcome::rejected("a fixed coefficient violates its sign constraint"));
    }

    let margins = match build_margins(v, &neg_vdot, &signs, kind, options)? {
        Ok(m) => m,
        Err(reason) => return Ok(Outcome::rejected(reason)),
    };
    let (p1, p2) = (&margins.p1, &margins.p2);

    let mut prog = ConicProgram::new();
    for name in &margins.names {
        prog.add_var(name.clone());
    }
    for h in &signs.equalities {
        prog.add_eq(h.clone());
    }
    for g in signs.inequalities.iter().chain(&margins.constraints) {
        prog.add_ineq(g.clone());
    }
    if options.objective == Objective::MinCoefficientSum && v.num_decision() > 0 {
        let mut total = AffineForm::zero();
        for e in &signs.v.nonneg {
            total.add_scaled(&v.coefficient(e), 1.0);
        }
        prog.minimize(total);
    }
    let pv = v.sub(p1)?;
    let pdv = neg_vdot.sub(p2)?;
    let (plus_v, minus_v) = split_terms(&pv, &signs.v);
    let (plus_dv, minus_dv) = split_terms(&pdv, &signs.dv);
    let layout_v = add_membership(&mut prog, kind, &plus_v, &minus_v, "P");
    let layout_dv = add_membership(&mut prog, kind, &plus_dv, &minus_dv, "Q");
    log::debug!(
        "joint program: {} variables, {} equalities, {} inequalities, {} entropy cones",
        prog.num_vars(),
        prog.eqs().len(),
        prog.ineqs().len(),
        prog.relents().len()
    );

    let r = solve(&prog, settings);
    let mut y = match r.status {
        Status::Feasible => r.assignment.expect("feasible results carry a point"),
        Status::Infeasible => return Ok(Outcome::Infeasible { detail: r.detail }),
        Status::Unbounded | Status::Unknown => return Err(Error::SolverUnknown(r.detail)),
    };
    project_onto(&mut y, v.num_decision(), &signs.equalities);
    for &i in &margins.eps {
        y[i] = y[i].max(0.0);
    }

    let v_num = v.substitute(&y);
    let neg_vdot_num = lie_derivative(&v_num, f)?.neg();
    let p1_num = p1.substitute(&y);
    let p2_num = p2.substitute(&y);
    let pv_num = v_num.sub(&p1_num)?;
    let pdv_num = neg_vdot_num.sub(&p2_num)?;
    let cert_v = extract(&layout_v, &y, &pv_num, settings);
    let cert_dv = extract(&layout_dv, &y, &pdv_num, settings);
    let check_v = cert_v.check(&pv_num);
    let check_dv = cert_dv.check(&pdv_num);
    for (what, c) in [("V - p1", &check_v), ("-dV/dt - p2", &check_dv)] {
        if !c.ok {
            return Err(Error::SolverUnknown(format!(
                "solver point failed independent verification of {what}: {}",
                c.failure.clone().unwrap_or_default()
            )));
        }
    }
    let verdict = verdict_for(kind, options.mode, &p1_num, &pv_num, &p2_num, &pdv_num);
    Ok(Outcome::Found(Box::new(LyapunovResult {
        v: v_num,
        neg_vdot: neg_vdot_num,
        p1: p1_num,
        p2: p2_num,
        cert_v,
        cert_dv,
        check_v,
        check_dv,
        verdict,
        certificate_kind: kind,
        mode: options.mode,
    })))
}

struct Margins {
    p1: LinearFormPoly,
    p2: LinearFormPoly,
    /// Names of all decision variables: V's coefficients, then margins.
    names: Vec<String>,
    constraints: Vec<AffineForm>,
    /// Indices of margin coefficients.
    eps: Vec<usize>,
}

fn var_list(v: &LinearFormPoly, missing: &[usize]) -> String {
    missing
        .iter()
        .map(|&j| v.vars().names()[j].as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// SONC: margin polynomials `p₁, p₂` with variable ε over the nonnegative
/// classes. DSONC: no subtracted margins, since a DSONC block dominates a
/// positive multiple of its outer terms; the same per-variable floors are
/// imposed on the pure powers of `V` and `−V̇` directly, which also rules out
/// `V ≡ 0` in a search. The inner `Err` carries a rejection reason.
fn build_margins(
    v: &LinearFormPoly,
    neg_vdot: &LinearFormPoly,
    signs: &SignConstraintSet,
    kind: CertificateKind,
    options: &SearchOptions,
) -> Result<std::result::Result<Margins, String>> {
    let n = v.vars().len();
    // a search is homogeneous in all decision variables, so any margin level
    // is equivalent; solving at level ≥ 1 keeps the point well scaled
    let eps_min = if v.num_decision() > 0 {
        options.epsilon_min.max(1.0)
    } else {
        options.epsilon_min
    };
    let no_margin = |what: &str| format!("{what} has no even terms to carry a strict margin");
    if kind == CertificateKind::Dsonc {
        let restrict = |p: &LinearFormPoly, set: &BTreeSet<Exponent>| -> Vec<(Exponent, AffineForm)> {
            p.terms().filter(|(e, _)| set.contains(*e)).map(|(e, f)| (e.clone(), f.clone())).collect()
        };
        let vt = restrict(v, &signs.v.nonneg);
        let (mut constraints, missing) = definiteness_constraints(n, vt.iter().map(|(e, f)| (e, f)), eps_min);
        if !missing.is_empty() {
            return Ok(Err(format!("V has no even pure power of {}", var_list(v, &missing))));
        }
        if options.mode == Mode::Asymptotic {
            if signs.dv.nonneg.is_empty() {
                return Ok(Err(no_margin("-dV/dt")));
            }
            let dt = restrict(neg_vdot, &signs.dv.nonneg);
            constraints.extend(definiteness_constraints(n, dt.iter().map(|(e, f)| (e, f)), eps_min).0);
        }
        constraints.retain(|g| !g.is_constant());
        return Ok(Ok(Margins {
            p1: LinearFormPoly::zero(v.vars()),
            p2: LinearFormPoly::zero(v.vars()),
            names: v.decision_names().to_vec(),
            constraints,
            eps: Vec::new(),
        }));
    }

    let eps1 = build_epsilon_poly(v, &signs.v.nonneg, "e", eps_min)?;
    let (rows1, missing) = definiteness_constraints(n, eps1.poly.terms(), eps_min);
    if !missing.is_empty() {
        return Ok(Err(format!("V has no even pure power of {}", var_list(v, &missing))));
    }
    let mut constraints = eps1.constraints.clone();
    constraints.extend(rows1);
    let mut eps: Vec<usize> = eps1.indices.clone().collect();
    let (p2, names) = match options.mode {
        Mode::Stable => (LinearFormPoly::zero(v.vars()), eps1.poly.decision_names().to_vec()),
        Mode::Asymptotic => {
            let eps2 = match build_epsilon_poly(&eps1.poly, &signs.dv.nonneg, "d", eps_min) {
                Ok(e) => e,
                Err(Error::EmptyPositiveSupport) => return Ok(Err(no_margin("-dV/dt"))),
                Err(e) => return Err(e),
            };
            constraints.extend(eps2.constraints.iter().cloned());
            constraints.extend(definiteness_constraints(n, eps2.poly.terms(), eps_min).0);
            eps.extend(eps2.indices.clone());
            let names = eps2.poly.decision_names().to_vec();
            (eps2.poly, names)
        }
    };
    Ok(Ok(Margins {
        p1: eps1.poly,
        p2,
        names,
        constraints,
        eps,
    }))
}

/// Moves the first `nc` entries of `y` to the nearest point satisfying the
/// equalities `h(y) = 0`, which only involve those entries.
fn project_onto(y: &mut [f64], nc: usize, equalities: &[AffineForm]) {
    if nc == 0 || equalities.is_empty() {
        return;
    }
    let a = DMatrix::from_fn(equalities.len(), nc, |i, j| equalities[i].weight(j));
    let b = DVector::from_iterator(equalities.len(), equalities.iter().map(|h| -h.constant_part()));
    let c = DVector::from_column_slice(&y[..nc]);
    let Ok(pinv) = a.clone().pseudo_inverse(1e-12) else {
        return;
    };
    let corrected = &c - pinv * (&a * &c - b);
    y[..nc].copy_from_slice(corrected.as_slice());
}

/// `p` dominates a multiple of `Σ x_j^{2k_j}`: every variable has a pure even
/// power whose coefficient clears the noise floor of `certified`.
fn is_definite(p: &SparsePoly, certified: &SparsePoly) -> bool {
    let floor = DEFINITE_FACTOR * witness_tol(certified);
    (0..p.nvars()).all(|j| {
        p.terms()
            .any(|(e, c)| c > floor && e.is_pure_even_power() && e.entries()[j] > 0)
    })
}

/// Without subtracted margins (DSONC), definiteness is read off the pure
/// powers of the certified polynomial itself.
fn verdict_for(
    kind: CertificateKind,
    mode: Mode,
    p1: &SparsePoly,
    pv: &SparsePoly,
    p2: &SparsePoly,
    pdv: &SparsePoly,
) -> Verdict {
    let (p1, p2) = if kind == CertificateKind::Dsonc { (pv, pdv) } else { (p1, p2) };
    if !is_definite(p1, pv) {
        return Verdict::NotCertified;
    }
    match mode {
        Mode::Asymptotic if is_definite(p2, pdv) => Verdict::AsymptoticallyStable,
        _ => Verdict::Stable,
    }
}

/// Extremes of `V` and `V̇` over random points of `[−1, 1]ⁿ` outside the
/// ball of radius `10⁻³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub samples: usize,
    pub min_v: f64,
    pub max_vdot: f64,
    pub argmin_v: Vec<f64>,
    pub argmax_vdot: Vec<f64>,
}

pub fn sample_lyapunov(v: &SparsePoly, f: &DynSystem, samples: usize, seed: u64) -> Result<SampleSummary> {
    f.vars().check_same(v.vars())?;
    let vdot = lie_derivative(v, f)?;
    let n = f.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SampleSummary {
        samples: 0,
        min_v: f64::INFINITY,
        max_vdot: f64::NEG_INFINITY,
        argmin_v: vec![0.0; n],
        argmax_vdot: vec![0.0; n],
    };
    while out.samples < samples {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if x.iter().map(|t| t * t).sum::<f64>() < 1e-6 {
            continue;
        }
        out.samples += 1;
        let val = v.evaluate(&x)?;
        if val < out.min_v {
            out.min_v = val;
            out.argmin_v = x.clone();
        }
        let d = vdot.evaluate(&x)?;
        if d > out.max_vdot {
            out.max_vdot = d;
            out.argmax_vdot = x;
        }
    }
    Ok(out)
}
