//! Subcommand bodies. Each returns a [`Report`] (or rows) and leaves
//! printing and exit codes to `main`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use sonclyap_core::certificates::{
    check_dsonc_witness, check_sonc_witness, circuit_number, dsonc_membership, find_negative_point,
    is_nonneg_circuit, sonc_membership,
};
use sonclyap_core::conic::SolverSettings;
use sonclyap_core::geometry::detect_circuit;
use sonclyap_core::lyapunov::{
    generate_support, sample_lyapunov, search_outcome, simulate, verify_candidate, Certificate, SearchOutcome,
    Template,
};
use sonclyap_core::{
    parse_poly, CertificateKind, Error as CoreError, Mode, Objective, SearchOptions, SparsePoly, Variables,
    Verdict,
};

use crate::input::{infer_vars, load_system, parse_error, parse_extras, parse_point, parse_system, read_file, split_list, System};
use crate::report::{
    classify, CheckReport, CircuitReport, LyapunovReport, OptionsRecord, Report, Status, SupportRecord,
};
use crate::CliError;

/// Random points used to sanity-check a certified `V`.
pub const SAMPLE_POINTS: usize = 10_000;

/// A polynomial given inline or in a text file.
pub struct PolyInput {
    pub expr: Option<String>,
    pub file: Option<PathBuf>,
    pub vars: Option<String>,
}

impl PolyInput {
    fn load(&self) -> Result<(SparsePoly, Vec<u8>), CliError> {
        let text = match (&self.expr, &self.file) {
            (Some(e), None) => e.clone(),
            (None, Some(path)) => String::from_utf8(read_file(path)?)
                .map_err(|_| CliError::Usage(format!("{}: not UTF-8", path.display())))?
                .trim()
                .to_string(),
            _ => return Err(CliError::Usage("give either an expression or --file".into())),
        };
        let names = match &self.vars {
            Some(v) => split_list(v),
            None => infer_vars(&text),
        };
        let vars = Variables::new(names.iter().cloned());
        let p = parse_poly(&text, &vars).map_err(|e| parse_error("polynomial", &text, e))?;
        let mut raw = names.join(",").into_bytes();
        raw.push(b'\n');
        raw.extend_from_slice(text.as_bytes());
        Ok((p, raw))
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Nonnegativity check of a fixed polynomial.
pub fn check(input: &PolyInput, kind: CertificateKind, settings: &SolverSettings, seed: u64) -> Result<Report, CliError> {
    let start = Instant::now();
    let (p, raw) = input.load()?;
    let mut body = CheckReport {
        display: p.to_string(),
        poly: p.clone(),
        certificate_kind: kind,
        solver_status: "not run".into(),
        witness: None,
        witness_check: None,
        circuit: None,
        counterexample: None,
        reason: None,
    };
    let mut status = match kind {
        CertificateKind::Circuit => {
            let structure = detect_circuit(&p.support()).ok_or(CoreError::NotCircuit)?;
            let nonnegative = is_nonneg_circuit(&p)?;
            body.circuit = Some(CircuitReport {
                theta: structure.inner.as_ref().and_then(|_| circuit_number(&p).ok()),
                inner_coefficient: structure.inner.as_ref().map(|b| p.coefficient(b)),
                structure,
                nonnegative,
            });
            if nonnegative {
                Status::Certified
            } else {
                Status::NotCertified
            }
        }
        CertificateKind::Sonc | CertificateKind::Dsonc => {
            let found = if kind == CertificateKind::Sonc {
                sonc_membership(&p, settings).map(|w| w.map(Certificate::Sonc))
            } else {
                dsonc_membership(&p, settings).map(|w| w.map(Certificate::Dsonc))
            };
            match found {
                Ok(Some(w)) => {
                    body.solver_status = "feasible".into();
                    let c = w.check(&p);
                    let ok = c.ok;
                    body.witness = Some(w);
                    body.witness_check = Some(c);
                    if ok {
                        Status::Certified
                    } else {
                        Status::Unknown
                    }
                }
                Ok(None) => {
                    body.solver_status = "infeasible".into();
                    body.reason = Some(format!("no {kind} certificate exists for this support split"));
                    Status::NotCertified
                }
                Err(CoreError::SolverUnknown(msg)) => {
                    body.solver_status = "unknown".into();
                    body.reason = Some(msg);
                    Status::Unknown
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    if status != Status::Certified {
        body.counterexample = find_negative_point(&p, seed);
        if body.counterexample.is_some() {
            // a negative value settles membership whatever the solver said
            status = Status::NotCertified;
        }
    }
    let mut report = Report::new(kind_command(kind), &raw, status, elapsed_ms(start));
    report.check = Some(body);
    Ok(report)
}

fn kind_command(kind: CertificateKind) -> &'static str {
    match kind {
        CertificateKind::Circuit => "circuit",
        _ => "check",
    }
}

/// Options shared by `verify` and `search`.
#[derive(Clone, Debug)]
pub struct LyapunovArgs {
    pub kind: CertificateKind,
    pub mode: Mode,
    pub objective: Objective,
    pub interior_negative: bool,
    pub epsilon_min: f64,
    pub tol: f64,
    pub seed: u64,
    pub settings: SolverSettings,
}

impl LyapunovArgs {
    fn options(&self) -> Result<SearchOptions, CliError> {
        if self.kind == CertificateKind::Circuit {
            return Err(CliError::Usage("circuit certificates apply to `check` only".into()));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(SearchOptions {
            mode: self.mode,
            objective: self.objective,
            interior_negative: self.interior_negative,
            epsilon_min: self.epsilon_min,
            solver: SolverSettings {
                feas_tol: self.tol,
                ..self.settings.clone()
            },
        })
    }

    fn record(&self) -> OptionsRecord {
        OptionsRecord {
            certificate_kind: self.kind,
            mode: self.mode,
            objective: self.objective,
            interior_negative: self.interior_negative,
            epsilon_min: self.epsilon_min,
            tol: self.tol,
        }
    }
}

fn lyapunov_report(
    command: &str,
    sys: &System,
    args: &LyapunovArgs,
    start: Instant,
    support: Option<SupportRecord>,
    outcome: Result<(Verdict, String, Option<String>, Option<sonclyap_core::LyapunovResult>), CoreError>,
) -> Result<Report, CliError> {
    let (status, verdict, solver_status, reason, result) = match outcome {
        Ok((verdict, solver, reason, result)) => (Status::of_verdict(verdict), verdict, solver, reason, result),
        Err(CoreError::SolverUnknown(msg)) => (Status::Unknown, Verdict::NotCertified, "unknown".into(), Some(msg), None),
        Err(e) => return Err(e.into()),
    };
    let samples = match &result {
        Some(r) if status == Status::Certified => Some(sample_lyapunov(&r.v, &sys.f, SAMPLE_POINTS, args.seed)?),
        _ => None,
    };
    let mut report = Report::new(command, &sys.raw, status, elapsed_ms(start));
    report.lyapunov = Some(LyapunovReport {
        system: sys.file.clone(),
        options: args.record(),
        support,
        verdict,
        solver_status,
        reason,
        result,
        samples,
    });
    Ok(report)
}

/// Checks the system's candidate (or `candidate`, which takes precedence).
pub fn verify(path: &Path, candidate: Option<&str>, args: &LyapunovArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut sys = load_system(path)?;
    if let Some(text) = candidate {
        sys.file.candidate = Some(text.to_string());
        let raw = std::mem::take(&mut sys.raw);
        sys = parse_system(sys.file)?;
        sys.raw = raw;
        sys.raw.extend_from_slice(b"\ncandidate: ");
        sys.raw.extend_from_slice(text.as_bytes());
    }
    let v = sys
        .candidate
        .clone()
        .ok_or_else(|| CliError::Usage(format!("{}: no candidate given", path.display())))?;
    let options = args.options()?;
    let outcome = verify_candidate(&v, &sys.f, args.kind, &options)
        .map(|r| (r.verdict, r.solver_status, r.reason, r.result));
    lyapunov_report("verify", &sys, args, start, None, outcome)
}

/// How `search` builds its support.
#[derive(Clone, Debug, Default)]
pub struct SupportArgs {
    pub degree: Option<u32>,
    pub template: Option<Template>,
    pub extras: Option<String>,
}

pub fn search(path: &Path, support: &SupportArgs, args: &LyapunovArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let sys = load_system(path)?;
    let n = sys.f.nvars();
    let extras = match &support.extras {
        Some(s) => parse_extras(s, sys.vars())?,
        None => Vec::new(),
    };
    let explicit = support.degree.is_some() || support.template.is_some() || !extras.is_empty();
    let record = match (&sys.support, explicit) {
        (Some(exponents), false) => SupportRecord {
            degree: None,
            template: None,
            extras: Vec::new(),
            exponents: exponents.clone(),
        },
        _ => {
            let degree = support.degree.unwrap_or(2);
            let template = support.template.unwrap_or(if extras.is_empty() {
                Template::Diagonal
            } else {
                Template::DiagonalPlus
            });
            SupportRecord {
                exponents: generate_support(n, degree, template, &extras).map_err(|e| match e {
                    CoreError::InvalidArgument(m) => CliError::Usage(m),
                    other => CliError::Core(other),
                })?,
                degree: Some(degree),
                template: Some(template),
                extras,
            }
        }
    };
    let options = args.options()?;
    let outcome = search_outcome(&sys.f, &record.exponents, args.kind, &options).map(|o| match o {
        SearchOutcome::Found(r) => {
            let reason = (r.verdict == Verdict::NotCertified).then(|| "margin polynomials are not positive definite".into());
            (r.verdict, "feasible".into(), reason, Some(*r))
        }
        SearchOutcome::Infeasible { detail } => (
            Verdict::NotCertified,
            detail,
            Some("no Lyapunov function with certificates exists on this support".into()),
            None,
        ),
        SearchOutcome::Rejected { reason } => (Verdict::NotCertified, "not run".into(), Some(reason), None),
    });
    lyapunov_report("search", &sys, args, start, Some(record), outcome)
}

/// Trajectory rows `t, x₁, …, xₙ[, V]`.
pub struct SimulateArgs {
    pub x0: String,
    pub t_end: f64,
    pub dt: f64,
    pub candidate: Option<String>,
    pub lyapunov: Option<PathBuf>,
    pub every: usize,
}

pub struct Trajectory {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn simulate_system(path: &Path, args: &SimulateArgs) -> Result<Trajectory, CliError> {
    let sys = load_system(path)?;
    let x0 = parse_point(&args.x0, sys.f.nvars())?;
    let v = match (&args.candidate, &args.lyapunov) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give --candidate or --lyapunov, not both".into())),
        (Some(text), None) => Some(parse_poly(text, sys.vars()).map_err(|e| parse_error("candidate", text, e))?),
        (None, Some(report)) => {
            let r = Report::read(report)?;
            let v = r
                .lyapunov
                .and_then(|l| l.result)
                .map(|res| res.v)
                .ok_or_else(|| CliError::Data(format!("{}: report has no Lyapunov function", report.display())))?;
            v.vars().check_same(sys.vars())?;
            Some(v)
        }
        (None, None) => None,
    };
    if args.every == 0 {
        return Err(CliError::Usage("--every must be at least 1".into()));
    }
    let samples = simulate(&sys.f, &x0, args.t_end, args.dt, v.as_ref()).map_err(|e| match e {
        CoreError::InvalidArgument(m) => CliError::Usage(m),
        other => CliError::Core(other),
    })?;
    let mut header = vec!["t".to_string()];
    header.extend(sys.vars().names().iter().cloned());
    if v.is_some() {
        header.push("V".into());
    }
    let last = samples.len() - 1;
    let rows = samples
        .into_iter()
        .enumerate()
        .filter(|(i, _)| i % args.every == 0 || *i == last)
        .map(|(_, s)| {
            let mut row = vec![s.t];
            row.extend(s.x);
            row.extend(s.v);
            row
        })
        .collect();
    Ok(Trajectory { header, rows })
}

pub fn write_csv<W: std::io::Write>(out: W, traj: &Trajectory) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| CliError::Write(e.to_string());
    w.write_record(&traj.header).map_err(err)?;
    for row in &traj.rows {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Write(e.to_string()))
}

/// Outcome of re-checking a report without the solver.
#[derive(Debug)]
pub struct Replay {
    pub recorded: Status,
    pub replayed: Status,
    pub matches: bool,
    pub notes: Vec<String>,
}

pub fn replay(path: &Path) -> Result<Replay, CliError> {
    let report = Report::read(path)?;
    let mut notes = Vec::new();
    let mut matches = true;
    let replayed = if let Some(c) = &report.check {
        replay_check(c, &mut notes, &mut matches)?
    } else if let Some(l) = &report.lyapunov {
        replay_lyapunov(l, report.status, &mut notes, &mut matches)?
    } else {
        return Err(CliError::Data(format!("{}: report has no payload", path.display())));
    };
    let matches = matches && replayed == report.status;
    Ok(Replay {
        recorded: report.status,
        replayed,
        matches,
        notes,
    })
}

fn replay_check(c: &CheckReport, notes: &mut Vec<String>, matches: &mut bool) -> Result<Status, CliError> {
    let p = &c.poly;
    if let Some(circ) = &c.circuit {
        let nonneg = is_nonneg_circuit(p)?;
        if nonneg != circ.nonnegative {
            *matches = false;
            notes.push(format!("circuit nonnegativity recomputed as {nonneg}"));
        }
        return Ok(if nonneg { Status::Certified } else { Status::NotCertified });
    }
    if let (Some(w), Some(recorded)) = (&c.witness, &c.witness_check) {
        let fresh = match w {
            Certificate::Sonc(w) => check_sonc_witness(p, w),
            Certificate::Dsonc(w) => check_dsonc_witness(p, w),
        };
        if classify(&fresh) != classify(recorded) {
            *matches = false;
            notes.push(format!(
                "witness classification changed: {:?} -> {:?}",
                classify(recorded),
                classify(&fresh)
            ));
        }
        return Ok(if fresh.ok { Status::Certified } else { Status::Unknown });
    }
    if let Some(cx) = &c.counterexample {
        let value = p.evaluate(&cx.point)?;
        notes.push(format!("p = {value:e} at the recorded point"));
        return Ok(if value < 0.0 { Status::NotCertified } else { Status::Unknown });
    }
    notes.push("no witness or counterexample to re-check; the solver outcome stands".into());
    Ok(if c.solver_status == "infeasible" {
        Status::NotCertified
    } else {
        Status::Unknown
    })
}

fn replay_lyapunov(
    l: &LyapunovReport,
    recorded: Status,
    notes: &mut Vec<String>,
    matches: &mut bool,
) -> Result<Status, CliError> {
    let Some(r) = &l.result else {
        notes.push("no certificate to re-check; the solver outcome stands".into());
        return Ok(recorded);
    };
    let sys = parse_system(l.system.clone())?;
    let verdict = r.reverify(&sys.f)?;
    if verdict != l.verdict {
        *matches = false;
        notes.push(format!("verdict recomputed as {verdict}, recorded {}", l.verdict));
    }
    for (name, cert, poly, recorded) in [
        ("V - p1", &r.cert_v, r.certified_v()?, &r.check_v),
        ("-dV/dt - p2", &r.cert_dv, r.certified_dv()?, &r.check_dv),
    ] {
        let fresh = cert.check(&poly);
        if classify(&fresh) != classify(recorded) {
            *matches = false;
            notes.push(format!(
                "{name}: witness classification changed: {:?} -> {:?}",
                classify(recorded),
                classify(&fresh)
            ));
        }
    }
    Ok(Status::of_verdict(verdict))
}

/// One-line human summary; not a stable format.
pub fn summary(report: &Report) -> String {
    if let Some(c) = &report.check {
        let mut s = format!("{}: {} ({})", report.status, c.display, c.certificate_kind);
        if let Some(circ) = &c.circuit {
            if let (Some(t), Some(b)) = (circ.theta, circ.inner_coefficient) {
                s += &format!(", theta = {t}, inner coefficient = {b}");
            }
        }
        if let Some(w) = &c.witness {
            let blocks = match w {
                Certificate::Sonc(w) => w.blocks.len(),
                Certificate::Dsonc(w) => w.blocks.len(),
            };
            s += &format!(", {blocks} block(s)");
        }
        if let Some(cx) = &c.counterexample {
            s += &format!(", negative ({:e}) at {:?}", cx.value, cx.point);
        } else if let Some(r) = &c.reason {
            s += &format!(", {r}");
        }
        return s;
    }
    if let Some(l) = &report.lyapunov {
        let mut s = format!("{}: {}", report.status, l.verdict);
        if let Some(r) = &l.result {
            s += &format!(", V = {}", r.v);
        }
        if let Some(reason) = &l.reason {
            s += &format!(" ({reason})");
        }
        return s;
    }
    report.status.to_string()
}

/// Where the report for `input` goes when several inputs share `--report`.
pub fn report_path(report: &Path, input: &Path, many: bool) -> PathBuf {
    if many {
        let stem = input.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "report".into());
        report.join(stem).with_extension("json")
    } else {
        report.to_path_buf()
    }
}

