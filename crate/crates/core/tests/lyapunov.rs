mod common;

use common::{system, to_sparse};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonclyap_core::conic::SolverSettings;
use sonclyap_core::lyapunov::{
    distribute_signs, generate_support, search_dsonc, search_outcome, search_sonc, simulate, verify_candidate,
    SearchOutcome, Template, REDUNDANCY_THRESHOLD,
};
use sonclyap_core::{
    lie_derivative, lie_derivative_symbolic, parse_poly, AffineForm, CertificateKind, DynSystem, Error, Exponent, LinearFormPoly,
    LyapunovResult, Mode, SearchOptions, SparsePoly, Variables, Verdict,
};
use sonclyap_testkit::exact::RPoly;
use sonclyap_testkit::q;
use sonclyap_testkit::sampling::box_points;

fn sys(odes: &[&str]) -> DynSystem {
    DynSystem::parse(&Variables::indexed(odes.len()), odes).unwrap()
}

fn example_33() -> DynSystem {
    sys(&["-x1^3 - x1 - x1*x3^2", "x1^2 - x2", "-x3"])
}

fn example_51() -> DynSystem {
    sys(&["-x1 - 3/2*x1*x2^3", "-x2^3 + 1/2*x1^2*x2^2"])
}

fn example_53() -> DynSystem {
    sys(&[
        "-x1^3*x2^2 + x1*x2^4 - x1*x3^2",
        "-2*x1^2*x2^3 + 5*x1^2*x2*x3^2 + x2^2*x3^3",
        "-3*x1^2*x2^2*x3 - x2^3*x3^2 - x3^5 + x1^2*x3",
    ])
}

fn opts(mode: Mode, interior_negative: bool) -> SearchOptions {
    SearchOptions {
        mode,
        interior_negative,
        ..SearchOptions::default()
    }
}

fn diagonal(n: usize) -> Vec<Exponent> {
    generate_support(n, 2, Template::Diagonal, &[]).unwrap()
}

/// Everything a returned result claims, re-derived without the solver.
fn assert_sound(r: &LyapunovResult, f: &DynSystem, seed: u64) {
    assert_eq!(r.reverify(f).unwrap(), r.verdict);
    assert!(r.check_v.ok && r.check_dv.ok);
    let vdot = lie_derivative(&r.v, f).unwrap();
    for x in box_points(f.nvars(), 10_000, 1.0, seed) {
        let norm2: f64 = x.iter().map(|t| t * t).sum();
        if norm2 < 1e-6 {
            continue;
        }
        let v = r.v.evaluate(&x).unwrap();
        let d = vdot.evaluate(&x).unwrap();
        if r.verdict != Verdict::NotCertified {
            assert!(v > 0.0, "V({x:?}) = {v}");
            assert!(d <= 1e-9 * (1.0 + v.abs()), "dV/dt({x:?}) = {d}");
        }
        if r.verdict == Verdict::AsymptoticallyStable {
            assert!(d < 0.0, "dV/dt({x:?}) = {d}");
        }
    }
}

#[test]
fn example_33_derivative_is_exact() {
    let n = 3;
    let x = |j| RPoly::var(n, j, q(1, 1));
    let cube = |j| x(j).mul(&x(j)).mul(&x(j));
    let f = [
        cube(0).scale(q(-1, 1)).add(&x(0).scale(q(-1, 1))).add(&x(0).mul(&x(2)).mul(&x(2)).scale(q(-1, 1))),
        x(0).mul(&x(0)).add(&x(1).scale(q(-1, 1))),
        x(2).scale(q(-1, 1)),
    ];
    let v = x(0).mul(&x(0)).add(&x(1).mul(&x(1))).add(&x(2).mul(&x(2)));
    let exact = v.lie_derivative(&f).scale(q(-1, 1));
    let vars = Variables::indexed(3);
    let got = lie_derivative(&to_sparse(&v, &vars), &system(&vars, &f)).unwrap().neg();
    assert_eq!(got, to_sparse(&exact, &vars));
    let printed = parse_poly("2*x1^4 + 2*x1^2*x3^2 - 2*x1^2*x2 + 2*x1^2 + 2*x2^2 + 2*x3^2", &vars).unwrap();
    assert_eq!(got, printed);
}

#[test]
fn example_33_verifies_with_both_kinds() {
    let f = example_33();
    let v = parse_poly("x1^2 + x2^2 + x3^2", f.vars()).unwrap();
    for kind in [CertificateKind::Sonc, CertificateKind::Dsonc] {
        let report = verify_candidate(&v, &f, kind, &SearchOptions::default()).unwrap();
        assert_eq!(report.verdict, Verdict::AsymptoticallyStable, "{kind}");
        assert_sound(report.result.as_ref().unwrap(), &f, 1);
    }
}

#[test]
fn example_51_search_is_sound() {
    let f = example_51();
    for kind in [CertificateKind::Sonc, CertificateKind::Dsonc] {
        let r = sonclyap_core::lyapunov::search(&f, &diagonal(2), kind, &SearchOptions::default())
            .unwrap()
            .unwrap_or_else(|| panic!("{kind}: no V"));
        assert_eq!(r.verdict, Verdict::AsymptoticallyStable);
        assert_eq!(r.v.len(), 2);
        assert_sound(&r, &f, 2);
    }
}

#[test]
fn found_candidates_verify_again() {
    let f = example_51();
    let r = search_sonc(&f, &diagonal(2), &SearchOptions::default()).unwrap().unwrap();
    for kind in [CertificateKind::Sonc, CertificateKind::Dsonc] {
        let again = verify_candidate(&r.v, &f, kind, &SearchOptions::default()).unwrap();
        assert_eq!(again.verdict, r.verdict, "{kind}");
    }
}

#[test]
fn example_53_needs_negative_interior_terms() {
    let f = example_53();
    let a = diagonal(3);
    assert!(search_sonc(&f, &a, &opts(Mode::Asymptotic, false)).unwrap().is_none());
    let r = search_sonc(&f, &a, &opts(Mode::Stable, true)).unwrap().unwrap();
    assert_eq!(r.verdict, Verdict::Stable);
    let c: Vec<f64> = r.v.terms().map(|(_, c)| c).collect();
    assert!(c.iter().all(|&ci| (ci - c[0]).abs() <= 1e-6 * c[0]), "{}", r.v);
    assert_sound(&r, &f, 3);
    // DSONC cannot certify the Motzkin-shaped derivative
    assert!(search_dsonc(&f, &a, &opts(Mode::Stable, true)).unwrap().is_none());
}

#[test]
fn sonc_search_finds_whatever_dsonc_finds() {
    let mut cases: Vec<(DynSystem, Vec<Exponent>, SearchOptions)> = vec![
        (example_33(), diagonal(3), SearchOptions::default()),
        (example_51(), diagonal(2), SearchOptions::default()),
        (sys(&["x2", "-x1"]), diagonal(2), opts(Mode::Stable, false)),
        (example_53(), diagonal(3), opts(Mode::Stable, true)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        cases.push((random_system(&mut rng), diagonal(2), SearchOptions::default()));
    }
    let mut dsonc_found = 0;
    for (i, (f, a, o)) in cases.iter().enumerate() {
        let d = search_dsonc(f, a, o);
        let s = search_sonc(f, a, o);
        if let Ok(Some(rd)) = &d {
            dsonc_found += 1;
            assert_sound(rd, f, 100 + i as u64);
            let rs = s.as_ref().unwrap_or_else(|e| panic!("case {i}: {e}")).as_ref();
            let rs = rs.unwrap_or_else(|| panic!("case {i}: DSONC found V but SONC did not"));
            assert_sound(rs, f, 200 + i as u64);
        }
    }
    assert!(dsonc_found >= 4);
}

/// `ẋ = −a x + (cubic cross terms)` with random small coefficients.
fn random_system(rng: &mut ChaCha8Rng) -> DynSystem {
    let vars = Variables::indexed(2);
    let mut rhs = Vec::new();
    for j in 0..2 {
        let a = rng.gen_range(1..=4);
        let mut text = format!("-{a}*x{}", j + 1);
        for e in [[3, 0], [2, 1], [1, 2], [0, 3]] {
            let c = rng.gen_range(-3..=3);
            if c != 0 {
                text += &format!(" + ({c}/2)*x1^{}*x2^{}", e[0], e[1]);
            }
        }
        rhs.push(parse_poly(&text, &vars).unwrap());
    }
    DynSystem::new(&vars, rhs).unwrap()
}

#[test]
fn random_systems_never_get_false_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..25 {
        let f = random_system(&mut rng);
        for degree in [2, 4] {
            let a = generate_support(2, degree, Template::FullEven, &[]).unwrap();
            for kind in [CertificateKind::Sonc, CertificateKind::Dsonc] {
                match sonclyap_core::lyapunov::search(&f, &a, kind, &SearchOptions::default()) {
                    Ok(Some(r)) => assert_sound(&r, &f, 300 + i),
                    Ok(None) | Err(Error::SolverUnknown(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

#[test]
fn pendulum_is_stable_but_not_asymptotically() {
    let f = sys(&["x2", "-x1"]);
    let v = parse_poly("1/2*x1^2 + 1/2*x2^2", f.vars()).unwrap();
    assert!(lie_derivative(&v, &f).unwrap().is_zero());
    let stable = verify_candidate(&v, &f, CertificateKind::Sonc, &opts(Mode::Stable, false)).unwrap();
    assert_eq!(stable.verdict, Verdict::Stable);
    assert_sound(stable.result.as_ref().unwrap(), &f, 4);
    let asym = verify_candidate(&v, &f, CertificateKind::Sonc, &opts(Mode::Asymptotic, false)).unwrap();
    assert_eq!(asym.verdict, Verdict::NotCertified);
}

#[test]
fn example_54_has_no_certificate_up_to_degree_8() {
    let f = sys(&["x2 - x1^3 + x1*x2^4", "-x1^3 - x2^5"]);
    for degree in [2, 4, 6, 8] {
        let a = generate_support(2, degree, Template::FullEven, &[]).unwrap();
        let out = search_outcome(&f, &a, CertificateKind::Sonc, &SearchOptions::default()).unwrap();
        assert!(
            matches!(out, SearchOutcome::Infeasible { .. } | SearchOutcome::Rejected { .. }),
            "degree {degree}: {out:?}"
        );
    }
}

#[test]
fn system_without_polynomial_lyapunov_function_is_never_certified() {
    let f = sys(&["-x1 + x1*x2", "-x2"]);
    for degree in [2, 4, 6, 8] {
        let a = generate_support(2, degree, Template::FullEven, &[]).unwrap();
        for kind in [CertificateKind::Sonc, CertificateKind::Dsonc] {
            match search_outcome(&f, &a, kind, &SearchOptions::default()) {
                Ok(SearchOutcome::Found(r)) => {
                    assert_sound(&r, &f, 5);
                    panic!("degree {degree} {kind}: a certified V cannot exist, got {}", r.v);
                }
                Ok(_) | Err(Error::SolverUnknown(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

/// Cyclic projections onto the hyperplanes `h = 0`.
fn project_onto(eqs: &[AffineForm], y: &mut [f64]) {
    for _ in 0..200 {
        for h in eqs {
            let norm2: f64 = h.weights().map(|(_, w)| w * w).sum();
            if norm2 == 0.0 {
                continue;
            }
            let r = h.eval(y) / norm2;
            for (i, w) in h.weights() {
                y[i] -= r * w;
            }
        }
    }
}

#[test]
fn pruned_sign_constraints_are_implied() {
    for (f, a, flag) in [
        (example_33(), diagonal(3), false),
        (example_51(), diagonal(2), false),
        (example_53(), diagonal(3), true),
    ] {
        let v = LinearFormPoly::template(f.vars(), &a, "c").unwrap();
        let d = lie_derivative_symbolic(&v, &f).unwrap().scale(-1.0);
        let s = distribute_signs(&v, &d, flag, &SolverSettings::default()).unwrap();
        assert!(!s.contradictory);
        let k = v.num_decision();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut hits = 0;
        for _ in 0..20_000 {
            let mut y: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            project_onto(&s.equalities, &mut y);
            if s.equalities.iter().any(|h| h.eval(&y).abs() > 1e-9) || s.inequalities.iter().any(|g| g.eval(&y) < 0.0) {
                continue;
            }
            hits += 1;
            for g in &s.pruned {
                assert!(g.eval(&y) >= -REDUNDANCY_THRESHOLD, "pruned {g:?} fails at {y:?}");
            }
        }
        assert!(hits > 100, "{hits} feasible samples");
        // classifying again from the same data gives the same answer
        assert_eq!(distribute_signs(&v, &d, flag, &SolverSettings::default()).unwrap(), s);
    }
}

#[test]
fn example_53_sign_pattern_leaves_only_zero() {
    // c₁ = c₂ from the pinned odd vertex, then c₁ ≤ 0 and c₃ ≤ 0 follow
    let f = example_53();
    let v = LinearFormPoly::template(f.vars(), &diagonal(3), "c").unwrap();
    let d = lie_derivative_symbolic(&v, &f).unwrap().scale(-1.0);
    let s = distribute_signs(&v, &d, false, &SolverSettings::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10_000 {
        let mut y: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        project_onto(&s.equalities, &mut y);
        let feasible = s.inequalities.iter().all(|g| g.eval(&y) >= -1e-12);
        assert!(!feasible || y.iter().all(|c| c.abs() < 1e-9), "{y:?}");
    }
}

#[test]
fn certified_v_decreases_along_trajectories() {
    let f = example_51();
    let r = search_sonc(&f, &diagonal(2), &SearchOptions::default()).unwrap().unwrap();
    for x0 in [[1.0, 1.0], [-0.5, 2.0], [3.0, -1.0]] {
        let traj = simulate(&f, &x0, 5.0, 1e-3, Some(&r.v)).unwrap();
        let vs: Vec<f64> = traj.iter().map(|s| s.v.unwrap()).collect();
        assert!(vs.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{x0:?}");
        assert!(vs.last().unwrap() < &(0.5 * vs[0]));
    }
}

#[test]
fn invalid_inputs_are_errors() {
    let f = sys(&["x2 + 1", "-x1"]);
    assert!(matches!(
        search_sonc(&f, &diagonal(2), &SearchOptions::default()),
        Err(Error::NoOriginEquilibrium { index: 0, .. })
    ));
    let g = example_51();
    let zero: SparsePoly = SparsePoly::zero(g.vars());
    assert_eq!(
        verify_candidate(&zero, &g, CertificateKind::Sonc, &SearchOptions::default()),
        Err(Error::ZeroCandidate)
    );
    assert!(matches!(
        verify_candidate(&parse_poly("x1^2", g.vars()).unwrap(), &g, CertificateKind::Circuit, &SearchOptions::default()),
        Err(Error::InvalidArgument(_))
    ));
}
