mod common;

use common::assert_nonneg_on_samples;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonclyap_core::certificates::{
    check_sonc_witness, circuit_number, dsonc_membership, find_negative_point, is_nonneg_circuit, sonc_membership,
    verify_dsonc_witness, verify_sonc_witness, DsoncWitness, SoncWitness,
};
use sonclyap_core::conic::SolverSettings;
use sonclyap_core::{parse_poly, Error, Exponent, SparsePoly, Variables};
use sonclyap_testkit::{hull, to_f64};

/// A random simplicial circuit with exact barycentric weights.
struct Circuit {
    n: usize,
    outer: Vec<Vec<u32>>,
    beta: Vec<u32>,
    lambda: Vec<f64>,
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    loop {
        let n = rng.gen_range(1..=3);
        let outer: Vec<Vec<u32>> = (0..=n).map(|_| (0..n).map(|_| 2 * rng.gen_range(0..=3)).collect()).collect();
        let refs: Vec<&[u32]> = outer.iter().map(Vec::as_slice).collect();
        if !hull::affinely_independent(&refs) {
            continue;
        }
        for _ in 0..50 {
            let beta: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=6)).collect();
            let Some(lambda) = hull::barycentric(&beta, &refs) else { continue };
            if lambda.iter().all(|l| *l > 0.into()) {
                return Circuit {
                    n,
                    outer,
                    beta,
                    lambda: lambda.iter().map(to_f64).collect(),
                };
            }
        }
    }
}

impl Circuit {
    fn poly(&self, outer_coefs: &[f64], cb: f64) -> SparsePoly {
        let vars = Variables::indexed(self.n);
        let terms = self
            .outer
            .iter()
            .zip(outer_coefs)
            .map(|(a, &c)| (Exponent::new(a.clone()), c))
            .chain([(Exponent::new(self.beta.clone()), cb)]);
        SparsePoly::from_terms(&vars, terms).unwrap()
    }

    fn beta_even(&self) -> bool {
        self.beta.iter().all(|b| b % 2 == 0)
    }
}

fn st() -> SolverSettings {
    SolverSettings::default()
}

#[test]
fn circuit_number_agrees_with_relative_entropy_program() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let c = random_circuit(&mut rng);
        let coefs: Vec<f64> = (0..c.outer.len()).map(|_| f64::from(rng.gen_range(1..=8)) / 2.0).collect();
        let theta: f64 = coefs.iter().zip(&c.lambda).map(|(a, l)| (a / l).powf(*l)).product();
        let dual: f64 = coefs.iter().zip(&c.lambda).map(|(a, l)| a.powf(*l)).product();
        let s = [0.5, 0.95, 1.05, 2.0][case % 4];
        let sign = if c.beta_even() || rng.gen_bool(0.5) { -1.0 } else { 1.0 };
        let p = c.poly(&coefs, sign * s * theta);

        let got = circuit_number(&p).unwrap();
        assert!((got - theta).abs() <= 1e-9 * theta, "case {case}: {got} vs {theta}");

        let nonneg = s < 1.0;
        assert_eq!(is_nonneg_circuit(&p).unwrap(), nonneg, "case {case}: {p}");
        match sonc_membership(&p, &st()) {
            Ok(Some(w)) => {
                assert!(nonneg, "case {case}: {p} certified past the circuit number");
                assert!(verify_sonc_witness(&p, &w));
                assert_nonneg_on_samples(&p, case as u64);
            }
            Ok(None) => assert!(!nonneg, "case {case}: {p} rejected below the circuit number"),
            Err(e) => panic!("case {case}: {p}: {e}"),
        }

        // the dual cone admits |c_β| ≤ ∏ c_α^λ_α on a circuit
        let q = c.poly(&coefs, -[0.9, 1.1][case % 2] * dual);
        let dsonc = dsonc_membership(&q, &st()).unwrap();
        assert_eq!(dsonc.is_some(), case % 2 == 0, "case {case}: {q}");
        if let Some(w) = dsonc {
            assert!(verify_dsonc_witness(&q, &w));
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng) -> SparsePoly {
    let vars = Variables::indexed(2);
    let mut terms = vec![(Exponent::from([0, 0]), f64::from(rng.gen_range(1..=6)))];
    for _ in 0..rng.gen_range(2..=4) {
        let e = Exponent::from([2 * rng.gen_range(0..=3), 2 * rng.gen_range(0..=3)]);
        terms.push((e, f64::from(rng.gen_range(2..=12)) / 2.0));
    }
    for _ in 0..rng.gen_range(1..=3) {
        let e = Exponent::from([rng.gen_range(0..=5), rng.gen_range(0..=5)]);
        let c = f64::from(rng.gen_range(1..=6)) / 4.0;
        terms.push((e, if rng.gen_bool(0.5) { -c } else { c }));
    }
    SparsePoly::from_terms(&vars, terms).unwrap()
}

#[test]
fn dsonc_is_contained_in_sonc() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut dsonc_hits = 0;
    for case in 0..50 {
        let p = random_poly(&mut rng);
        let Some(w) = dsonc_membership(&p, &st()).unwrap_or_else(|e| panic!("case {case}: {p}: {e}")) else {
            continue;
        };
        dsonc_hits += 1;
        assert!(verify_dsonc_witness(&p, &w), "case {case}: {p}");
        let implied = w.to_sonc(&p);
        let check = check_sonc_witness(&p, &implied);
        assert!(check.ok, "case {case}: {p}: {:?}", check.failure);
        assert!(!matches!(sonc_membership(&p, &st()), Ok(None)), "case {case}: {p}");
        assert_nonneg_on_samples(&p, 1000 + case);
    }
    assert!(dsonc_hits >= 10, "only {dsonc_hits} DSONC members; the sample says little");
}

#[test]
fn accepted_sonc_certificates_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut accepted = 0;
    for case in 0..50 {
        let p = random_poly(&mut rng);
        match sonc_membership(&p, &st()) {
            Ok(Some(w)) => {
                accepted += 1;
                assert!(verify_sonc_witness(&p, &w));
                assert_nonneg_on_samples(&p, 2000 + case);
            }
            Ok(None) | Err(Error::SolverUnknown(_)) => {}
            Err(e) => panic!("case {case}: {p}: {e}"),
        }
    }
    assert!(accepted >= 10, "only {accepted} SONC members");
}

#[test]
fn witnesses_survive_json() {
    let vars = Variables::new(["x", "y"]);
    let p = parse_poly("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2 + x*y^2 + 2*x^2", &vars).unwrap();
    let w = sonc_membership(&p, &st()).unwrap().unwrap();
    let back: SoncWitness = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(back, w);
    assert!(verify_sonc_witness(&p, &back));

    let q = parse_poly("4*y^2 - x^2*y + 4*x^4 + 2 - x*y", &vars).unwrap();
    let w = dsonc_membership(&q, &st()).unwrap().unwrap();
    let back: DsoncWitness = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(back, w);
    assert!(verify_dsonc_witness(&q, &back));
}

#[test]
fn motzkin_is_on_both_boundaries() {
    let vars = Variables::new(["x", "y"]);
    let m = parse_poly("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", &vars).unwrap();
    assert!((circuit_number(&m).unwrap() - 3.0).abs() < 1e-12);
    let w = sonc_membership(&m, &st()).unwrap().unwrap();
    assert!(verify_sonc_witness(&m, &w));
    assert!(dsonc_membership(&m, &st()).unwrap().is_none());
    // any lift of the inner coefficient leaves the cone
    let lifted = parse_poly("x^4*y^2 + x^2*y^4 + 1 - 3.001*x^2*y^2", &vars).unwrap();
    assert!(sonc_membership(&lifted, &st()).unwrap().is_none());
    let cx = find_negative_point(&lifted, 0).expect("negative near (1, 1)");
    assert!(lifted.evaluate(&cx.point).unwrap() < 0.0);
}
