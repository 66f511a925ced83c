use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sonclyap_core::certificates::{circuit_number, sonc_membership};
use sonclyap_core::conic::SolverSettings;
use sonclyap_core::geometry::polytope_vertices;
use sonclyap_core::lyapunov::{generate_support, search, Template};
use sonclyap_core::{parse_poly, CertificateKind, DynSystem, Exponent, SearchOptions, Variables};

fn motzkin() -> sonclyap_core::SparsePoly {
    parse_poly("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", &Variables::new(["x", "y"])).unwrap()
}

fn bench(c: &mut Criterion) {
    let m = motzkin();
    c.bench_function("circuit_number/motzkin", |b| b.iter(|| circuit_number(black_box(&m))));
    let settings = SolverSettings::default();
    c.bench_function("sonc_membership/motzkin", |b| b.iter(|| sonc_membership(black_box(&m), &settings)));

    let grid: Vec<Exponent> = (0..=6u32)
        .flat_map(|i| (0..=6u32).flat_map(move |j| (0..=6u32).map(move |k| Exponent::from([i, j, k]))))
        .collect();
    c.bench_function("polytope_vertices/grid_7x7x7", |b| b.iter(|| polytope_vertices(black_box(&grid))));

    let f = DynSystem::parse(&Variables::indexed(2), &["-x1 - 3/2*x1*x2^3", "-x2^3 + 1/2*x1^2*x2^2"]).unwrap();
    let a = generate_support(2, 2, Template::Diagonal, &[]).unwrap();
    let opts = SearchOptions::default();
    c.bench_function("search/example_5_1", |b| b.iter(|| search(black_box(&f), &a, CertificateKind::Sonc, &opts)));
}

criterion_group!(benches, bench);
criterion_main!(benches);
