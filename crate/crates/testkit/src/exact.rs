//! Polynomials with exact rational coefficients, keyed by exponent vectors.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::Q;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RPoly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, Q>,
}

impl RPoly {
    pub fn zero(n: usize) -> RPoly {
        RPoly { n, terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Q)>>(n: usize, terms: I) -> RPoly {
        let mut p = RPoly::zero(n);
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    /// `c·x_j`.
    pub fn var(n: usize, j: usize, c: Q) -> RPoly {
        let mut e = vec![0; n];
        e[j] = 1;
        RPoly::from_terms(n, [(e, c)])
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Q) {
        let entry = self.terms.entry(e).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &RPoly) -> RPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, k: Q) -> RPoly {
        RPoly::from_terms(self.n, self.terms.iter().map(|(e, c)| (e.clone(), c * k)))
    }

    pub fn mul(&self, other: &RPoly) -> RPoly {
        let mut out = RPoly::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn derivative(&self, j: usize) -> RPoly {
        let mut out = RPoly::zero(self.n);
        for (e, c) in &self.terms {
            if e[j] > 0 {
                let mut d = e.clone();
                d[j] -= 1;
                out.add_term(d, c * Q::from_integer(i128::from(e[j])));
            }
        }
        out
    }

    /// `Σ_j ∂_j V · f_j`.
    pub fn lie_derivative(&self, f: &[RPoly]) -> RPoly {
        assert_eq!(f.len(), self.n);
        f.iter()
            .enumerate()
            .fold(RPoly::zero(self.n), |acc, (j, fj)| acc.add(&self.derivative(j).mul(fj)))
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, xi)| acc * num_traits::pow(*xi, k as usize))
            })
            .fold(Q::zero(), |a, b| a + b)
    }

    pub fn to_f64_terms(&self) -> Vec<(Vec<u32>, f64)> {
        self.terms.iter().map(|(e, c)| (e.clone(), crate::to_f64(c))).collect()
    }
}
