//! Candidate supports for Lyapunov templates.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    /// Pure even powers `x_j^{2k}` up to the degree.
    Diagonal,
    /// Every even exponent of positive degree up to the degree.
    FullEven,
    /// The diagonal template plus listed extra exponents.
    DiagonalPlus,
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Template::Diagonal => "diagonal",
            Template::FullEven => "full_even",
            Template::DiagonalPlus => "diagonal_plus",
        })
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "diagonal" => Ok(Template::Diagonal),
            "full_even" => Ok(Template::FullEven),
            "diagonal_plus" => Ok(Template::DiagonalPlus),
            other => Err(Error::InvalidArgument(format!("unknown template `{other}`"))),
        }
    }
}

/// Sorted candidate support for `n` variables. `extras` are only used by
/// [`Template::DiagonalPlus`].
pub fn generate_support(n: usize, degree: u32, template: Template, extras: &[Exponent]) -> Result<Vec<Exponent>> {
    if degree < 2 || degree % 2 == 1 {
        return Err(Error::InvalidArgument(format!("degree must be even and at least 2, got {degree}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("no variables".into()));
    }
    let mut out = BTreeSet::new();
    match template {
        Template::Diagonal | Template::DiagonalPlus => {
            for j in 0..n {
                for k in (2..=degree).step_by(2) {
                    out.insert(Exponent::unit(n, j, k));
                }
            }
        }
        Template::FullEven => {
            let mut half = vec![0u32; n];
            enumerate(&mut half, 0, degree / 2, &mut |h| {
                if h.iter().any(|&e| e > 0) {
                    out.insert(Exponent::new(h.iter().map(|e| 2 * e).collect()));
                }
            });
        }
    }
    if template == Template::DiagonalPlus {
        for e in extras {
            if e.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.dim(),
                });
            }
            if e.is_zero() {
                return Err(Error::ZeroExponentInSupport);
            }
            out.insert(e.clone());
        }
    }
    Ok(out.into_iter().collect())
}

/// Visits every vector with nonnegative entries summing to at most `budget`.
fn enumerate(h: &mut Vec<u32>, k: usize, budget: u32, visit: &mut impl FnMut(&[u32])) {
    if k == h.len() {
        visit(h);
        return;
    }
    for e in 0..=budget {
        h[k] = e;
        enumerate(h, k + 1, budget - e, visit);
    }
    h[k] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[&[u32]]) -> Vec<Exponent> {
        let mut out: Vec<Exponent> = v.iter().map(|e| Exponent::new(e.to_vec())).collect();
        out.sort();
        out
    }

    #[test]
    fn templates() {
        assert_eq!(
            generate_support(2, 2, Template::Diagonal, &[]).unwrap(),
            set(&[&[2, 0], &[0, 2]])
        );
        assert_eq!(
            generate_support(2, 4, Template::FullEven, &[]).unwrap(),
            set(&[&[2, 0], &[0, 2], &[4, 0], &[2, 2], &[0, 4]])
        );
        let extras = [Exponent::unit(6, 1, 4), Exponent::unit(6, 4, 4)];
        let s = generate_support(6, 2, Template::DiagonalPlus, &extras).unwrap();
        assert_eq!(s.len(), 8);
        assert!(extras.iter().all(|e| s.contains(e)));
    }

    #[test]
    fn full_even_counts() {
        // even exponents of degree ≤ 8 in two variables: C(4 + 2, 2) − 1
        assert_eq!(generate_support(2, 8, Template::FullEven, &[]).unwrap().len(), 14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(generate_support(2, 3, Template::Diagonal, &[]).is_err());
        assert!(generate_support(2, 0, Template::Diagonal, &[]).is_err());
        assert_eq!(
            generate_support(2, 2, Template::DiagonalPlus, &[Exponent::zero(2)]),
            Err(Error::ZeroExponentInSupport)
        );
        assert!("cubic".parse::<Template>().is_err());
        assert_eq!("full-even".parse::<Template>().unwrap(), Template::FullEven);
    }
}
