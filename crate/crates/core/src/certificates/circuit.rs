use crate::error::{Error, Result};
use crate::geometry::{detect_circuit, CircuitStructure};
use crate::poly::SparsePoly;

/// Relative slack granted to `|c_β| ≤ Θ`.
const THETA_RTOL: f64 = 1e-9;

fn circuit_of(p: &SparsePoly) -> Result<CircuitStructure> {
    detect_circuit(&p.support()).ok_or(Error::NotCircuit)
}

fn theta(p: &SparsePoly, c: &CircuitStructure) -> Result<f64> {
    let mut log_theta = 0.0;
    for (alpha, &lambda) in &c.lambda {
        let coef = p.coefficient(alpha);
        if coef <= 0.0 {
            return Err(Error::NonPositiveOuter {
                exponent: alpha.entries().to_vec(),
                value: coef,
            });
        }
        log_theta += lambda * (coef / lambda).ln();
    }
    Ok(log_theta.exp())
}

/// `Θ_p = ∏ (c_α / λ_α)^{λ_α}` over the outer terms of a circuit polynomial.
pub fn circuit_number(p: &SparsePoly) -> Result<f64> {
    let c = circuit_of(p)?;
    if c.inner.is_none() {
        return Err(Error::NotCircuit);
    }
    theta(p, &c)
}

/// Nonnegativity of a circuit-supported polynomial: either a sum of monomial
/// squares, or `|c_β| ≤ Θ_p` (`c_β ≥ −Θ_p` for even β).
pub fn is_nonneg_circuit(p: &SparsePoly) -> Result<bool> {
    if p.is_zero() {
        return Ok(true);
    }
    let c = circuit_of(p)?;
    if c.outer.iter().any(|a| p.coefficient(a) <= 0.0) {
        return Ok(false);
    }
    let Some(beta) = &c.inner else {
        return Ok(true);
    };
    let cb = p.coefficient(beta);
    if beta.is_even() && cb >= 0.0 {
        return Ok(true);
    }
    let th = theta(p, &c)?;
    Ok(cb.abs() <= th * (1.0 + THETA_RTOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Variables};

    fn p(s: &str, n: usize) -> SparsePoly {
        let vars = if n == 1 {
            Variables::new(["x"])
        } else if n == 2 {
            Variables::new(["x", "y"])
        } else {
            Variables::indexed(n)
        };
        parse_poly(s, &vars).unwrap()
    }

    #[test]
    fn theta_examples() {
        let q = p("2*y^2 - 2*x^2*y + 2*x^4", 2);
        assert!((circuit_number(&q).unwrap() - 4.0).abs() < 1e-12);
        let motzkin = p("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2);
        assert!((circuit_number(&motzkin).unwrap() - 3.0).abs() < 1e-12);
        let sq = p("x^2 + 1 - 2*x", 1);
        assert!((circuit_number(&sq).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonnegativity_examples() {
        assert!(is_nonneg_circuit(&p("2*y^2 - 2*x^2*y + 2*x^4", 2)).unwrap());
        assert!(is_nonneg_circuit(&p("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2)).unwrap());
        assert!(!is_nonneg_circuit(&p("x^2 + 1 - 2.1*x", 1)).unwrap());
        assert!(is_nonneg_circuit(&p("x^2 + 1 + 2.1*x^0", 1)).unwrap());
        assert!(is_nonneg_circuit(&p("x^4 + y^2", 2)).unwrap());
        assert!(!is_nonneg_circuit(&p("x^4 - y^2", 2)).unwrap());
    }

    #[test]
    fn errors() {
        assert_eq!(circuit_number(&p("x^2 + x", 1)), Err(Error::NotCircuit));
        assert!(matches!(
            circuit_number(&p("x^4 - 1 + x^2", 1)),
            Err(Error::NonPositiveOuter { .. })
        ));
        assert_eq!(is_nonneg_circuit(&p("x + x^3", 1)), Err(Error::NotCircuit));
    }
}
