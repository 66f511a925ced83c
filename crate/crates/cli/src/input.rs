//! System files, inline expressions and small argument parsers.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sonclyap_core::{parse_poly, DynSystem, Error as CoreError, Exponent, SparsePoly, Variables};

use crate::CliError;

/// `{"vars": [...], "odes": [...], "candidate": ..., "support": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub vars: Vec<String>,
    pub odes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<Vec<u32>>>,
}

/// A loaded system with its parsed parts.
#[derive(Clone, Debug)]
pub struct System {
    pub file: SystemFile,
    pub raw: Vec<u8>,
    pub f: DynSystem,
    pub candidate: Option<SparsePoly>,
    pub support: Option<Vec<Exponent>>,
}

impl System {
    pub fn vars(&self) -> &Variables {
        self.f.vars()
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_system(path: &Path) -> Result<System, CliError> {
    let raw = read_file(path)?;
    let file: SystemFile = serde_json::from_slice(&raw)
        .map_err(|e| CliError::Usage(format!("{}: malformed system file: {e}", path.display())))?;
    let mut sys = parse_system(file)?;
    sys.raw = raw;
    Ok(sys)
}

/// Validates a system file: arity, parsing, and `f(0) = 0`.
pub fn parse_system(file: SystemFile) -> Result<System, CliError> {
    if file.vars.is_empty() {
        return Err(CliError::Data("system has no variables".into()));
    }
    if file.odes.len() != file.vars.len() {
        return Err(CliError::Data(format!(
            "{} variables but {} right-hand sides",
            file.vars.len(),
            file.odes.len()
        )));
    }
    let vars = Variables::new(file.vars.iter().cloned());
    let mut rhs = Vec::with_capacity(file.odes.len());
    for (i, text) in file.odes.iter().enumerate() {
        let p = parse_poly(text, &vars).map_err(|e| parse_error(&format!("ode {}", i + 1), text, e))?;
        let c = p.constant_term();
        if c != 0.0 {
            return Err(CliError::Data(format!(
                "origin is not an equilibrium: d{}/dt = `{text}` has constant term {c}",
                file.vars[i]
            )));
        }
        rhs.push(p);
    }
    let f = DynSystem::new(&vars, rhs).map_err(CliError::Core)?;
    let candidate = file
        .candidate
        .as_deref()
        .map(|text| parse_poly(text, &vars).map_err(|e| parse_error("candidate", text, e)))
        .transpose()?;
    let support = file
        .support
        .as_ref()
        .map(|rows| {
            rows.iter()
                .map(|row| {
                    if row.len() == vars.len() {
                        Ok(Exponent::new(row.clone()))
                    } else {
                        Err(CliError::Data(format!("support entry {row:?} has the wrong length")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    Ok(System {
        file,
        raw: Vec::new(),
        f,
        candidate,
        support,
    })
}

/// Turns a core parse error into a usage error naming the input and position.
pub fn parse_error(what: &str, text: &str, e: CoreError) -> CliError {
    match e {
        CoreError::Syntax { pos, .. } | CoreError::UnknownVariable { pos, .. } | CoreError::InvalidExponent { pos, .. } => {
            CliError::Usage(format!("{what}: {e}\n  {text}\n  {}^", " ".repeat(pos.min(text.len()))))
        }
        other => CliError::Core(other),
    }
}

/// Identifiers appearing in `text`, in natural order (`x2` before `x10`).
pub fn infer_vars(text: &str) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, ch)) = chars.next() {
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut end = i + ch.len_utf8();
            while let Some(&(j, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = j + c.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let name = &text[i..end];
            if !names.iter().any(|n| n == name) {
                names.push(name.to_string());
            }
        } else if ch.is_ascii_digit() || ch == '.' {
            // skip numbers, including exponents such as 1e-3
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '.' {
                    chars.next();
                } else {
                    break;
                }
            }
        }
    }
    names.sort_by_key(|a| natural_key(a));
    names
}

fn natural_key(s: &str) -> (String, u64, String) {
    let stem = s.trim_end_matches(|c: char| c.is_ascii_digit());
    let digits = &s[stem.len()..];
    (stem.to_string(), digits.parse().unwrap_or(0), s.to_string())
}

/// Comma-separated variable names.
pub fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
}

/// Comma-separated floats such as `1,0.5,-2`.
pub fn parse_point(s: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let xs = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("`{t}` is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if xs.len() != n {
        return Err(CliError::Usage(format!("expected {n} coordinates, got {}", xs.len())));
    }
    Ok(xs)
}

/// Monomials such as `x2^4,x5^4` turned into exponents.
pub fn parse_extras(s: &str, vars: &Variables) -> Result<Vec<Exponent>, CliError> {
    split_list(s)
        .into_iter()
        .map(|m| {
            let p = parse_poly(&m, vars).map_err(|e| parse_error("extras", &m, e))?;
            let terms: Vec<_> = p.terms().collect();
            match terms.as_slice() {
                [(e, _)] if !e.is_zero() => Ok((*e).clone()),
                _ => Err(CliError::Usage(format!("extra `{m}` is not a single non-constant monomial"))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infers_variables_in_natural_order() {
        assert_eq!(infer_vars("x10*x2 + 3*x1^2 - 1e-3*y"), ["x1", "x2", "x10", "y"]);
        assert_eq!(infer_vars("2.5 + 1/3"), Vec::<String>::new());
    }

    #[test]
    fn rejects_nonzero_equilibrium() {
        let file = SystemFile {
            vars: vec!["x".into(), "y".into()],
            odes: vec!["y".into(), "x + 2".into()],
            candidate: None,
            support: None,
        };
        let err = parse_system(file).unwrap_err();
        assert!(matches!(err, CliError::Data(ref m) if m.contains("dy/dt") && m.contains("x + 2")));
    }

    #[test]
    fn parse_errors_carry_position() {
        let file = SystemFile {
            vars: vec!["x".into()],
            odes: vec!["x + * 2".into()],
            candidate: None,
            support: None,
        };
        assert!(matches!(parse_system(file), Err(CliError::Usage(m)) if m.contains("position")));
    }

    #[test]
    fn extras_and_points() {
        let vars = Variables::indexed(6);
        let e = parse_extras("x2^4, x5^4", &vars).unwrap();
        assert_eq!(e, [Exponent::unit(6, 1, 4), Exponent::unit(6, 4, 4)]);
        assert!(parse_extras("x1 + x2", &vars).is_err());
        assert!(parse_extras("3", &vars).is_err());
        assert_eq!(parse_point("1, -0.5", 2).unwrap(), [1.0, -0.5]);
        assert!(parse_point("1", 2).is_err());
    }
}
