//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := number ('/' number)? | ident | '(' expr ')'
//! ```

use super::{SparsePoly, Variables};
use crate::error::{Error, Result};

/// Parses `text` into a polynomial over `vars`.
pub fn parse_poly(text: &str, vars: &Variables) -> Result<SparsePoly> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars,
        end: text.len(),
    };
    let p = parser.expr()?;
    match parser.peek() {
        None => Ok(p),
        Some(tok) => Err(Error::Syntax {
            pos: tok.pos,
            msg: format!("unexpected {}", tok.kind.describe()),
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Number { value: f64, integer: Option<u64> },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Number { value, .. } => format!("number {value}"),
            Kind::Ident(s) => format!("identifier `{s}`"),
            Kind::Plus => "`+`".into(),
            Kind::Minus => "`-`".into(),
            Kind::Star => "`*`".into(),
            Kind::Slash => "`/`".into(),
            Kind::Caret => "`^`".into(),
            Kind::LParen => "`(`".into(),
            Kind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let single = match b {
            b'+' => Some(Kind::Plus),
            b'-' => Some(Kind::Minus),
            b'*' => Some(Kind::Star),
            b'/' => Some(Kind::Slash),
            b'^' => Some(Kind::Caret),
            b'(' => Some(Kind::LParen),
            b')' => Some(Kind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            tokens.push(Token { kind, pos: start });
            i += 1;
        } else if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_digit() || b == b'.' {
            let mut saw_fraction = false;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                saw_fraction |= bytes[i] == b'.';
                i += 1;
            }
            let mut saw_exp = false;
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                    saw_exp = true;
                }
            }
            let lexeme = &text[start..i];
            let value: f64 = lexeme.parse().map_err(|_| Error::Syntax {
                pos: start,
                msg: format!("malformed number `{lexeme}`"),
            })?;
            let integer = if saw_fraction || saw_exp {
                None
            } else {
                lexeme.parse::<u64>().ok()
            };
            tokens.push(Token {
                kind: Kind::Number { value, integer },
                pos: start,
            });
        } else if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Token {
                kind: Kind::Ident(text[start..i].to_string()),
                pos: start,
            });
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(Error::Syntax {
                pos: start,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a Variables,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn eat(&mut self, kind: &Kind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn expr(&mut self) -> Result<SparsePoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Kind::Plus) {
                acc = acc.add(&self.term()?)?;
            } else if self.eat(&Kind::Minus) {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly> {
        let mut acc = self.unary()?;
        while self.eat(&Kind::Star) {
            acc = acc.mul(&self.unary()?)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<SparsePoly> {
        if self.eat(&Kind::Minus) {
            Ok(self.unary()?.neg())
        } else if self.eat(&Kind::Plus) {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<SparsePoly> {
        let base = self.atom()?;
        if !self.eat(&Kind::Caret) {
            return Ok(base);
        }
        let pos = self.here();
        match self.next().map(|t| t.kind) {
            Some(Kind::Number {
                integer: Some(k), ..
            }) => {
                let k = u32::try_from(k).map_err(|_| Error::InvalidExponent {
                    pos,
                    msg: "exponent too large".into(),
                })?;
                Ok(base.pow(k))
            }
            Some(Kind::Number { value, .. }) => Err(Error::InvalidExponent {
                pos,
                msg: format!("exponent {value} is not a nonnegative integer"),
            }),
            Some(Kind::Minus) => Err(Error::InvalidExponent {
                pos,
                msg: "negative exponents are not allowed".into(),
            }),
            Some(other) => Err(Error::InvalidExponent {
                pos,
                msg: format!("expected an integer literal, found {}", other.describe()),
            }),
            None => Err(Error::InvalidExponent {
                pos,
                msg: "missing exponent".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<SparsePoly> {
        let pos = self.here();
        match self.next().map(|t| t.kind) {
            Some(Kind::Number { value, .. }) => {
                if self.eat(&Kind::Slash) {
                    let dpos = self.here();
                    match self.next().map(|t| t.kind) {
                        Some(Kind::Number { value: den, .. }) if den != 0.0 => {
                            Ok(SparsePoly::constant(self.vars, value / den))
                        }
                        Some(Kind::Number { .. }) => Err(Error::Syntax {
                            pos: dpos,
                            msg: "division by zero".into(),
                        }),
                        _ => Err(Error::Syntax {
                            pos: dpos,
                            msg: "expected a number after `/`".into(),
                        }),
                    }
                } else {
                    Ok(SparsePoly::constant(self.vars, value))
                }
            }
            Some(Kind::Ident(name)) => match self.vars.index_of(&name) {
                Some(j) => Ok(SparsePoly::var(self.vars, j)),
                None => Err(Error::UnknownVariable { name, pos }),
            },
            Some(Kind::LParen) => {
                let inner = self.expr()?;
                if self.eat(&Kind::RParen) {
                    Ok(inner)
                } else {
                    Err(Error::Syntax {
                        pos: self.here(),
                        msg: "expected `)`".into(),
                    })
                }
            }
            Some(other) => Err(Error::Syntax {
                pos,
                msg: format!("unexpected {}", other.describe()),
            }),
            None => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Exponent;

    fn v2() -> Variables {
        Variables::new(["x1", "x2"])
    }

    #[test]
    fn parses_rational_coefficients() {
        let p = parse_poly("-x1 - 3/2*x1*x2^3", &v2()).unwrap();
        let terms: Vec<_> = p.terms().map(|(e, c)| (e.clone(), c)).collect();
        assert_eq!(
            terms,
            vec![(Exponent::from([1, 0]), -1.0), (Exponent::from([1, 3]), -1.5)]
        );
    }

    #[test]
    fn zero_and_cancellation() {
        assert!(parse_poly("0", &v2()).unwrap().is_zero());
        assert!(parse_poly("x1^2 + 2*x1^2 - 3*x1^2", &v2()).unwrap().is_zero());
    }

    #[test]
    fn precedence() {
        let v = v2();
        // -x1^2 is -(x1^2)
        assert_eq!(
            parse_poly("-x1^2", &v).unwrap().evaluate(&[3.0, 0.0]).unwrap(),
            -9.0
        );
        assert_eq!(
            parse_poly("2*(x1 + x2)^2", &v).unwrap(),
            parse_poly("2*x1^2 + 4*x1*x2 + 2*x2^2", &v).unwrap()
        );
        assert_eq!(
            parse_poly("1e-3*x1 + 2.5E2", &v).unwrap().evaluate(&[1.0, 0.0]).unwrap(),
            250.001
        );
        assert_eq!(parse_poly("x1^0", &v).unwrap(), SparsePoly::constant(&v, 1.0));
    }

    #[test]
    fn errors_carry_positions() {
        let v = v2();
        assert!(matches!(
            parse_poly("x1 + y", &v),
            Err(Error::UnknownVariable { pos: 5, .. })
        ));
        assert!(matches!(
            parse_poly("x1^-1", &v),
            Err(Error::InvalidExponent { pos: 3, .. })
        ));
        assert!(matches!(
            parse_poly("x1^1.5", &v),
            Err(Error::InvalidExponent { pos: 3, .. })
        ));
        assert!(matches!(parse_poly("x1 x2", &v), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly("(x1", &v), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly("x1 $", &v), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly("", &v), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_poly("1/0", &v), Err(Error::Syntax { .. })));
    }
}
