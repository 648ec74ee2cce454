//! Expression parser for polynomials and rational functions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' INTEGER)?
//! atom   := INTEGER | NAME | '(' expr ')'
//! ```
//!
//! Juxtaposition is rejected: `2x1` is a syntax error, write `2*x1`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::MultiPoly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Int(s.parse().expect("digits parse"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Name(s)));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let pos = self.pos();
                self.at += 1;
                let rhs = self.unary()?;
                let inv = rhs.recip().map_err(|_| Error::Syntax {
                    pos,
                    msg: "division by zero".into(),
                })?;
                acc = &acc * &inv;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.peek().cloned() {
            Some(Tok::Int(e)) => {
                let e: u32 = match u32::try_from(&e) {
                    Ok(e) if e <= 1000 => e,
                    _ => return self.err("exponent too large"),
                };
                self.at += 1;
                let out = base.pow(e);
                out.check_size()?;
                Ok(out)
            }
            _ => self.err("exponent must be a nonnegative integer literal"),
        }
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.at += 1;
                Ok(RatFunc::constant(n, BigRational::from_integer(v)))
            }
            Some(Tok::Name(name)) => {
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(Error::UnknownVariable(name))?;
                self.at += 1;
                Ok(RatFunc::var(n, idx))
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a rational-function expression over the named variables.
pub fn parse_ratfunc<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<RatFunc> {
    let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        vars: &vars,
    };
    let out = p.expr()?;
    if p.at < p.toks.len() {
        return p.err("expected an operator");
    }
    out.check_size()?;
    Ok(out)
}

/// Parse a polynomial; division is allowed only by nonzero constants.
pub fn parse_poly<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<MultiPoly> {
    let r = parse_ratfunc(text, vars)?;
    if !r.is_polynomial() {
        return Err(Error::NotPolynomial(text.to_string()));
    }
    Ok(r.numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::poly::rat;

    const V: [&str; 3] = ["x1", "x2", "x3"];

    #[test]
    fn fermat_quartic_has_three_terms() {
        let p = parse_poly("x1^4+x2^4+x3^4", &V).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.coeff(&[0, 4, 0]), rat(1));
    }

    #[test]
    fn zero_parses_to_empty() {
        assert!(parse_poly("0", &V).unwrap().is_zero());
    }

    #[test]
    fn difference_of_squares_expands() {
        let p = parse_poly("(x1-x2)*(x1+x2)", &V).unwrap();
        assert_eq!(p, parse_poly("x1^2 - x2^2", &V).unwrap());
    }

    #[test]
    fn rational_literals() {
        let p = parse_poly("1/2*x1 - -3", &V).unwrap();
        assert_eq!(p.coeff(&[1, 0, 0]), BigRational::new(1.into(), 2.into()));
        assert_eq!(p.constant_term(), rat(3));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_poly("x1 + 2x2", &V) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_poly("x1 + y", &V), Err(Error::UnknownVariable(v)) if v == "y"));
        assert!(matches!(parse_poly("x1^-1", &V), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly("(x1", &V), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly("1/(x1-x1)", &V), Err(Error::Syntax { pos: 1, .. })));
    }

    #[test]
    fn non_polynomial_rejected() {
        assert!(matches!(parse_poly("1/x1", &V), Err(Error::NotPolynomial(_))));
        assert!(parse_ratfunc("1/x1", &V).is_ok());
    }
}
