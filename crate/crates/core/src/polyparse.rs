//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*
//! factor := '-' factor | atom ['^' int]
//! atom   := int | var | '(' expr ')'
//! ```
//!
//! Errors carry a 1-based column.

use crate::arith::{reduce_i64, Poly, Ring};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

impl Tok {
    fn show(&self) -> String {
        match self {
            Tok::Num(s) | Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Caret => "^".into(),
            Tok::Slash => "/".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

type PResult<T> = std::result::Result<T, (usize, String)>;

fn lex(text: &str) -> PResult<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(chars[start..i].iter().collect()), col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err((col, format!("unexpected character '{c}'"))),
        };
        out.push((t, col));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Ring,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        match self.toks.get(self.pos) {
            Some((t, col)) => Err((*col, format!("expected {what}, found '{}'", t.show()))),
            None => Err((self.end_col, format!("expected {what}, found end of input"))),
        }
    }

    fn expr(&mut self) -> PResult<Poly> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -&self.term()?
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> PResult<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> PResult<Poly> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            return Ok(-&self.factor()?);
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let col = self.col();
            match self.peek().cloned() {
                Some(Tok::Num(s)) => {
                    self.pos += 1;
                    let e: u32 = s
                        .parse()
                        .ok()
                        .filter(|e| *e <= 10_000)
                        .ok_or((col, format!("exponent {s} too large")))?;
                    return Ok(base.pow(e));
                }
                Some(Tok::Caret) => {
                    return Err((col - 1, "unexpected token '^^'".to_string()));
                }
                _ => return self.unexpected("exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Poly> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let p = self.ring.modulus() as u64;
                let v = s.bytes().fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p);
                Ok(self.ring.constant(reduce_i64(v as i64, self.ring.modulus()) as i64))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.ring.var_index(&name) {
                    Some(i) => Ok(self.ring.var(i)),
                    None => Err((col, format!("unknown variable '{name}'"))),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => self.unexpected("')'"),
                }
            }
            _ => self.unexpected("a number, variable or '('"),
        }
    }
}

fn parser<'a>(ring: &'a Ring, text: &str) -> PResult<Parser<'a>> {
    Ok(Parser {
        ring,
        toks: lex(text)?,
        pos: 0,
        end_col: text.chars().count() + 1,
    })
}

pub(crate) fn parse_poly(ring: &Ring, text: &str) -> PResult<Poly> {
    let mut p = parser(ring, text)?;
    let f = p.expr()?;
    if p.pos < p.toks.len() {
        return p.unexpected("end of expression");
    }
    Ok(f)
}

/// Parses `num` or `num / den`; the denominator defaults to 1.
pub(crate) fn parse_fraction(ring: &Ring, text: &str) -> PResult<(Poly, Poly)> {
    let mut p = parser(ring, text)?;
    let num = p.expr()?;
    let den = if let Some(Tok::Slash) = p.peek() {
        p.pos += 1;
        p.expr()?
    } else {
        ring.one()
    };
    if p.pos < p.toks.len() {
        return p.unexpected("end of expression");
    }
    if den.is_zero() {
        return Err((p.end_col, "zero denominator".into()));
    }
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MonomialOrder;

    fn ring() -> Ring {
        Ring::new(32003, &["x", "y"], MonomialOrder::GrevLex).unwrap()
    }

    #[test]
    fn precedence_and_implicit_products() {
        let r = ring();
        let a = parse_poly(&r, "2x y^2 - (x+y)^2").unwrap();
        let b = parse_poly(&r, "2*x*y^2 - x^2 - 2*x*y - y^2").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly(&r, "-x^2").unwrap(), -&r.var(0).pow(2));
        assert_eq!(parse_poly(&r, "64006").unwrap(), r.zero());
    }

    #[test]
    fn errors_carry_columns() {
        let r = ring();
        let (col, msg) = parse_poly(&r, "x^^2").unwrap_err();
        assert_eq!(col, 2);
        assert!(msg.contains("^^"));
        let (col, _) = parse_poly(&r, "x + z").unwrap_err();
        assert_eq!(col, 5);
        assert!(parse_poly(&r, "(x + y").is_err());
        assert!(parse_poly(&r, "x +").is_err());
    }

    #[test]
    fn fractions() {
        let r = ring();
        let (n, d) = parse_fraction(&r, "y/x").unwrap();
        assert_eq!((n, d), (r.var(1), r.var(0)));
        let (n, d) = parse_fraction(&r, "x + 1").unwrap();
        assert_eq!(n, parse_poly(&r, "x+1").unwrap());
        assert!(d.is_one());
        assert!(parse_fraction(&r, "x/0").is_err());
    }
}
