//! Expression grammar shared by the document format and scalar literals.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' ['-'] int)?
//! atom   := int | ident | 'zeta' '(' int ')' | '(' expr ')'
//! ```
//! Division and negative powers are allowed only for nonzero constants.

use crate::error::{Error, Result};
use crate::poly::{PolyMatrix, Polynomial, Symmetry};
use crate::scalars::{RootOfUnity, Scalar};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::ToPrimitive;

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

/// Token stream over a located piece of text.
pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

pub fn parse_error(pos: Pos, message: impl Into<String>) -> Error {
    Error::Parse { line: pos.line, column: pos.column, message: message.into() }
}

impl Parser {
    /// Text on a single line starting at `start`.
    pub fn new(text: &str, start: Pos) -> Result<Self> {
        let chars: Vec<(char, Pos)> = text
            .chars()
            .enumerate()
            .map(|(i, c)| (c, Pos { line: start.line, column: start.column + i }))
            .collect();
        Self::from_located(&chars, Pos { line: start.line, column: start.column + chars.len() })
    }

    pub fn from_located(chars: &[(char, Pos)], end: Pos) -> Result<Self> {
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (c, pos) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let mut s = String::new();
                while i < chars.len() && chars[i].0.is_ascii_digit() {
                    s.push(chars[i].0);
                    i += 1;
                }
                toks.push((Tok::Int(s.parse().unwrap()), pos));
            } else if c.is_alphabetic() || c == '_' {
                let mut s = String::new();
                while i < chars.len() && (chars[i].0.is_alphanumeric() || chars[i].0 == '_') {
                    s.push(chars[i].0);
                    i += 1;
                }
                toks.push((Tok::Ident(s), pos));
            } else if "+-*/^(){}[];,".contains(c) {
                toks.push((Tok::Sym(c), pos));
                i += 1;
            } else {
                return Err(parse_error(pos, format!("unexpected character `{c}`")));
            }
        }
        Ok(Parser { toks, at: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.1)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.0.clone());
        self.at += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(parse_error(self.pos(), format!("expected `{c}`")))
        }
    }

    pub fn is_done(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub fn finish(&self) -> Result<()> {
        if self.is_done() {
            Ok(())
        } else {
            Err(parse_error(self.pos(), "unexpected trailing input"))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(n),
            _ => Err(parse_error(pos, "expected an integer")),
        }
    }

    fn small_int(&mut self) -> Result<i64> {
        let pos = self.pos();
        let neg = self.eat('-');
        let n = self.int()?.to_i64().ok_or_else(|| parse_error(pos, "integer out of range"))?;
        Ok(if neg { -n } else { n })
    }

    fn order(&mut self) -> Result<u32> {
        let pos = self.pos();
        match self.int()?.to_u32() {
            Some(m) if m >= 1 => Ok(m),
            _ => Err(parse_error(pos, "root of unity order must be a positive integer")),
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(parse_error(pos, "expected a name")),
        }
    }

    pub fn expr(&mut self, vars: &[String]) -> Result<Polynomial> {
        let mut acc = self.term(vars)?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term(vars)?;
            } else if self.eat('-') {
                acc = &acc - &self.term(vars)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, vars: &[String]) -> Result<Polynomial> {
        let mut acc = self.unary(vars)?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary(vars)?;
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.pos();
                self.at += 1;
                let d = self.unary(vars)?;
                let inv = constant_inverse(&d).ok_or_else(|| parse_error(pos, "division by a non-constant or zero"))?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self, vars: &[String]) -> Result<Polynomial> {
        if self.eat('-') {
            Ok(-&self.unary(vars)?)
        } else if self.eat('+') {
            self.unary(vars)
        } else {
            self.power(vars)
        }
    }

    fn power(&mut self, vars: &[String]) -> Result<Polynomial> {
        let base = self.atom(vars)?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let e = self.small_int()?;
        if e >= 0 {
            return Ok(base.pow(e as u32));
        }
        let inv = constant_inverse(&base).ok_or_else(|| parse_error(pos, "negative power of a non-constant or zero"))?;
        Ok(Polynomial::constant(vars.len(), inv.pow(-e)))
    }

    fn atom(&mut self, vars: &[String]) -> Result<Polynomial> {
        let n = vars.len();
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(k)) => Ok(Polynomial::constant(n, Scalar::from_rational(BigRational::from_integer(k)))),
            Some(Tok::Ident(s)) if s == "zeta" => {
                self.expect('(')?;
                let m = self.order()?;
                self.expect(')')?;
                Ok(Polynomial::constant(n, Scalar::zeta(m)))
            }
            Some(Tok::Ident(s)) => match vars.iter().position(|v| *v == s) {
                Some(i) => Ok(Polynomial::var(n, i)),
                None => Err(parse_error(pos, format!("unknown variable `{s}`"))),
            },
            Some(Tok::Sym('(')) => {
                let e = self.expr(vars)?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(parse_error(pos, "expected an expression")),
        }
    }

    pub fn scalar(&mut self) -> Result<Scalar> {
        let pos = self.pos();
        let p = self.expr(&[])?;
        if p.is_zero() {
            return Ok(Scalar::zero());
        }
        if !p.is_constant() {
            return Err(parse_error(pos, "expected a constant"));
        }
        Ok(p.constant_term())
    }

    /// `{ a, b ; c, d }`; `{ }` is a matrix with no columns.
    pub fn matrix(&mut self, vars: &[String]) -> Result<Vec<Vec<Polynomial>>> {
        let start = self.pos();
        self.expect('{')?;
        if self.eat('}') {
            return Ok(Vec::new());
        }
        let mut rows = vec![Vec::new()];
        loop {
            rows.last_mut().unwrap().push(self.expr(vars)?);
            if self.eat(',') {
                continue;
            }
            if self.eat(';') {
                rows.push(Vec::new());
                continue;
            }
            self.expect('}')?;
            break;
        }
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(parse_error(start, "rows have different lengths"));
        }
        Ok(rows)
    }

    pub fn poly_matrix(&mut self, vars: &[String]) -> Result<PolyMatrix> {
        let rows = self.matrix(vars)?;
        Ok(PolyMatrix::from_rows(vars.len(), rows))
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    pub fn int_list(&mut self) -> Result<Vec<i64>> {
        self.list(|p| p.small_int())
    }

    pub fn rational_list(&mut self) -> Result<Vec<Rational64>> {
        self.list(|p| {
            let pos = p.pos();
            let s = p.scalar()?;
            s.as_rational()
                .and_then(|q| Some(Rational64::new(q.numer().to_i64()?, q.denom().to_i64()?)))
                .ok_or_else(|| parse_error(pos, "expected a small rational"))
        })
    }

    /// `zeta(m)^[e_1, ..., e_n]`.
    pub fn symmetry(&mut self) -> Result<Symmetry> {
        let pos = self.pos();
        if self.ident()? != "zeta" {
            return Err(parse_error(pos, "expected `zeta(m)^[...]`"));
        }
        self.expect('(')?;
        let m = self.order()?;
        self.expect(')')?;
        self.expect('^')?;
        let exps = self.int_list()?;
        Ok(Symmetry::new(exps.iter().map(|&e| RootOfUnity::new(m, e)).collect()))
    }

    /// Comma-separated names.
    pub fn names(&mut self) -> Result<Vec<String>> {
        let mut out = vec![self.ident()?];
        while self.eat(',') {
            out.push(self.ident()?);
        }
        Ok(out)
    }
}

fn constant_inverse(p: &Polynomial) -> Option<Scalar> {
    if p.is_constant() { p.constant_term().inv() } else { None }
}

/// Parses a scalar literal such as `1/2 - 3*zeta(5)^2`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let mut p = Parser::new(text, Pos { line: 1, column: 1 })?;
    let s = p.scalar()?;
    p.finish()?;
    Ok(s)
}

/// Parses a polynomial in the named variables.
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial> {
    let mut p = Parser::new(text, Pos { line: 1, column: 1 })?;
    let e = p.expr(vars)?;
    p.finish()?;
    Ok(e)
}

/// Identifiers other than `zeta`, in order of first appearance.
pub fn identifiers(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for word in text.split(|c: char| !(c.is_alphanumeric() || c == '_')) {
        let leading_digit = word.chars().next().is_some_and(|c| c.is_ascii_digit());
        if !word.is_empty() && !leading_digit && word != "zeta" && !out.iter().any(|w| w == word) {
            out.push(word.to_string());
        }
    }
    out
}
