//! Numeric expressions and bracket literals used in scenario files.
//!
//! ```text
//! literal := '[' literal (',' literal)* ']' | expr
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'e' | 'pi' | fn '(' expr ')' | '(' expr ')'
//! fn      := 'ln' | 'exp' | 'sqrt'
//! ```

use std::fmt;

use crate::algebra::{AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::space::{Point, SpaceInstance, SpaceKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Num(f64),
    List(Vec<Literal>),
}

impl Literal {
    fn flat(&self) -> Option<Vec<f64>> {
        match self {
            Literal::Num(_) => None,
            Literal::List(items) => items
                .iter()
                .map(|i| match i {
                    Literal::Num(v) => Some(*v),
                    Literal::List(_) => None,
                })
                .collect(),
        }
    }

    fn matrix(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Literal::List(rows) => rows.iter().map(|r| r.flat()).collect(),
            Literal::Num(_) => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Literal::Num(v) => Some(*v),
            Literal::List(_) => None,
        }
    }

    /// Interprets the literal as a point of `s`.
    pub fn to_point(&self, s: &SpaceInstance) -> Result<Point> {
        let p = match (s.kind(), self) {
            (k, Literal::Num(v)) if k.is_real_line() => Point::Scalar(*v),
            (SpaceKind::SquareTuple, _) => match self.flat().as_deref() {
                Some([a, b]) => Point::Pair([*a, *b]),
                _ => return Err(Error::Shape(format!("expected a pair [x, y], got {self}"))),
            },
            (SpaceKind::StepFn { pieces }, _) => match self.flat() {
                Some(v) if v.len() == pieces => Point::Pieces(v),
                _ => {
                    return Err(Error::Shape(format!(
                        "expected {pieces} piece values, got {self}"
                    )))
                }
            },
            _ => return Err(Error::Shape(format!("expected a real number, got {self}"))),
        };
        s.validate(&p)?;
        Ok(p)
    }

    /// Interprets the literal as an element of `alg`: nested rows for
    /// matrices, a flat list otherwise.
    pub fn to_element(&self, alg: &AlgebraDescriptor) -> Result<Element> {
        let n = alg.dimension();
        if alg.kind().is_matrix() {
            let rows = self
                .matrix()
                .filter(|rows| rows.len() == n && rows.iter().all(|r| r.len() == n))
                .ok_or_else(|| Error::Shape(format!("expected a {n}x{n} matrix, got {self}")))?;
            alg.element(rows.into_iter().flatten().collect())
        } else {
            let v = self
                .flat()
                .ok_or_else(|| Error::Shape(format!("expected a list of {n} values, got {self}")))?;
            alg.element(v)
        }
    }

    pub fn from_point(p: &Point) -> Literal {
        match p {
            Point::Scalar(v) => Literal::Num(*v),
            _ => Literal::List(p.coords().iter().map(|v| Literal::Num(*v)).collect()),
        }
    }
}

impl fmt::Display for Literal {
    /// Round-trippable: numbers use the shortest representation that parses
    /// back to the same bits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Num(v) => write!(f, "{v:?}"),
            Literal::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Parse failure inside a single value; `column` is 1-based within that value.
#[derive(Debug, Clone, PartialEq)]
pub struct LiteralError {
    pub column: usize,
    pub message: String,
}

impl LiteralError {
    pub fn at(self, line: usize, value_column: usize) -> Error {
        Error::parse(line, value_column + self.column - 1, self.message)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type PResult<T> = std::result::Result<T, LiteralError>;

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(LiteralError {
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected `{}`, found `{}`", c as char, found as char)),
                None => self.err(format!("expected `{}`, found end of input", c as char)),
            }
        }
    }

    fn literal(&mut self) -> PResult<Literal> {
        if self.peek() == Some(b'[') {
            let open = self.pos;
            self.pos += 1;
            let mut items = Vec::new();
            if self.eat(b']') {
                return Ok(Literal::List(items));
            }
            loop {
                items.push(self.literal()?);
                if self.eat(b',') {
                    continue;
                }
                if self.eat(b']') {
                    return Ok(Literal::List(items));
                }
                if self.peek().is_none() {
                    self.pos = open;
                    return self.err("unclosed `[`");
                }
                return self.err(format!(
                    "expected `,` or `]`, found `{}`",
                    self.src[self.pos] as char
                ));
            }
        }
        self.expr().map(Literal::Num)
    }

    fn expr(&mut self) -> PResult<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v += self.term()?;
            } else if self.eat(b'-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> PResult<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                v *= self.unary()?;
            } else if self.peek() == Some(b'/') {
                self.pos += 1;
                let at = self.pos;
                let d = self.unary()?;
                if d == 0.0 {
                    self.pos = at;
                    return self.err("division by zero");
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> PResult<f64> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(base.powf(self.unary()?));
        }
        Ok(base)
    }

    fn number(&mut self) -> PResult<f64> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        let mut p = self.pos;
        digits(&mut p);
        if p < s.len() && s[p] == b'.' {
            p += 1;
            digits(&mut p);
        }
        // Exponent only when digits follow, so `2e` is not swallowed.
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if q < s.len() && s[q].is_ascii_digit() {
                digits(&mut q);
                p = q;
            }
        }
        let text = std::str::from_utf8(&s[start..p]).expect("ascii");
        self.pos = p;
        text.parse::<f64>().or_else(|_| {
            self.pos = start;
            self.err(format!("malformed number `{text}`"))
        })
    }

    fn atom(&mut self) -> PResult<f64> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match name {
                    "e" => Ok(std::f64::consts::E),
                    "pi" => Ok(std::f64::consts::PI),
                    "ln" | "exp" | "sqrt" => {
                        self.expect(b'(')?;
                        let arg_at = self.pos;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        let v = match name {
                            "ln" => arg.ln(),
                            "exp" => arg.exp(),
                            _ => arg.sqrt(),
                        };
                        if !v.is_finite() {
                            self.pos = arg_at;
                            return self.err(format!("{name}({arg}) is not finite"));
                        }
                        Ok(v)
                    }
                    _ => {
                        self.pos = start;
                        self.err(format!("unknown name `{name}`"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
        }
    }
}

/// Parses a complete bracket literal or expression.
pub fn parse_literal(text: &str) -> std::result::Result<Literal, LiteralError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let lit = p.literal()?;
    if p.peek().is_some() {
        return p.err(format!("trailing input `{}`", &text[p.pos..]));
    }
    Ok(lit)
}

/// Parses a single real-valued expression.
pub fn parse_number(text: &str) -> std::result::Result<f64, LiteralError> {
    match parse_literal(text)? {
        Literal::Num(v) => Ok(v),
        Literal::List(_) => Err(LiteralError {
            column: 1,
            message: "expected a number, found a list".into(),
        }),
    }
}
