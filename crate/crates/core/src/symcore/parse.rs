//! Infix expression syntax.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' ['-'] integer)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp'
//! number := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```
//!
//! Decimal literals become exact rationals. Identifiers are resolved by the
//! caller; `2^-1` is allowed, `x^y` is not.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;

use super::{Expr, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{msg} at offset {pos}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a, F> {
    src: &'a [u8],
    pos: usize,
    resolve: F,
}

/// Parses `src`, mapping each identifier through `resolve`.
pub fn parse_expr<F>(src: &str, resolve: F) -> Result<Expr, ParseError>
where
    F: Fn(&str) -> Option<Symbol>,
{
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        resolve,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl<F: Fn(&str) -> Option<Symbol>> Parser<'_, F> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let den = self.unary()?;
                acc = acc.checked_div(&den).ok_or(ParseError {
                    pos: at,
                    msg: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let k: i32 = digits.parse().map_err(|_| self.error("exponent out of range"))?;
        let k = if neg { -k } else { k };
        base.checked_powi(k).ok_or(ParseError {
            pos: at,
            msg: "negative power of zero".into(),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
                let func: Option<fn(&Expr) -> Expr> = match name {
                    "sin" => Some(Expr::sin),
                    "cos" => Some(Expr::cos),
                    "exp" => Some(Expr::exp),
                    _ => None,
                };
                if let Some(f) = func {
                    if !self.eat(b'(') {
                        return Err(self.error("expected `(` after function name"));
                    }
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.error("expected `)`"));
                    }
                    return Ok(f(&arg));
                }
                match (self.resolve)(name) {
                    Some(s) => Ok(Expr::symbol(&s)),
                    None => Err(ParseError {
                        pos: start,
                        msg: format!("unknown identifier `{name}`"),
                    }),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let int_part = self.digits().to_string();
        let mut frac_part = String::new();
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            frac_part = self.digits().to_string();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseError {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        let mut exp: i64 = 0;
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let d = self.digits().to_string();
            if d.is_empty() {
                self.pos = save;
            } else {
                exp = d.parse().map_err(|_| self.error("exponent out of range"))?;
                if neg {
                    exp = -exp;
                }
            }
        }
        let mantissa: BigInt = format!("{int_part}{frac_part}").parse().expect("digit string");
        let scale = exp - frac_part.len() as i64;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(mantissa * Pow::pow(&ten, scale as u64))
        } else {
            BigRational::new(mantissa, Pow::pow(&ten, (-scale) as u64))
        };
        Ok(Expr::constant(value))
    }
}
