use std::fmt;

use thiserror::Error;

use super::split::{SplitCalculus, SplitField};
use crate::geometry::VectorField;

/// An iterated bracket over the alphabet `{Z, Y₁^V, …, Y_r^V}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BracketWord {
    Spray,
    /// Vertical lift of the `k`-th field of the alphabet.
    Lift(usize),
    Bracket(Box<BracketWord>, Box<BracketWord>),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("bad bracket word at byte {pos}: {msg}")]
pub struct WordParseError {
    pub pos: usize,
    pub msg: String,
}

impl BracketWord {
    pub fn bracket(a: BracketWord, b: BracketWord) -> BracketWord {
        BracketWord::Bracket(Box::new(a), Box::new(b))
    }

    /// `ad_Z^l(W^V)` for the `k`-th field.
    pub fn spray_power(l: usize, k: usize) -> BracketWord {
        (0..l).fold(BracketWord::Lift(k), |w, _| BracketWord::bracket(BracketWord::Spray, w))
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        match self {
            BracketWord::Bracket(a, b) => a.len() + b.len(),
            _ => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Occurrences of `Z`.
    pub fn spray_degree(&self) -> usize {
        match self {
            BracketWord::Spray => 1,
            BracketWord::Lift(_) => 0,
            BracketWord::Bracket(a, b) => a.spray_degree() + b.spray_degree(),
        }
    }

    /// Occurrences of vertical lifts.
    pub fn lift_degree(&self) -> usize {
        self.len() - self.spray_degree()
    }

    /// `Some((l, k))` when the word is `ad_Z^l(Y_k^V)`.
    pub fn as_spray_power(&self) -> Option<(usize, usize)> {
        match self {
            BracketWord::Lift(k) => Some((0, *k)),
            BracketWord::Bracket(a, b) if **a == BracketWord::Spray => b.as_spray_power().map(|(l, k)| (l + 1, k)),
            _ => None,
        }
    }

    /// Writes the word with `labels[k]` for the `k`-th lift.
    pub fn render(&self, labels: &[String]) -> String {
        match self {
            BracketWord::Spray => "Z".into(),
            BracketWord::Lift(k) => match labels.get(*k) {
                Some(l) => format!("{l}^V"),
                None => format!("Y{}^V", k + 1),
            },
            BracketWord::Bracket(a, b) => format!("[{},{}]", a.render(labels), b.render(labels)),
        }
    }

    /// Parses `Z`, a label (optionally suffixed `^V`) or `[w,w]`.
    pub fn parse(text: &str, labels: &[String]) -> Result<BracketWord, WordParseError> {
        let mut p = WordParser {
            src: text,
            pos: 0,
            labels,
        };
        let w = p.word()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(w)
    }
}

impl fmt::Display for BracketWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

struct WordParser<'a> {
    src: &'a str,
    pos: usize,
    labels: &'a [String],
}

impl WordParser<'_> {
    fn error(&self, msg: &str) -> WordParseError {
        WordParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn word(&mut self) -> Result<BracketWord, WordParseError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with('[') {
            self.pos += 1;
            let a = self.word()?;
            self.expect(',')?;
            let b = self.word()?;
            self.expect(']')?;
            return Ok(BracketWord::bracket(a, b));
        }
        let start = self.pos;
        let mut depth = 0i32;
        for (i, c) in self.src[start..].char_indices() {
            match c {
                '<' => depth += 1,
                '>' => depth -= 1,
                ',' | ']' if depth == 0 => break,
                c if c.is_whitespace() && depth == 0 => break,
                _ => {}
            }
            self.pos = start + i + c.len_utf8();
        }
        let token = &self.src[start..self.pos];
        if token.is_empty() {
            return Err(self.error("expected a letter"));
        }
        if token == "Z" {
            return Ok(BracketWord::Spray);
        }
        let name = token.strip_suffix("^V").unwrap_or(token);
        self.labels
            .iter()
            .position(|l| l == name)
            .map(BracketWord::Lift)
            .ok_or_else(|| WordParseError {
                pos: start,
                msg: format!("unknown letter `{name}`"),
            })
    }

    fn expect(&mut self, c: char) -> Result<(), WordParseError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }
}

/// Evaluates bracket words through the split-bracket formulas.
pub struct WordEvaluator<'a> {
    calc: &'a SplitCalculus,
    alphabet: &'a [VectorField],
}

impl<'a> WordEvaluator<'a> {
    /// `alphabet` holds velocity-free fields on the base chart.
    pub fn new(calc: &'a SplitCalculus, alphabet: &'a [VectorField]) -> WordEvaluator<'a> {
        WordEvaluator { calc, alphabet }
    }

    pub fn calculus(&self) -> &SplitCalculus {
        self.calc
    }

    /// The field a word denotes.
    pub fn eval(&self, w: &BracketWord) -> SplitField {
        match w {
            BracketWord::Spray => self.calc.spray(),
            BracketWord::Lift(k) => self.calc.vertical(&self.alphabet[*k]),
            BracketWord::Bracket(a, b) => self.ad(a, &self.eval(b)),
        }
    }

    /// `ad_w(F) = [w, F]`.
    pub fn ad(&self, w: &BracketWord, f: &SplitField) -> SplitField {
        match w {
            BracketWord::Spray => self.calc.bracket_with_spray(f),
            BracketWord::Lift(k) => self.calc.bracket_with_vertical(&self.alphabet[*k], f),
            BracketWord::Bracket(a, b) => {
                if let Some((l, k)) = w.as_spray_power() {
                    return self.ad_spray_power(l, k, f);
                }
                self.ad(a, &self.ad(b, f)).sub(&self.ad(b, &self.ad(a, f)))
            }
        }
    }

    /// `ad_{ad_Z^l W^V} = Σ_k (−1)ᵏ C(l,k) ad_Z^{l−k} ad_{W^V} ad_Z^k`.
    fn ad_spray_power(&self, l: usize, k: usize, f: &SplitField) -> SplitField {
        let y = &self.alphabet[k];
        let mut powers = vec![f.clone()];
        for i in 0..l {
            let next = self.calc.bracket_with_spray(&powers[i]);
            powers.push(next);
        }
        let mut acc = SplitField::zero(f.dim());
        let mut binom: i64 = 1;
        for (j, pj) in powers.iter().enumerate() {
            let mut term = self.calc.bracket_with_vertical(y, pj);
            for _ in 0..(l - j) {
                term = self.calc.bracket_with_spray(&term);
            }
            let c = if j % 2 == 0 { binom } else { -binom };
            acc = acc.add(&term.scale(&c.into()));
            binom = binom * (l - j) as i64 / (j as i64 + 1);
        }
        acc
    }
}
