use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Binding, EvalError, Symbol};

/// An analytic scalar expression over coordinates, velocities and parameters.
///
/// Expressions are kept in an expanded normal form: a sum of terms, each an
/// exact rational coefficient times a monomial in *atoms* (symbols, `sin`,
/// `cos`, `exp` and reciprocals of sums). Construction folds constants,
/// collects like terms, absorbs zeros and ones and rewrites `cos²` as
/// `1 - sin²`, so structurally equal results compare equal. Quotients by sums
/// are kept as reciprocal atoms; no rational-function normalisation is done.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

struct Node {
    terms: Vec<Term>,
    coeffs: Vec<f64>,
    hash: u64,
    free: OnceLock<Vec<Symbol>>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Term {
    pub(crate) mono: Monomial,
    pub(crate) coeff: BigRational,
}

/// Sorted product of atoms raised to nonzero integer powers.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Monomial(pub(crate) Vec<(Atom, i32)>);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Sym(Symbol),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    /// `1 / s` for a sum `s` of at least two terms whose first coefficient is 1.
    Recip(Expr),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.terms == other.0.terms)
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.terms.cmp(&other.0.terms)
    }
}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Monomial {
    fn one() -> Self {
        Monomial(Vec::new())
    }

    fn single(atom: Atom, power: i32) -> Self {
        Monomial(vec![(atom, power)])
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let p = a[i].1 + b[j].1;
                    if p != 0 {
                        out.push((a[i].0.clone(), p));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

impl Atom {
    fn depends_on(&self, s: &Symbol) -> bool {
        match self {
            Atom::Sym(t) => t == s,
            Atom::Sin(a) | Atom::Cos(a) | Atom::Exp(a) | Atom::Recip(a) => a.depends_on(s),
        }
    }

    fn diff(&self, s: &Symbol) -> Expr {
        match self {
            Atom::Sym(t) => {
                if t == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Atom::Sin(a) => a.cos() * a.diff(s),
            Atom::Cos(a) => -(a.sin() * a.diff(s)),
            Atom::Exp(a) => a.exp() * a.diff(s),
            Atom::Recip(p) => -(Expr::from_atom(self.clone(), 2) * p.diff(s)),
        }
    }

    fn eval_with<F: Fn(&Symbol) -> Option<f64>>(&self, lookup: &F) -> Result<f64, EvalError> {
        Ok(match self {
            Atom::Sym(t) => lookup(t).ok_or_else(|| EvalError::Unbound(t.to_string()))?,
            Atom::Sin(a) => a.eval_with(lookup)?.sin(),
            Atom::Cos(a) => a.eval_with(lookup)?.cos(),
            Atom::Exp(a) => a.eval_with(lookup)?.exp(),
            Atom::Recip(a) => {
                let d = a.eval_with(lookup)?;
                if d == 0.0 || !d.is_finite() {
                    return Err(EvalError::DivisionByZero);
                }
                1.0 / d
            }
        })
    }

    fn collect_free(&self, out: &mut Vec<Symbol>) {
        match self {
            Atom::Sym(t) => out.push(t.clone()),
            Atom::Sin(a) | Atom::Cos(a) | Atom::Exp(a) | Atom::Recip(a) => out.extend(a.free_symbols().iter().cloned()),
        }
    }
}

/// Collects terms keyed by monomial, applying the `cos²` rewrite on insert.
#[derive(Default)]
struct Acc {
    map: BTreeMap<Monomial, BigRational>,
}

impl Acc {
    fn add_term(&mut self, mono: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        if let Some(pos) = mono.0.iter().position(|(a, p)| matches!(a, Atom::Cos(_)) && *p >= 2) {
            // cos^p = cos^(p mod 2) (1 - sin^2)^(p div 2)
            let (atom, p) = mono.0[pos].clone();
            let arg = match &atom {
                Atom::Cos(arg) => arg.clone(),
                _ => unreachable!(),
            };
            let mut rest = mono.0.clone();
            if p % 2 == 0 {
                rest.remove(pos);
            } else {
                rest[pos].1 = 1;
            }
            let rest = Monomial(rest);
            let half = (p / 2) as u32;
            let sin_atom = Atom::Sin(arg);
            let mut binom = BigInt::one();
            for j in 0..=half {
                let mut c = coeff.clone() * BigRational::from_integer(binom.clone());
                if j % 2 == 1 {
                    c = -c;
                }
                let m = if j == 0 {
                    rest.clone()
                } else {
                    rest.mul(&Monomial::single(sin_atom.clone(), 2 * j as i32))
                };
                self.add_term(m, c);
                binom = binom * BigInt::from(half - j) / BigInt::from(j + 1);
            }
            return;
        }
        match self.map.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Adds `coeff * mono * e`.
    fn add_product(&mut self, mono: &Monomial, coeff: &BigRational, e: &Expr) {
        for t in e.terms() {
            self.add_term(mono.mul(&t.mono), coeff.clone() * t.coeff.clone());
        }
    }

    fn finish(self) -> Expr {
        Expr::from_terms(self.map.into_iter().map(|(mono, coeff)| Term { mono, coeff }).collect())
    }
}

impl Expr {
    fn from_terms(terms: Vec<Term>) -> Expr {
        let mut h = DefaultHasher::new();
        terms.hash(&mut h);
        let coeffs = terms.iter().map(|t| t.coeff.to_f64().unwrap_or(f64::NAN)).collect();
        Expr(Arc::new(Node {
            terms,
            coeffs,
            hash: h.finish(),
            free: OnceLock::new(),
        }))
    }

    fn from_atom(atom: Atom, power: i32) -> Expr {
        let mut acc = Acc::default();
        acc.add_term(Monomial::single(atom, power), BigRational::one());
        acc.finish()
    }

    pub(crate) fn terms(&self) -> &[Term] {
        &self.0.terms
    }

    pub fn zero() -> Expr {
        Expr::from_terms(Vec::new())
    }

    pub fn one() -> Expr {
        Expr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr::from_terms(vec![Term {
            mono: Monomial::one(),
            coeff: c,
        }])
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact `num / den`. Panics if `den == 0`.
    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn symbol(s: &Symbol) -> Expr {
        Expr::from_atom(Atom::Sym(s.clone()), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value of a constant expression, `None` if any symbol or atom occurs.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.0.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [t] if t.mono.0.is_empty() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    /// Number of terms in the expanded form.
    pub fn term_count(&self) -> usize {
        self.0.terms.len()
    }

    /// Free symbols, sorted and without duplicates.
    pub fn free_symbols(&self) -> &[Symbol] {
        self.0.free.get_or_init(|| {
            let mut out = Vec::new();
            for t in &self.0.terms {
                for (a, _) in &t.mono.0 {
                    a.collect_free(&mut out);
                }
            }
            out.sort();
            out.dedup();
            out
        })
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        self.free_symbols().binary_search(s).is_ok()
    }

    /// True when no velocity symbol occurs.
    pub fn is_velocity_free(&self) -> bool {
        !self.free_symbols().iter().any(Symbol::is_velocity)
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Expr::from_terms(
            self.0
                .terms
                .iter()
                .map(|t| Term {
                    mono: t.mono.clone(),
                    coeff: t.coeff.clone() * c.clone(),
                })
                .collect(),
        )
    }

    fn add_ref(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.0.terms, &other.0.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].mono.cmp(&b[j].mono) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].coeff.clone() + b[j].coeff.clone();
                    if !c.is_zero() {
                        out.push(Term {
                            mono: a[i].mono.clone(),
                            coeff: c,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Expr::from_terms(out)
    }

    fn mul_ref(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut acc = Acc::default();
        for t in self.terms() {
            acc.add_product(&t.mono, &t.coeff, other);
        }
        acc.finish()
    }

    /// Sum of an iterator of expressions.
    pub fn sum<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut acc = Acc::default();
        for e in items {
            for t in e.terms() {
                acc.add_term(t.mono.clone(), t.coeff.clone());
            }
        }
        acc.finish()
    }

    pub fn sin(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if self.leading_negative() {
            return -Expr::from_atom(Atom::Sin(-self), 1);
        }
        Expr::from_atom(Atom::Sin(self.clone()), 1)
    }

    pub fn cos(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        if self.leading_negative() {
            return Expr::from_atom(Atom::Cos(-self), 1);
        }
        Expr::from_atom(Atom::Cos(self.clone()), 1)
    }

    pub fn exp(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::from_atom(Atom::Exp(self.clone()), 1)
    }

    fn leading_negative(&self) -> bool {
        self.0.terms.first().is_some_and(|t| t.coeff.is_negative())
    }

    /// `1 / self`, or `None` when `self` is structurally zero.
    pub fn checked_recip(&self) -> Option<Expr> {
        match self.0.terms.as_slice() {
            [] => None,
            [t] => {
                let mut out = Expr::constant(t.coeff.recip());
                for (atom, p) in &t.mono.0 {
                    let f = match atom {
                        Atom::Recip(s) => s.powi(*p),
                        other => Expr::from_atom(other.clone(), -*p),
                    };
                    out = out * f;
                }
                Some(out)
            }
            [first, ..] => {
                let lc = first.coeff.clone();
                let normalized = self.scale(&lc.recip());
                Some(Expr::from_atom(Atom::Recip(normalized), 1).scale(&lc.recip()))
            }
        }
    }

    pub fn checked_div(&self, den: &Expr) -> Option<Expr> {
        if let Some(c) = self.proportional_to(den) {
            return Some(Expr::constant(c));
        }
        den.checked_recip().map(|r| self * &r)
    }

    /// `Some(c)` when `self == c * other` term by term.
    fn proportional_to(&self, other: &Expr) -> Option<BigRational> {
        let (a, b) = (&self.0.terms, &other.0.terms);
        if a.len() < 2 || a.len() != b.len() {
            return None;
        }
        let c = a[0].coeff.clone() / b[0].coeff.clone();
        a.iter()
            .zip(b)
            .all(|(s, t)| s.mono == t.mono && s.coeff == t.coeff.clone() * c.clone())
            .then_some(c)
    }

    /// Integer power; `None` for a negative power of zero.
    pub fn checked_powi(&self, n: i32) -> Option<Expr> {
        if n == 0 {
            return Some(Expr::one());
        }
        if n < 0 {
            return self.checked_recip().map(|r| r.powi(-n));
        }
        if let [t] = self.0.terms.as_slice() {
            let mut acc = Acc::default();
            let mono = Monomial(t.mono.0.iter().map(|(a, p)| (a.clone(), p * n)).collect());
            acc.add_term(mono, num_traits::pow(t.coeff.clone(), n as usize));
            return Some(acc.finish());
        }
        let mut base = self.clone();
        let mut result = Expr::one();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Some(result)
    }

    /// Integer power. Panics on a negative power of zero.
    pub fn powi(&self, n: i32) -> Expr {
        self.checked_powi(n).expect("negative power of a zero expression")
    }

    /// Partial derivative with respect to `s`, in normal form.
    pub fn diff(&self, s: &Symbol) -> Expr {
        if !self.depends_on(s) {
            return Expr::zero();
        }
        let mut acc = Acc::default();
        for t in self.terms() {
            for (idx, (atom, p)) in t.mono.0.iter().enumerate() {
                if !atom.depends_on(s) {
                    continue;
                }
                let da = atom.diff(s);
                if da.is_zero() {
                    continue;
                }
                let mut rest = t.mono.0.clone();
                if *p == 1 {
                    rest.remove(idx);
                } else {
                    rest[idx].1 = p - 1;
                }
                let c = t.coeff.clone() * BigRational::from_integer(BigInt::from(*p));
                acc.add_product(&Monomial(rest), &c, &da);
            }
        }
        acc.finish()
    }

    /// Re-normalises the expression. Construction already yields normal form,
    /// so this is a rebuild that is idempotent by construction.
    pub fn simplify(&self) -> Expr {
        let mut acc = Acc::default();
        for t in self.terms() {
            let mut m = Expr::constant(t.coeff.clone());
            for (atom, p) in &t.mono.0 {
                let a = match atom {
                    Atom::Sym(s) => Expr::symbol(s),
                    Atom::Sin(a) => a.simplify().sin(),
                    Atom::Cos(a) => a.simplify().cos(),
                    Atom::Exp(a) => a.simplify().exp(),
                    Atom::Recip(a) => a.simplify().checked_recip().unwrap_or_else(Expr::zero),
                };
                m = m * a.powi(*p);
            }
            for t in m.terms() {
                acc.add_term(t.mono.clone(), t.coeff.clone());
            }
        }
        acc.finish()
    }

    pub fn eval_with<F: Fn(&Symbol) -> Option<f64>>(&self, lookup: &F) -> Result<f64, EvalError> {
        self.eval_scaled(lookup).map(|(v, _)| v)
    }

    /// Value together with the sum of absolute term values, the natural
    /// magnitude against which cancellation is judged.
    pub fn eval_scaled<F: Fn(&Symbol) -> Option<f64>>(&self, lookup: &F) -> Result<(f64, f64), EvalError> {
        let mut value = 0.0;
        let mut scale = 0.0;
        for (t, c) in self.0.terms.iter().zip(&self.0.coeffs) {
            let mut tv = *c;
            for (atom, p) in &t.mono.0 {
                let a = atom.eval_with(lookup)?;
                if *p < 0 && a == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                tv *= a.powi(*p);
            }
            value += tv;
            scale += tv.abs();
        }
        Ok((value, scale))
    }

    /// Evaluates at a binding; every free symbol must be bound.
    pub fn evaluate(&self, b: &Binding) -> Result<f64, EvalError> {
        self.eval_with(&|s| b.get(s))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        Expr::symbol(s)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_ref(b));
binop!(Sub, sub, |a, b| a.add_ref(&b.scale(&-BigRational::one())));
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a
    .checked_div(b)
    .expect("division by a zero expression"));

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&-BigRational::one())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter)
    }
}

// Printing. The output re-parses to the same normal form.

fn fmt_atom(f: &mut fmt::Formatter<'_>, atom: &Atom) -> fmt::Result {
    match atom {
        Atom::Sym(s) => write!(f, "{s}"),
        Atom::Sin(a) => write!(f, "sin({a})"),
        Atom::Cos(a) => write!(f, "cos({a})"),
        Atom::Exp(a) => write!(f, "exp({a})"),
        Atom::Recip(a) => write!(f, "({a})"),
    }
}

fn fmt_power(f: &mut fmt::Formatter<'_>, atom: &Atom, p: i32) -> fmt::Result {
    fmt_atom(f, atom)?;
    if p != 1 {
        write!(f, "^{p}")?;
    }
    Ok(())
}

fn fmt_term_abs(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    let c = t.coeff.abs();
    let numer = c.numer().clone();
    let denom = c.denom().clone();
    let num_atoms: Vec<_> = t
        .mono
        .0
        .iter()
        .filter(|(a, p)| *p > 0 && !matches!(a, Atom::Recip(_)))
        .collect();
    let den_atoms: Vec<(&Atom, i32)> = t
        .mono
        .0
        .iter()
        .filter(|(a, p)| *p < 0 || matches!(a, Atom::Recip(_)))
        .map(|(a, p)| (a, p.abs()))
        .collect();

    let mut first = true;
    if !numer.is_one() || num_atoms.is_empty() {
        write!(f, "{numer}")?;
        first = false;
    }
    for (a, p) in num_atoms {
        if !first {
            f.write_str("*")?;
        }
        fmt_power(f, a, *p)?;
        first = false;
    }
    // One `/factor` per denominator factor, and reciprocal sums repeated
    // rather than raised to a power, so that re-parsing rebuilds the same atoms.
    if !denom.is_one() {
        write!(f, "/{denom}")?;
    }
    for (a, p) in den_atoms {
        if matches!(a, Atom::Recip(_)) {
            for _ in 0..p {
                f.write_str("/")?;
                fmt_atom(f, a)?;
            }
        } else {
            f.write_str("/")?;
            fmt_power(f, a, p)?;
        }
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.0.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            fmt_term_abs(f, t)?;
        }
        Ok(())
    }
}
