use std::collections::HashMap;

use super::expr::{Atom, Expr};
use super::{EvalError, Symbol};

/// A batch of expressions compiled for repeated numeric evaluation.
///
/// Shared atoms (`sin θ`, reciprocals, ...) are evaluated once per call.
/// Symbols are read from a slot vector in the order given at compile time.
#[derive(Clone, Debug)]
pub struct Program {
    slots: Vec<Symbol>,
    atoms: Vec<AtomOp>,
    outputs: Vec<Poly>,
}

#[derive(Clone, Debug)]
enum AtomOp {
    Slot(usize),
    Sin(Poly),
    Cos(Poly),
    Exp(Poly),
    Recip(Poly),
}

#[derive(Clone, Debug, Default)]
struct Poly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl Poly {
    fn eval(&self, atoms: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, p) in factors {
                t *= match p {
                    1 => atoms[i],
                    2 => atoms[i] * atoms[i],
                    _ => atoms[i].powi(p),
                };
            }
            acc += t;
        }
        acc
    }
}

struct Builder<'a> {
    slots: &'a [Symbol],
    atoms: Vec<AtomOp>,
    memo: HashMap<Atom, usize>,
}

impl Builder<'_> {
    fn poly(&mut self, e: &Expr) -> Result<Poly, EvalError> {
        let mut terms = Vec::with_capacity(e.term_count());
        for t in e.terms() {
            let c = num_traits::ToPrimitive::to_f64(&t.coeff).unwrap_or(f64::NAN);
            let mut factors = Vec::with_capacity(t.mono.0.len());
            for (a, p) in &t.mono.0 {
                factors.push((self.atom(a)?, *p));
            }
            terms.push((c, factors));
        }
        Ok(Poly { terms })
    }

    fn atom(&mut self, a: &Atom) -> Result<usize, EvalError> {
        if let Some(&i) = self.memo.get(a) {
            return Ok(i);
        }
        let op = match a {
            Atom::Sym(s) => AtomOp::Slot(
                self.slots
                    .iter()
                    .position(|t| t == s)
                    .ok_or_else(|| EvalError::Unbound(s.to_string()))?,
            ),
            Atom::Sin(x) => AtomOp::Sin(self.poly(x)?),
            Atom::Cos(x) => AtomOp::Cos(self.poly(x)?),
            Atom::Exp(x) => AtomOp::Exp(self.poly(x)?),
            Atom::Recip(x) => AtomOp::Recip(self.poly(x)?),
        };
        self.atoms.push(op);
        let i = self.atoms.len() - 1;
        self.memo.insert(a.clone(), i);
        Ok(i)
    }
}

impl Program {
    /// Compiles `exprs`; every free symbol must appear in `slots`.
    pub fn compile(exprs: &[Expr], slots: &[Symbol]) -> Result<Program, EvalError> {
        let mut b = Builder {
            slots,
            atoms: Vec::new(),
            memo: HashMap::new(),
        };
        let outputs = exprs.iter().map(|e| b.poly(e)).collect::<Result<_, _>>()?;
        Ok(Program {
            slots: slots.to_vec(),
            atoms: b.atoms,
            outputs,
        })
    }

    pub fn slots(&self) -> &[Symbol] {
        &self.slots
    }

    pub fn output_len(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluates every output at `values` (indexed like the slots) into `out`.
    /// A vanishing denominator yields a non-finite output rather than an error.
    pub fn eval_into(&self, values: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        scratch.clear();
        for op in &self.atoms {
            let v = match op {
                AtomOp::Slot(i) => values[*i],
                AtomOp::Sin(p) => p.eval(scratch).sin(),
                AtomOp::Cos(p) => p.eval(scratch).cos(),
                AtomOp::Exp(p) => p.eval(scratch).exp(),
                AtomOp::Recip(p) => 1.0 / p.eval(scratch),
            };
            scratch.push(v);
        }
        for (o, p) in out.iter_mut().zip(&self.outputs) {
            *o = p.eval(scratch);
        }
    }

    pub fn eval(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(values, &mut Vec::with_capacity(self.atoms.len()), &mut out);
        out
    }
}
