//! Small computer-algebra layer: analytic scalar expressions with exact
//! rational constants, differentiation, evaluation and sampled zero tests.

mod compile;
mod expr;
mod parse;
mod symbol;
mod zero;

pub use compile::Program;
pub use expr::Expr;
pub use parse::{parse_expr, ParseError};
pub use symbol::{Binding, Symbol, SymbolKind};
pub use zero::{is_zero, sample_binding, sample_value, ZeroTest, DEFAULT_ZERO_SEED};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no usable sample binding after {0} attempts")]
    RetriesExhausted(usize),
}
