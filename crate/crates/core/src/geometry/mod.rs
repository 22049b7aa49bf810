//! Charts, vector fields, frames, metrics and affine connections.

mod chart;
mod connection;
mod field;
mod frame;
mod linalg;
mod metric;

pub use chart::Chart;
pub use connection::{levi_civita, Christoffels, Connection};
pub use field::{Operator, VectorField};
pub use frame::Frame;
pub use linalg::{cofactor_inverse, determinant};
pub use metric::{constrained_connection, orthogonal_projectors, Metric};

use crate::symcore::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("objects live on different charts")]
    ChartMismatch,
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("symbol `{0}` does not belong to the chart")]
    ForeignSymbol(String),
    #[error("duplicate coordinate `{0}`")]
    DuplicateCoordinate(String),
    #[error("a chart needs at least one coordinate")]
    EmptyChart,
    #[error("frame is singular at every sample point")]
    SingularFrame,
    #[error("metric is singular")]
    SingularMetric,
    #[error("metric is not symmetric in entry ({0}, {1})")]
    AsymmetricMetric(usize, usize),
    #[error("metric is not positive definite at a sample point")]
    IndefiniteMetric,
    #[error("distribution generators are not pointwise independent")]
    DegenerateGenerators,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
