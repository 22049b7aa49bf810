use std::fmt;

use super::{Chart, GeometryError};
use crate::symcore::{Binding, EvalError, Expr, ZeroTest};

/// A vector field given by its components in the coordinate frame `∂/∂qⁱ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    chart: Chart,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: &Chart, comps: Vec<Expr>) -> Result<VectorField, GeometryError> {
        if comps.len() != chart.dim() {
            return Err(GeometryError::ComponentCount {
                expected: chart.dim(),
                got: comps.len(),
            });
        }
        for c in &comps {
            chart.owns(c)?;
        }
        Ok(VectorField {
            chart: chart.clone(),
            comps,
        })
    }

    /// Builds from component strings in the chart's expression syntax.
    pub fn parse(chart: &Chart, comps: &[&str]) -> Result<VectorField, GeometryError> {
        let exprs = comps.iter().map(|c| chart.parse(c)).collect::<Result<Vec<_>, _>>()?;
        VectorField::new(chart, exprs)
    }

    /// Construction without the symbol-ownership scan, for internal results.
    pub(crate) fn from_parts(chart: &Chart, comps: Vec<Expr>) -> VectorField {
        debug_assert_eq!(comps.len(), chart.dim());
        VectorField {
            chart: chart.clone(),
            comps,
        }
    }

    pub fn zero(chart: &Chart) -> VectorField {
        VectorField::from_parts(chart, vec![Expr::zero(); chart.dim()])
    }

    /// The coordinate field `∂/∂qⁱ`.
    pub fn coordinate(chart: &Chart, i: usize) -> VectorField {
        let mut comps = vec![Expr::zero(); chart.dim()];
        comps[i] = Expr::one();
        VectorField::from_parts(chart, comps)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    fn check_chart(&self, other: &VectorField) -> Result<(), GeometryError> {
        if self.chart != other.chart {
            return Err(GeometryError::ChartMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        self.check_chart(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        self.check_chart(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &VectorField, f: impl Fn(&Expr, &Expr) -> Expr) -> VectorField {
        VectorField::from_parts(
            &self.chart,
            self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect(),
        )
    }

    pub fn neg(&self) -> VectorField {
        self.map(|c| -c)
    }

    /// `f · X` for a scalar function `f`.
    pub fn scale(&self, f: &Expr) -> VectorField {
        self.map(|c| f * c)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField::from_parts(&self.chart, self.comps.iter().map(f).collect())
    }

    /// Directional derivative `X(f) = Xⁱ ∂f/∂qⁱ`.
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::sum(
            self.comps
                .iter()
                .zip(self.chart.coords())
                .filter(|(c, s)| !c.is_zero() && f.depends_on(s))
                .map(|(c, s)| c * &f.diff(s)),
        )
    }

    /// `[X, Y]ⁱ = Xʲ ∂_j Yⁱ − Yʲ ∂_j Xⁱ`.
    pub fn lie_bracket(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        self.check_chart(other)?;
        Ok(VectorField::from_parts(
            &self.chart,
            (0..self.dim())
                .map(|i| self.apply(&other.comps[i]) - other.apply(&self.comps[i]))
                .collect(),
        ))
    }

    pub fn evaluate(&self, b: &Binding) -> Result<Vec<f64>, EvalError> {
        self.comps.iter().map(|c| c.evaluate(b)).collect()
    }

    /// Componentwise sampled zero test.
    pub fn is_zero_with(&self, zt: &ZeroTest) -> Result<bool, EvalError> {
        for c in &self.comps {
            if !zt.is_zero(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sampled zero test with default settings; evaluation failure counts as nonzero.
    pub fn is_zero(&self) -> bool {
        self.is_zero_with(&ZeroTest::default()).unwrap_or(false)
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    /// True when no component depends on a velocity symbol.
    pub fn is_velocity_free(&self) -> bool {
        self.comps.iter().all(Expr::is_velocity_free)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, s) in self.comps.iter().zip(self.chart.coords()) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*d_{s}")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A (1,1)-tensor field as an `n × n` matrix of expressions: entry `[k][j]`
/// is the `k`-th component of the image of `∂/∂qʲ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Operator {
    chart: Chart,
    m: Vec<Vec<Expr>>,
}

impl Operator {
    pub fn new(chart: &Chart, m: Vec<Vec<Expr>>) -> Operator {
        debug_assert!(m.len() == chart.dim() && m.iter().all(|r| r.len() == chart.dim()));
        Operator {
            chart: chart.clone(),
            m,
        }
    }

    pub fn identity(chart: &Chart) -> Operator {
        let n = chart.dim();
        Operator::new(
            chart,
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|j| if j == k { Expr::one() } else { Expr::zero() })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn entry(&self, k: usize, j: usize) -> &Expr {
        &self.m[k][j]
    }

    pub fn rows(&self) -> &[Vec<Expr>] {
        &self.m
    }

    pub fn apply(&self, x: &VectorField) -> VectorField {
        let n = self.chart.dim();
        VectorField::from_parts(
            &self.chart,
            (0..n)
                .map(|k| Expr::sum((0..n).map(|j| &self.m[k][j] * x.component(j))))
                .collect(),
        )
    }

    /// `Id − self`.
    pub fn complement(&self) -> Operator {
        let n = self.chart.dim();
        Operator::new(
            &self.chart,
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|j| {
                            let id = if j == k { Expr::one() } else { Expr::zero() };
                            id - &self.m[k][j]
                        })
                        .collect()
                })
                .collect(),
        )
    }
}
