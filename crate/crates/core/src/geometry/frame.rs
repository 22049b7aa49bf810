use super::{cofactor_inverse, Chart, GeometryError, VectorField};
use crate::symcore::{Expr, ZeroTest};

/// `n` vector fields `E₁..Eₙ` forming a basis at generic points, with the
/// symbolic inverse of their component matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    chart: Chart,
    fields: Vec<VectorField>,
    /// `inv[a][k]`: the `E_a`-component of `∂/∂qᵏ`.
    inv: Vec<Vec<Expr>>,
    det: Expr,
}

impl Frame {
    pub fn new(fields: Vec<VectorField>) -> Result<Frame, GeometryError> {
        let chart = fields
            .first()
            .map(|f| f.chart().clone())
            .ok_or(GeometryError::SingularFrame)?;
        let n = chart.dim();
        if fields.len() != n {
            return Err(GeometryError::ComponentCount {
                expected: n,
                got: fields.len(),
            });
        }
        if fields.iter().any(|f| f.chart() != &chart) {
            return Err(GeometryError::ChartMismatch);
        }
        // m[k][a] = k-th coordinate component of E_a
        let m: Vec<Vec<Expr>> = (0..n)
            .map(|k| fields.iter().map(|f| f.component(k).clone()).collect())
            .collect();
        let (inv, det) = cofactor_inverse(&m).ok_or(GeometryError::SingularFrame)?;
        if ZeroTest::default().is_zero(&det)? {
            return Err(GeometryError::SingularFrame);
        }
        Ok(Frame {
            chart,
            fields,
            inv,
            det,
        })
    }

    pub fn coordinate(chart: &Chart) -> Frame {
        let n = chart.dim();
        Frame {
            chart: chart.clone(),
            fields: (0..n).map(|i| VectorField::coordinate(chart, i)).collect(),
            inv: (0..n)
                .map(|a| {
                    (0..n)
                        .map(|k| if a == k { Expr::one() } else { Expr::zero() })
                        .collect()
                })
                .collect(),
            det: Expr::one(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn field(&self, a: usize) -> &VectorField {
        &self.fields[a]
    }

    pub fn determinant(&self) -> &Expr {
        &self.det
    }

    /// `E_a`-component of the coordinate field `∂/∂qᵏ`.
    pub fn inverse_entry(&self, a: usize, k: usize) -> &Expr {
        &self.inv[a][k]
    }

    /// Components `Aᵃ` with `X = Aᵃ E_a`.
    pub fn components_of(&self, x: &VectorField) -> Vec<Expr> {
        let n = self.chart.dim();
        (0..n)
            .map(|a| Expr::sum((0..n).map(|k| &self.inv[a][k] * x.component(k))))
            .collect()
    }

    /// `Σ Aᵃ E_a` in coordinate components.
    pub fn combine(&self, a: &[Expr]) -> VectorField {
        let n = self.chart.dim();
        VectorField::from_parts(
            &self.chart,
            (0..n)
                .map(|k| Expr::sum((0..n).map(|b| &a[b] * self.fields[b].component(k))))
                .collect(),
        )
    }
}
