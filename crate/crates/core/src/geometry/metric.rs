use nalgebra::DMatrix;

use super::connection::Christoffels;
use super::{cofactor_inverse, levi_civita, Chart, Connection, Frame, GeometryError, Operator, VectorField};
use crate::symcore::{Expr, ZeroTest};

const METRIC_CHECK_SEED: u64 = 0x6d65_7472;
const METRIC_CHECK_SAMPLES: usize = 12;

/// A Riemannian metric `G_{ij}` in coordinate components.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    chart: Chart,
    g: Vec<Vec<Expr>>,
}

impl Metric {
    /// Checks structural symmetry and positive-definiteness at sample points.
    pub fn new(chart: &Chart, g: Vec<Vec<Expr>>) -> Result<Metric, GeometryError> {
        let n = chart.dim();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(GeometryError::ComponentCount {
                expected: n * n,
                got: g.iter().map(Vec::len).sum(),
            });
        }
        for (i, row) in g.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                chart.owns(e)?;
                if j > i && *e != g[j][i] {
                    return Err(GeometryError::AsymmetricMetric(i, j));
                }
            }
        }
        for b in chart.sample_bindings(METRIC_CHECK_SAMPLES, METRIC_CHECK_SEED, None) {
            let mut vals = Vec::with_capacity(n * n);
            for row in &g {
                for e in row {
                    vals.push(e.evaluate(&b)?);
                }
            }
            if DMatrix::from_row_slice(n, n, &vals).cholesky().is_none() {
                return Err(GeometryError::IndefiniteMetric);
            }
        }
        Ok(Metric {
            chart: chart.clone(),
            g,
        })
    }

    pub fn diagonal(chart: &Chart, diag: Vec<Expr>) -> Result<Metric, GeometryError> {
        let n = diag.len();
        let g = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { diag[i].clone() } else { Expr::zero() })
                    .collect()
            })
            .collect();
        Metric::new(chart, g)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn matrix(&self) -> &[Vec<Expr>] {
        &self.g
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.g[i][j]
    }

    /// `G(X, Y) = G_{ij} Xⁱ Yʲ`.
    pub fn pairing(&self, x: &VectorField, y: &VectorField) -> Expr {
        let n = self.chart.dim();
        let mut terms = Vec::new();
        for i in 0..n {
            if x.component(i).is_zero() {
                continue;
            }
            for j in 0..n {
                if self.g[i][j].is_zero() || y.component(j).is_zero() {
                    continue;
                }
                terms.push(&self.g[i][j] * &(x.component(i) * y.component(j)));
            }
        }
        Expr::sum(terms)
    }
}

/// G-orthogonal projectors `(P, P′)` onto the span of `gens` and onto its
/// orthogonal complement: `P = Y (YᵀGY)⁻¹ YᵀG`, `P′ = Id − P`.
pub fn orthogonal_projectors(metric: &Metric, gens: &[VectorField]) -> Result<(Operator, Operator), GeometryError> {
    let chart = metric.chart();
    let n = chart.dim();
    if gens.iter().any(|y| y.chart() != chart) {
        return Err(GeometryError::ChartMismatch);
    }
    let r = gens.len();
    let g = metric.matrix();
    // gy[i][a] = (G Y)_{i a}
    let gy: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (0..r)
                .map(|a| Expr::sum((0..n).map(|k| &g[i][k] * gens[a].component(k))))
                .collect()
        })
        .collect();
    let gram: Vec<Vec<Expr>> = (0..r)
        .map(|a| {
            (0..r)
                .map(|b| Expr::sum((0..n).map(|i| gens[a].component(i) * &gy[i][b])))
                .collect()
        })
        .collect();
    let (ginv, det) = cofactor_inverse(&gram).ok_or(GeometryError::DegenerateGenerators)?;
    if ZeroTest::default().is_zero(&det)? {
        return Err(GeometryError::DegenerateGenerators);
    }
    let p: Vec<Vec<Expr>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let mut terms = Vec::new();
                    for a in 0..r {
                        for b in 0..r {
                            terms.push(gens[a].component(k) * &(&ginv[a][b] * &gy[j][b]));
                        }
                    }
                    Expr::sum(terms)
                })
                .collect()
        })
        .collect();
    let p = Operator::new(chart, p);
    let q = p.complement();
    Ok((p, q))
}

/// The constrained connection `∇̌_X Y = ∇_X Y + (∇_X P′)(Y)` of the metric
/// restricted to the distribution spanned by `gens`, with `∇` Levi-Civita.
///
/// The result carries both the coordinate symbols
/// `Γ̌ᵏ_{ij} = Γᵏ_{ij} + ∂_i P′ᵏ_j + Γᵏ_{il} P′ˡ_j − P′ᵏ_l Γˡ_{ij}`
/// and the symbols in the adapted frame made of `gens` followed by a
/// G-orthogonal complement basis.
pub fn constrained_connection(metric: &Metric, gens: &[VectorField]) -> Result<Connection, GeometryError> {
    let chart = metric.chart().clone();
    let n = chart.dim();
    let qs = chart.coords();
    let lc = levi_civita(metric)?;
    let (_, pc) = orthogonal_projectors(metric, gens)?;

    let mut coord: Christoffels = vec![vec![vec![Expr::zero(); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut terms = vec![lc.christoffel(k, i, j).clone(), pc.entry(k, j).diff(&qs[i])];
                for l in 0..n {
                    terms.push(lc.christoffel(k, i, l) * pc.entry(l, j));
                    terms.push(-(pc.entry(k, l) * lc.christoffel(l, i, j)));
                }
                coord[k][i][j] = Expr::sum(terms);
            }
        }
    }

    let r = gens.len();
    let mut fields: Vec<VectorField> = gens.to_vec();
    fields.extend(complement_basis(metric, &pc, n - r)?);
    let frame = Frame::new(fields)?;

    let mut gamma: Christoffels = vec![vec![vec![Expr::zero(); n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            let d = lc.covariant_derivative(frame.field(a), frame.field(b))?;
            let comps = frame.components_of(&d);
            for (c, e) in comps.into_iter().enumerate() {
                gamma[c][a][b] = match (b < r, c < r) {
                    // D-valued fields: ∇̌ = P∇
                    (true, true) => e,
                    (true, false) => Expr::zero(),
                    // complement fields: ∇̌ = ∇ + P∇
                    (false, true) => &e + &e,
                    (false, false) => e,
                };
            }
        }
    }
    Ok(Connection::with_frame(chart, coord, frame, gamma))
}

/// G-orthogonal Gram–Schmidt over the fields `P′∂_i`, choosing at each step
/// the candidate of largest summed squared norm over sample points.
fn complement_basis(metric: &Metric, pc: &Operator, count: usize) -> Result<Vec<VectorField>, GeometryError> {
    let chart = metric.chart();
    let samples = chart.sample_bindings(METRIC_CHECK_SAMPLES, METRIC_CHECK_SEED, None);
    let mut candidates: Vec<VectorField> = (0..chart.dim())
        .map(|i| pc.apply(&VectorField::coordinate(chart, i)))
        .collect();
    let mut basis: Vec<VectorField> = Vec::with_capacity(count);
    let mut norms: Vec<Expr> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut best: Option<(usize, f64, VectorField)> = None;
        for (idx, c) in candidates.iter().enumerate() {
            let mut w = c.clone();
            for (e, nn) in basis.iter().zip(&norms) {
                let coef = metric.pairing(c, e) / nn.clone();
                w = w.sub(&e.scale(&coef))?;
            }
            let wn = metric.pairing(&w, &w);
            let mut score = 0.0;
            for b in &samples {
                score += wn.evaluate(b).unwrap_or(0.0).abs();
            }
            if best.as_ref().is_none_or(|(_, s, _)| score > *s) {
                best = Some((idx, score, w));
            }
        }
        let (idx, score, w) = best.ok_or(GeometryError::DegenerateGenerators)?;
        if score <= 1e-12 {
            return Err(GeometryError::DegenerateGenerators);
        }
        candidates.remove(idx);
        norms.push(metric.pairing(&w, &w));
        basis.push(w);
    }
    Ok(basis)
}
