use super::{cofactor_inverse, Chart, Frame, GeometryError, Metric, VectorField};
use crate::symcore::{Expr, ZeroTest};

/// Christoffel table `g[k][i][j]`, the `k`-th component of `∇_{E_i} E_j`.
pub type Christoffels = Vec<Vec<Vec<Expr>>>;

fn zero_table(n: usize) -> Christoffels {
    vec![vec![vec![Expr::zero(); n]; n]; n]
}

/// An affine connection.
///
/// Symbols are held in the coordinate frame and, when the connection was
/// built from a frame, also in that frame (`∇_{E_a} E_b = Γᶜ_{ab} E_c`).
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    chart: Chart,
    coord: Christoffels,
    frame: Option<(Frame, Christoffels)>,
}

impl Connection {
    /// The connection with all coordinate Christoffel symbols zero.
    pub fn flat(chart: &Chart) -> Connection {
        Connection {
            chart: chart.clone(),
            coord: zero_table(chart.dim()),
            frame: None,
        }
    }

    /// From coordinate Christoffel symbols `gamma[k][i][j] = Γᵏ_{ij}`.
    pub fn from_christoffels(chart: &Chart, gamma: Christoffels) -> Result<Connection, GeometryError> {
        let n = chart.dim();
        check_shape(n, &gamma)?;
        for e in gamma.iter().flatten().flatten() {
            chart.owns(e)?;
        }
        Ok(Connection {
            chart: chart.clone(),
            coord: gamma,
            frame: None,
        })
    }

    /// From Christoffel symbols relative to `frame`; coordinate symbols are
    /// derived as `Γᵏ_{ij} = E^k_b ∂_i(F^b_j) + F^a_i F^b_j Γᶜ_{ab} E^k_c`,
    /// where `F` is the inverse of the frame matrix.
    pub fn from_frame(frame: Frame, gamma: Christoffels) -> Result<Connection, GeometryError> {
        let chart = frame.chart().clone();
        let n = chart.dim();
        check_shape(n, &gamma)?;
        let qs = chart.coords();
        let mut coord = zero_table(n);
        // ∇_{E_a} E_b in coordinate components, reused for every (i, j).
        let nab: Vec<Vec<VectorField>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let comps: Vec<Expr> = (0..n).map(|c| gamma[c][a][b].clone()).collect();
                        frame.combine(&comps)
                    })
                    .collect()
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                let mut comps = vec![Expr::zero(); n];
                for b in 0..n {
                    let d = frame.inverse_entry(b, j).diff(&qs[i]);
                    if !d.is_zero() {
                        for (k, c) in comps.iter_mut().enumerate() {
                            *c = &*c + &(&d * frame.field(b).component(k));
                        }
                    }
                    for a in 0..n {
                        let w = frame.inverse_entry(a, i) * frame.inverse_entry(b, j);
                        if w.is_zero() {
                            continue;
                        }
                        for (k, c) in comps.iter_mut().enumerate() {
                            *c = &*c + &(&w * nab[a][b].component(k));
                        }
                    }
                }
                for (k, c) in comps.into_iter().enumerate() {
                    coord[k][i][j] = c;
                }
            }
        }
        Ok(Connection {
            chart,
            coord,
            frame: Some((frame, gamma)),
        })
    }

    /// Both symbol tables given; the caller guarantees they agree.
    pub(crate) fn with_frame(chart: Chart, coord: Christoffels, frame: Frame, gamma: Christoffels) -> Connection {
        Connection {
            chart,
            coord,
            frame: Some((frame, gamma)),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Coordinate symbol `Γᵏ_{ij}` (`∇_{∂i} ∂j = Γᵏ_{ij} ∂k`).
    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> &Expr {
        &self.coord[k][i][j]
    }

    pub fn christoffels(&self) -> &Christoffels {
        &self.coord
    }

    pub fn frame(&self) -> Option<&Frame> {
        self.frame.as_ref().map(|(f, _)| f)
    }

    /// Frame symbol `Γᶜ_{ab}`, if the connection carries a frame.
    pub fn frame_christoffel(&self, c: usize, a: usize, b: usize) -> Option<&Expr> {
        self.frame.as_ref().map(|(_, g)| &g[c][a][b])
    }

    fn check(&self, x: &VectorField) -> Result<(), GeometryError> {
        if x.chart() != &self.chart {
            return Err(GeometryError::ChartMismatch);
        }
        Ok(())
    }

    /// `(∇_X Y)ᵏ = X(Yᵏ) + Γᵏ_{ij} Xⁱ Yʲ`.
    pub fn covariant_derivative(&self, x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
        self.check(x)?;
        self.check(y)?;
        let n = self.dim();
        let comps = (0..n)
            .map(|k| {
                let mut terms = vec![x.apply(y.component(k))];
                for i in 0..n {
                    if x.component(i).is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let g = &self.coord[k][i][j];
                        if g.is_zero() || y.component(j).is_zero() {
                            continue;
                        }
                        terms.push(g * &(x.component(i) * y.component(j)));
                    }
                }
                Expr::sum(terms)
            })
            .collect();
        Ok(VectorField::from_parts(&self.chart, comps))
    }

    /// `∇_X Y` computed in the connection's frame:
    /// `X(Bᵇ) E_b + Aᵃ Bᵇ Γᶜ_{ab} E_c` with `X = Aᵃ E_a`, `Y = Bᵇ E_b`.
    /// Falls back to the coordinate route when no frame is stored.
    pub fn covariant_derivative_in_frame(
        &self,
        x: &VectorField,
        y: &VectorField,
    ) -> Result<VectorField, GeometryError> {
        let Some((frame, gamma)) = &self.frame else {
            return self.covariant_derivative(x, y);
        };
        self.check(x)?;
        self.check(y)?;
        let n = self.dim();
        let a = frame.components_of(x);
        let b = frame.components_of(y);
        let comps: Vec<Expr> = (0..n)
            .map(|c| {
                let mut terms = vec![x.apply(&b[c])];
                for i in 0..n {
                    for j in 0..n {
                        if !gamma[c][i][j].is_zero() {
                            terms.push(&gamma[c][i][j] * &(&a[i] * &b[j]));
                        }
                    }
                }
                Expr::sum(terms)
            })
            .collect();
        Ok(frame.combine(&comps))
    }

    /// `⟨X : Y⟩ = ∇_X Y + ∇_Y X`.
    pub fn symmetric_product(&self, x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
        self.covariant_derivative(x, y)?.add(&self.covariant_derivative(y, x)?)
    }

    /// `R(X,Y)W = ∇_X ∇_Y W − ∇_Y ∇_X W − ∇_{[X,Y]} W`.
    pub fn curvature(&self, x: &VectorField, y: &VectorField, w: &VectorField) -> Result<VectorField, GeometryError> {
        let xy = self.covariant_derivative(x, &self.covariant_derivative(y, w)?)?;
        let yx = self.covariant_derivative(y, &self.covariant_derivative(x, w)?)?;
        let br = self.covariant_derivative(&x.lie_bracket(y)?, w)?;
        xy.sub(&yx)?.sub(&br)
    }

    /// `T(X,Y) = ∇_X Y − ∇_Y X − [X,Y]`.
    pub fn torsion(&self, x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
        self.covariant_derivative(x, y)?
            .sub(&self.covariant_derivative(y, x)?)?
            .sub(&x.lie_bracket(y)?)
    }

    /// Sampled test of `Γᵏ_{ij} = Γᵏ_{ji}`.
    pub fn is_torsion_free(&self, zt: &ZeroTest) -> Result<bool, GeometryError> {
        let n = self.dim();
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    if !zt.is_zero(&(&self.coord[k][i][j] - &self.coord[k][j][i]))? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The connection with symbols `½(Γᵏ_{ij} + Γᵏ_{ji})`; it has the same
    /// geodesic spray and symmetric product.
    pub fn symmetrized(&self) -> Connection {
        let n = self.dim();
        let half = Expr::rational(1, 2);
        let mut coord = zero_table(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    coord[k][i][j] = &half * &(&self.coord[k][i][j] + &self.coord[k][j][i]);
                }
            }
        }
        Connection {
            chart: self.chart.clone(),
            coord,
            frame: None,
        }
    }

    /// Coordinate curvature components `R^p_{jkl}`, the `p`-th component of
    /// `R(∂_k, ∂_l) ∂_j`, indexed `[p][j][k][l]`.
    pub fn riemann(&self) -> Vec<Vec<Vec<Vec<Expr>>>> {
        let n = self.dim();
        let qs = self.chart.coords();
        let g = &self.coord;
        let mut r = vec![vec![vec![vec![Expr::zero(); n]; n]; n]; n];
        for p in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if l == k {
                            continue;
                        }
                        if l < k {
                            r[p][j][k][l] = -&r[p][j][l][k];
                            continue;
                        }
                        let mut terms = vec![g[p][l][j].diff(&qs[k]), -g[p][k][j].diff(&qs[l])];
                        for m in 0..n {
                            terms.push(&g[p][k][m] * &g[m][l][j]);
                            terms.push(-(&g[p][l][m] * &g[m][k][j]));
                        }
                        r[p][j][k][l] = Expr::sum(terms);
                    }
                }
            }
        }
        r
    }
}

fn check_shape(n: usize, g: &Christoffels) -> Result<(), GeometryError> {
    let bad = g.len() != n || g.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n));
    if bad {
        return Err(GeometryError::ComponentCount {
            expected: n * n * n,
            got: g.iter().flatten().flatten().count(),
        });
    }
    Ok(())
}

/// Levi-Civita connection by the Koszul formula
/// `Γᵏ_{ij} = ½ G^{kl} (∂_i G_{jl} + ∂_j G_{il} − ∂_l G_{ij})`.
pub fn levi_civita(metric: &Metric) -> Result<Connection, GeometryError> {
    let chart = metric.chart().clone();
    let n = chart.dim();
    let qs = chart.coords();
    let g = metric.matrix();
    let (ginv, det) = cofactor_inverse(g).ok_or(GeometryError::SingularMetric)?;
    if ZeroTest::default().is_zero(&det)? {
        return Err(GeometryError::SingularMetric);
    }
    let half = Expr::rational(1, 2);
    // first-kind symbols [ij, l]
    let mut first = vec![vec![vec![Expr::zero(); n]; n]; n];
    for i in 0..n {
        for j in i..n {
            for l in 0..n {
                let e = g[j][l].diff(&qs[i]) + g[i][l].diff(&qs[j]) - g[i][j].diff(&qs[l]);
                first[i][j][l] = e.clone();
                first[j][i][l] = e;
            }
        }
    }
    let mut coord = zero_table(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let s = Expr::sum((0..n).map(|l| &ginv[k][l] * &first[i][j][l]));
                let s = &half * &s;
                coord[k][i][j] = s.clone();
                coord[k][j][i] = s;
            }
        }
    }
    Ok(Connection {
        chart,
        coord,
        frame: None,
    })
}
