use std::fmt;

use crate::geometry::{Chart, Christoffels, Connection, GeometryError, VectorField};
use crate::symcore::{Binding, EvalError, Expr, Symbol, ZeroTest};

/// A field on `TQ` written as `X^H + W^V` in the splitting
/// `T_{v_q}TQ ≃ H ⊕ V`. Both parts are `n` component expressions over the
/// doubled chart `(q, v)`, i.e. vector fields along the projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitField {
    pub hor: Vec<Expr>,
    pub ver: Vec<Expr>,
}

impl SplitField {
    pub fn zero(n: usize) -> SplitField {
        SplitField {
            hor: vec![Expr::zero(); n],
            ver: vec![Expr::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.hor.len()
    }

    pub fn add(&self, other: &SplitField) -> SplitField {
        SplitField {
            hor: add(&self.hor, &other.hor),
            ver: add(&self.ver, &other.ver),
        }
    }

    pub fn sub(&self, other: &SplitField) -> SplitField {
        SplitField {
            hor: sub(&self.hor, &other.hor),
            ver: sub(&self.ver, &other.ver),
        }
    }

    pub fn scale(&self, c: &Expr) -> SplitField {
        SplitField {
            hor: self.hor.iter().map(|e| c * e).collect(),
            ver: self.ver.iter().map(|e| c * e).collect(),
        }
    }

    pub fn neg(&self) -> SplitField {
        self.scale(&Expr::int(-1))
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.hor.iter().chain(&self.ver).all(Expr::is_zero)
    }

    pub fn is_zero_with(&self, zt: &ZeroTest) -> Result<bool, EvalError> {
        for e in self.hor.iter().chain(&self.ver) {
            if !zt.is_zero(e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when no component depends on a velocity symbol.
    pub fn is_velocity_free(&self) -> bool {
        self.hor.iter().chain(&self.ver).all(Expr::is_velocity_free)
    }

    /// `(hor, ver)` concatenated, evaluated at a binding of `q`, `v` and parameters.
    pub fn evaluate(&self, b: &Binding) -> Result<Vec<f64>, EvalError> {
        self.hor.iter().chain(&self.ver).map(|e| e.evaluate(b)).collect()
    }
}

impl fmt::Display for SplitField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Expr]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "({}) (+) ({})", list(&self.hor), list(&self.ver))
    }
}

fn add(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Split-bracket calculus of a connection.
///
/// The horizontal distribution, `∇` and `R` used here are those of the
/// symmetric part `Γ̃ᵏ_{ij} = ½(Γᵏ_{ij} + Γᵏ_{ji})`. The geodesic spray and
/// the symmetric product only see `Γ̃`, so the Lie algebra generated by the
/// spray and vertical lifts is unchanged.
#[derive(Clone, Debug)]
pub struct SplitCalculus {
    base: Chart,
    doubled: Chart,
    vel: Vec<Expr>,
    gamma: Christoffels,
    /// `R^p_{jkl}` of `Γ̃`, the `p`-th component of `R(∂_k, ∂_l) ∂_j`.
    riemann: Vec<Vec<Vec<Vec<Expr>>>>,
}

impl SplitCalculus {
    pub fn new(conn: &Connection) -> SplitCalculus {
        let sym = conn.symmetrized();
        let base = conn.chart().clone();
        SplitCalculus {
            doubled: base.doubled(),
            vel: base.velocities().iter().map(Expr::symbol).collect(),
            gamma: sym.christoffels().clone(),
            riemann: sym.riemann(),
            base,
        }
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn doubled(&self) -> &Chart {
        &self.doubled
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// The velocity `v` as component expressions.
    pub fn velocity(&self) -> &[Expr] {
        &self.vel
    }

    fn velocity_symbols(&self) -> &[Symbol] {
        &self.doubled.coords()[self.dim()..]
    }

    /// `Γ̃(a, b)^l = Γ̃^l_{ij} aⁱ bʲ`.
    fn gamma_ab(&self, a: &[Expr], b: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        (0..n)
            .map(|l| {
                let mut terms = Vec::new();
                for i in 0..n {
                    if a[i].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let g = &self.gamma[l][i][j];
                        if g.is_zero() || b[j].is_zero() {
                            continue;
                        }
                        terms.push(g * &(&a[i] * &b[j]));
                    }
                }
                Expr::sum(terms)
            })
            .collect()
    }

    /// Derivative of `f` along the horizontal lift of `a`:
    /// `aʲ (∂_{qʲ} f − Γ̃ᵐ_{jk} vᵏ ∂_{vᵐ} f)`.
    fn horizontal_derivative(&self, a: &[Expr], f: &Expr) -> Expr {
        let n = self.dim();
        let qs = self.base.coords();
        let vs = self.velocity_symbols();
        let mut terms = Vec::new();
        for j in 0..n {
            if a[j].is_zero() {
                continue;
            }
            if f.depends_on(&qs[j]) {
                terms.push(&a[j] * &f.diff(&qs[j]));
            }
        }
        let vdeps: Vec<usize> = (0..n).filter(|&m| f.depends_on(&vs[m])).collect();
        if !vdeps.is_empty() {
            let gav = self.gamma_ab(a, &self.vel);
            for m in vdeps {
                if !gav[m].is_zero() {
                    terms.push(-(&gav[m] * &f.diff(&vs[m])));
                }
            }
        }
        Expr::sum(terms)
    }

    /// Derivative of `f` along the vertical lift of `y`: `yʲ ∂_{vʲ} f`.
    fn vertical_derivative(&self, y: &[Expr], f: &Expr) -> Expr {
        let vs = self.velocity_symbols();
        Expr::sum(
            y.iter()
                .zip(vs)
                .filter(|(c, s)| !c.is_zero() && f.depends_on(s))
                .map(|(c, s)| c * &f.diff(s)),
        )
    }

    /// `ver(∇^H_{A^H} B^V)^l = A^H(Bˡ) + Γ̃ˡ_{ji} Aʲ Bⁱ`; for `A`, `B` free of
    /// `v` this is `∇_A B`.
    pub fn nabla_h(&self, a: &[Expr], b: &[Expr]) -> Vec<Expr> {
        let g = self.gamma_ab(a, b);
        b.iter()
            .zip(g)
            .map(|(bl, gl)| self.horizontal_derivative(a, bl) + gl)
            .collect()
    }

    /// `ver(∇^H_{Y^V} B^V) = Y^V(B)`, the fibre derivative.
    pub fn nabla_h_vertical(&self, y: &[Expr], b: &[Expr]) -> Vec<Expr> {
        b.iter().map(|bl| self.vertical_derivative(y, bl)).collect()
    }

    /// `R(X, v) v` for the symmetrized connection.
    pub fn curvature_xvv(&self, x: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        let v = &self.vel;
        (0..n)
            .map(|p| {
                let mut terms = Vec::new();
                for k in 0..n {
                    if x[k].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        for l in 0..n {
                            let r = &self.riemann[p][j][k][l];
                            if !r.is_zero() {
                                terms.push(r * &(&x[k] * &(&v[j] * &v[l])));
                            }
                        }
                    }
                }
                Expr::sum(terms)
            })
            .collect()
    }

    /// The geodesic spray `Z = v ⊕ 0`.
    pub fn spray(&self) -> SplitField {
        SplitField {
            hor: self.vel.clone(),
            ver: vec![Expr::zero(); self.dim()],
        }
    }

    /// `0 ⊕ Y`.
    pub fn vertical(&self, y: &VectorField) -> SplitField {
        SplitField {
            hor: vec![Expr::zero(); self.dim()],
            ver: y.components().to_vec(),
        }
    }

    /// `X ⊕ 0`.
    pub fn horizontal(&self, x: &VectorField) -> SplitField {
        SplitField {
            hor: x.components().to_vec(),
            ver: vec![Expr::zero(); self.dim()],
        }
    }

    /// `[Z, X^H + W^V] = (ver(∇^H_{v^H} X^V) − W) ⊕ (R(X,v)v + ver(∇^H_{v^H} W^V))`.
    pub fn bracket_with_spray(&self, f: &SplitField) -> SplitField {
        let hor = sub(&self.nabla_h(&self.vel, &f.hor), &f.ver);
        let ver = add(&self.curvature_xvv(&f.hor), &self.nabla_h(&self.vel, &f.ver));
        SplitField { hor, ver }
    }

    /// `[Y^V, X^H + W^V] = ver(∇^H_{Y^V} X^V) ⊕ (ver(∇^H_{Y^V} W^V) − ∇_X Y)`
    /// for `Y` free of `v`.
    pub fn bracket_with_vertical(&self, y: &VectorField, f: &SplitField) -> SplitField {
        let yc = y.components();
        let hor = self.nabla_h_vertical(yc, &f.hor);
        let ver = sub(&self.nabla_h_vertical(yc, &f.ver), &self.nabla_h(&f.hor, yc));
        SplitField { hor, ver }
    }

    /// Coordinate form on the doubled chart: `q̇ = hor`, `v̇ = ver − Γ̃(hor, v)`.
    pub fn to_coordinates(&self, f: &SplitField) -> VectorField {
        let gv = self.gamma_ab(&f.hor, &self.vel);
        let mut comps = f.hor.clone();
        comps.extend(sub(&f.ver, &gv));
        VectorField::new(&self.doubled, comps).expect("split parts live on the doubled chart")
    }

    /// Inverse of [`SplitCalculus::to_coordinates`].
    pub fn from_coordinates(&self, x: &VectorField) -> Result<SplitField, GeometryError> {
        if x.chart() != &self.doubled {
            return Err(GeometryError::ChartMismatch);
        }
        let n = self.dim();
        let hor = x.components()[..n].to_vec();
        let gv = self.gamma_ab(&hor, &self.vel);
        let ver = add(&x.components()[n..], &gv);
        Ok(SplitField { hor, ver })
    }
}

/// Lift mode for [`lift`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftMode {
    Vertical,
    Horizontal,
}

/// The geodesic spray `Z = vⁱ ∂_{qⁱ} − Γⁱ_{jk} vʲ vᵏ ∂_{vⁱ}` on the doubled chart.
pub fn geodesic_spray(conn: &Connection) -> VectorField {
    let chart = conn.chart();
    let n = chart.dim();
    let v: Vec<Expr> = chart.velocities().iter().map(Expr::symbol).collect();
    let mut comps = v.clone();
    for i in 0..n {
        let mut terms = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let g = conn.christoffel(i, j, k);
                if !g.is_zero() {
                    terms.push(-(g * &(&v[j] * &v[k])));
                }
            }
        }
        comps.push(Expr::sum(terms));
    }
    VectorField::new(&chart.doubled(), comps).expect("spray lives on the doubled chart")
}

/// Vertical lift `Xⁱ ∂_{vⁱ}` or horizontal lift `Xⁱ (∂_{qⁱ} − Γʲ_{ik} vᵏ ∂_{vʲ})`.
pub fn lift(x: &VectorField, mode: LiftMode, conn: &Connection) -> Result<VectorField, GeometryError> {
    let chart = conn.chart();
    if x.chart() != chart {
        return Err(GeometryError::ChartMismatch);
    }
    let n = chart.dim();
    let v: Vec<Expr> = chart.velocities().iter().map(Expr::symbol).collect();
    let comps = match mode {
        LiftMode::Vertical => {
            let mut c = vec![Expr::zero(); n];
            c.extend(x.components().iter().cloned());
            c
        }
        LiftMode::Horizontal => {
            let mut c = x.components().to_vec();
            for j in 0..n {
                let mut terms = Vec::new();
                for i in 0..n {
                    for k in 0..n {
                        let g = conn.christoffel(j, i, k);
                        if !g.is_zero() && !x.component(i).is_zero() {
                            terms.push(-(g * &(x.component(i) * &v[k])));
                        }
                    }
                }
                c.push(Expr::sum(terms));
            }
            c
        }
    };
    VectorField::new(&chart.doubled(), comps)
}

/// Coefficients of `∇^H` on vertical lifts: entry `[l][j][i]` is
/// `^HΓ^{l̄}_{j ī} = ^HΓ^{l̄}_{j̄ i} = Γˡ_{ji}`; every other mixed entry needed
/// for vertical fields vanishes.
pub fn nabla_h_coeffs(conn: &Connection) -> Christoffels {
    conn.christoffels().clone()
}
