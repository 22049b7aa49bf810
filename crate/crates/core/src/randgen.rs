//! Random symbolic instances for property checks: small polynomial/trig
//! expressions, vector fields and connections over a chart.

use rand::Rng;

use crate::geometry::{Chart, Christoffels, Connection, VectorField};
use crate::symcore::{Expr, SymbolKind};

/// A sum of up to three terms `c · f₁ · f₂` with `c ∈ {-3..3}` and factors
/// drawn from coordinates, `sin`/`cos` of coordinates and constants.
pub fn expr<R: Rng>(chart: &Chart, rng: &mut R) -> Expr {
    let terms = rng.gen_range(1..=3);
    Expr::sum((0..terms).map(|_| {
        let c = rng.gen_range(-3i64..=3);
        let mut t = Expr::int(c);
        for _ in 0..rng.gen_range(0..=2) {
            t = t * factor(chart, rng);
        }
        t
    }))
}

fn factor<R: Rng>(chart: &Chart, rng: &mut R) -> Expr {
    let i = rng.gen_range(0..chart.dim());
    let q = Expr::symbol(chart.coord(i));
    let angle = chart.coord(i).kind() == SymbolKind::Angle;
    match rng.gen_range(0..4) {
        0 if !angle => q,
        1 => q.sin(),
        2 => q.cos(),
        _ if angle => q.sin(),
        _ => q + Expr::int(rng.gen_range(1..=2)),
    }
}

/// Like [`expr`], but zero with probability `p_zero`.
pub fn sparse_expr<R: Rng>(chart: &Chart, rng: &mut R, p_zero: f64) -> Expr {
    if rng.gen_bool(p_zero) {
        Expr::zero()
    } else {
        expr(chart, rng)
    }
}

pub fn field<R: Rng>(chart: &Chart, rng: &mut R) -> VectorField {
    VectorField::new(chart, (0..chart.dim()).map(|_| expr(chart, rng)).collect()).expect("components over the chart")
}

/// Random Christoffel symbols; symmetric in the lower indices when `torsion_free`.
pub fn connection<R: Rng>(chart: &Chart, rng: &mut R, torsion_free: bool) -> Connection {
    let n = chart.dim();
    let mut g: Christoffels = vec![vec![vec![Expr::zero(); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if torsion_free && j < i {
                    g[k][i][j] = g[k][j][i].clone();
                } else {
                    g[k][i][j] = sparse_expr(chart, rng, 0.5);
                }
            }
        }
    }
    Connection::from_christoffels(chart, g).expect("symbols over the chart")
}

/// A torsion-free connection on a chart of dimension `n` that restricts to
/// `D = span{∂₁, …, ∂_k}`: every `Γ^α_{ia}` and `Γ^α_{ai}` with `α ≥ k`,
/// `a < k` vanishes. Returns the connection and `D`'s generators.
pub fn restricted_connection<R: Rng>(chart: &Chart, k: usize, rng: &mut R) -> (Connection, Vec<VectorField>) {
    let n = chart.dim();
    let mut g: Christoffels = vec![vec![vec![Expr::zero(); n]; n]; n];
    for alpha in 0..n {
        for i in 0..n {
            for j in i..n {
                let forced_zero = alpha >= k && (i < k || j < k);
                let e = if forced_zero {
                    Expr::zero()
                } else {
                    sparse_expr(chart, rng, 0.4)
                };
                g[alpha][i][j] = e.clone();
                g[alpha][j][i] = e;
            }
        }
    }
    let conn = Connection::from_christoffels(chart, g).expect("symbols over the chart");
    let gens = (0..k).map(|a| VectorField::coordinate(chart, a)).collect();
    (conn, gens)
}

/// A field in `span{∂₁, …, ∂_k}` with random function coefficients.
pub fn field_in_span<R: Rng>(chart: &Chart, k: usize, rng: &mut R) -> VectorField {
    let comps = (0..chart.dim())
        .map(|i| if i < k { expr(chart, rng) } else { Expr::zero() })
        .collect();
    VectorField::new(chart, comps).expect("components over the chart")
}
