//! Numerical rank by singular-value thresholding.

use nalgebra::DMatrix;

/// Relative singular-value cutoff used for every rank decision.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Below this largest singular value a matrix counts as zero.
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

/// Singular values of the matrix whose rows are `rows`, in decreasing order.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let cols = first.len();
    if cols == 0 {
        return Vec::new();
    }
    let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    let m = DMatrix::from_row_slice(rows.len(), cols, &data);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `tol · σ_max`; zero when `σ_max` is below
/// [`ABSOLUTE_FLOOR`] or any entry is non-finite.
pub fn numeric_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return 0;
    }
    let sv = singular_values(rows);
    let Some(&max) = sv.first() else {
        return 0;
    };
    if max <= ABSOLUTE_FLOOR {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Rank after scaling every nonzero row to unit length, so that rows of very
/// different magnitude are weighed equally.
pub fn normalized_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let scaled: Vec<Vec<f64>> = rows
        .iter()
        .filter_map(|r| {
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            (norm > ABSOLUTE_FLOOR && norm.is_finite()).then(|| r.iter().map(|v| v / norm).collect())
        })
        .collect();
    numeric_rank(&scaled, tol)
}

/// True when appending `v` to `rows` does not raise the rank.
pub fn in_span(rows: &[Vec<f64>], v: &[f64], tol: f64) -> bool {
    let base = numeric_rank(rows, tol);
    let mut with = rows.to_vec();
    with.push(v.to_vec());
    numeric_rank(&with, tol) == base
}
