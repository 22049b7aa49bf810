use crate::symcore::Expr;

/// Determinant by Laplace expansion along the first row.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    let cols: Vec<usize> = (0..n).collect();
    minor_det(m, 0, &cols)
}

fn minor_det(m: &[Vec<Expr>], row: usize, cols: &[usize]) -> Expr {
    match cols.len() {
        0 => Expr::one(),
        1 => m[row][cols[0]].clone(),
        2 => &m[row][cols[0]] * &m[row + 1][cols[1]] - &m[row][cols[1]] * &m[row + 1][cols[0]],
        _ => {
            let mut terms = Vec::with_capacity(cols.len());
            for (pos, &c) in cols.iter().enumerate() {
                if m[row][c].is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&d| d != c).collect();
                let t = &m[row][c] * &minor_det(m, row + 1, &rest);
                terms.push(if pos % 2 == 0 { t } else { -t });
            }
            Expr::sum(terms)
        }
    }
}

/// Symbolic inverse by cofactors, with the determinant. `None` when the
/// determinant is structurally zero.
pub fn cofactor_inverse(m: &[Vec<Expr>]) -> Option<(Vec<Vec<Expr>>, Expr)> {
    let n = m.len();
    let det = determinant(m);
    let inv_det = det.checked_recip()?;
    let mut inv = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            // inv[j][i] = (-1)^(i+j) M_ij / det, with M_ij the minor without row i, column j.
            let sub: Vec<Vec<Expr>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                .collect();
            let cof = determinant(&sub);
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            inv[j][i] = &cof * &inv_det;
        }
    }
    Some((inv, det))
}
