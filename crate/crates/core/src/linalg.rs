//! Small dense linear-algebra helpers sized for this crate's needs
//! (covariate counts in the tens): Cholesky solves for Newton steps and a
//! Householder QR least-squares path for regression inference.

/// Solve `a x = b` for symmetric positive-definite `a` via Cholesky.
/// Returns `None` when the factorization breaks down (matrix not SPD).
pub fn solve_spd(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    // Lower-triangular factor, row-major.
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // Forward then back substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    Some(x)
}

/// Result of a QR least-squares solve.
#[derive(Debug)]
pub struct Lstsq {
    /// Coefficient vector (length = number of design columns).
    pub coef: Vec<f64>,
    /// Inverse of the upper-triangular R factor; (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ.
    pub r_inv: Vec<Vec<f64>>,
}

/// Householder QR least squares: minimizes ‖X c − y‖₂ for an n×k design
/// given as `rows` (each of length k), n ≥ k.
///
/// Returns `Err(column)` with the index of the first column whose pivot
/// collapses, which signals linear dependence on earlier columns.
pub fn lstsq_qr(rows: &[Vec<f64>], y: &[f64]) -> Result<Lstsq, usize> {
    let n = rows.len();
    let k = if n == 0 { 0 } else { rows[0].len() };
    assert!(n >= k && y.len() == n);

    // Working copies; `m` is overwritten with R in the upper triangle and
    // Householder vectors below it.
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut rhs = y.to_vec();
    let mut diag = vec![0.0; k];

    let col_scale: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);

    for j in 0..k {
        let mut norm2 = 0.0;
        for row in m.iter().take(n).skip(j) {
            norm2 += row[j] * row[j];
        }
        let norm = norm2.sqrt();
        if norm <= 1e-10 * col_scale * (n as f64).sqrt() {
            return Err(j);
        }
        let alpha = if m[j][j] >= 0.0 { -norm } else { norm };
        diag[j] = alpha;
        m[j][j] -= alpha;
        let vnorm2: f64 = (j..n).map(|i| m[i][j] * m[i][j]).sum();
        if vnorm2 == 0.0 {
            return Err(j);
        }
        // Apply the reflector to remaining columns and the RHS.
        for c in j + 1..k {
            let dot: f64 = (j..n).map(|i| m[i][j] * m[i][c]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..n {
                m[i][c] -= f * m[i][j];
            }
        }
        let dot: f64 = (j..n).map(|i| m[i][j] * rhs[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in j..n {
            rhs[i] -= f * m[i][j];
        }
    }

    // R is upper triangular with `diag` on the diagonal.
    let r_at = |i: usize, j: usize| -> f64 {
        if i == j {
            diag[i]
        } else {
            m[i][j]
        }
    };

    // Rank-deficiency guard relative to the largest pivot.
    let max_pivot = diag.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for (j, d) in diag.iter().enumerate() {
        if d.abs() < 1e-10 * max_pivot {
            return Err(j);
        }
    }

    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let mut sum = rhs[i];
        for j in i + 1..k {
            sum -= r_at(i, j) * coef[j];
        }
        coef[i] = sum / diag[i];
    }

    // Invert R by back substitution, one unit column at a time.
    let mut r_inv = vec![vec![0.0; k]; k];
    for c in 0..k {
        let mut x = vec![0.0; k];
        for i in (0..=c).rev() {
            let mut sum = if i == c { 1.0 } else { 0.0 };
            for j in i + 1..=c {
                sum -= r_at(i, j) * x[j];
            }
            x[i] = sum / diag[i];
        }
        for i in 0..k {
            r_inv[i][c] = x[i];
        }
    }

    Ok(Lstsq { coef, r_inv })
}

/// Dot product; panics in debug on length mismatch.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_solve_roundtrip() {
        let a = vec![
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ];
        let x_true = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..3).map(|i| dot(&a[i], &x_true)).collect();
        let x = solve_spd(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(x_true.iter()) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn spd_rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(solve_spd(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn qr_exact_fit() {
        // y = 1 + 2 x, design [1, x]
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..5).map(|i| 1.0 + 2.0 * i as f64).collect();
        let fit = lstsq_qr(&rows, &y).unwrap();
        assert!((fit.coef[0] - 1.0).abs() < 1e-12);
        assert!((fit.coef[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn qr_flags_dependent_column() {
        // third column = 2 * second
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![1.0, i as f64, 2.0 * i as f64])
            .collect();
        let y = vec![0.0; 6];
        assert_eq!(lstsq_qr(&rows, &y).unwrap_err(), 2);
    }

    #[test]
    fn qr_matches_normal_equations() {
        // small over-determined system with a known normal-equations solution
        let rows = vec![
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 3.0],
        ];
        let y = vec![1.0, 2.2, 2.8, 4.1];
        let fit = lstsq_qr(&rows, &y).unwrap();
        // normal equations by hand: XtX = [[4,6],[6,14]], Xty = [10.1, 20.1]
        let det = 4.0 * 14.0 - 36.0;
        let c0 = (14.0 * 10.1 - 6.0 * 20.1) / det;
        let c1 = (4.0 * 20.1 - 6.0 * 10.1) / det;
        assert!((fit.coef[0] - c0).abs() < 1e-12);
        assert!((fit.coef[1] - c1).abs() < 1e-12);
    }
}
