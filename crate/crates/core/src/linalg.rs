//! Small dense linear-algebra helpers shared by the solvers.

use ndarray::Array2;

/// Squared Frobenius norm.
pub fn frobenius_sq(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum()
}

/// Squared Frobenius norm of `a - b`.
pub fn diff_frobenius_sq(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Solves `a * x = rhs` for square `a` by LU with partial pivoting.
///
/// Returns `None` when a pivot falls below `1e-12` times the largest
/// entry of `a` (near-singular).
pub fn lu_solve(a: &Array2<f64>, rhs: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "lu_solve needs a square matrix");
    assert_eq!(rhs.nrows(), n, "rhs row count must match");
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let tol = 1e-12 * scale;

    let mut lu = a.clone();
    let mut x = rhs.clone();
    let k = rhs.ncols();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| lu[[r1, col]].abs().partial_cmp(&lu[[r2, col]].abs()).unwrap())
            .unwrap();
        if lu[[pivot_row, col]].abs() < tol {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                lu.swap([col, c], [pivot_row, c]);
            }
            for c in 0..k {
                x.swap([col, c], [pivot_row, c]);
            }
        }
        let pivot = lu[[col, col]];
        for row in (col + 1)..n {
            let factor = lu[[row, col]] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                lu[[row, c]] -= factor * lu[[col, c]];
            }
            for c in 0..k {
                x[[row, c]] -= factor * x[[col, c]];
            }
        }
    }
    // back substitution
    for col in (0..n).rev() {
        for c in 0..k {
            let mut v = x[[col, c]];
            for j in (col + 1)..n {
                v -= lu[[col, j]] * x[[j, c]];
            }
            x[[col, c]] = v / lu[[col, col]];
        }
    }
    Some(x)
}
