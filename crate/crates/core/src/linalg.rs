//! Dense linear algebra helpers: numerical rank, generic solves and least squares.

use nalgebra::DMatrix;

use crate::{Scalar, C64};

/// Relative pivot threshold used by [`numerical_rank`].
pub const PIVOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    /// Accepted pivot magnitudes in elimination order (after row scaling).
    pub pivots: Vec<f64>,
}

/// Numerical rank of a matrix given as rows.
///
/// Each nonzero row is scaled to unit max-norm, then full-pivot Gaussian
/// elimination accepts a pivot while it exceeds `tol` times the largest
/// initial entry.
pub fn numerical_rank(rows: &[Vec<C64>], tol: f64) -> RankInfo {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<C64>> = rows
        .iter()
        .map(|row| {
            let max = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if max > 0.0 && max.is_finite() {
                row.iter().map(|z| z / max).collect()
            } else {
                row.clone()
            }
        })
        .collect();
    let largest = a
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let mut pivots = Vec::new();
    if largest == 0.0 {
        return RankInfo { rank: 0, pivots };
    }
    let threshold = tol * largest;
    for step in 0..n_rows.min(n_cols) {
        let mut best = (step, step, 0.0);
        for (i, row) in a.iter().enumerate().skip(step) {
            for (j, z) in row.iter().enumerate().skip(step) {
                if z.norm() > best.2 {
                    best = (i, j, z.norm());
                }
            }
        }
        if !(best.2 > threshold) {
            break;
        }
        pivots.push(best.2);
        a.swap(step, best.0);
        for row in a.iter_mut() {
            row.swap(step, best.1);
        }
        let pivot_row = a[step].clone();
        for row in a.iter_mut().skip(step + 1) {
            let factor = row[step] / pivot_row[step];
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for (z, p) in row.iter_mut().zip(&pivot_row).skip(step) {
                *z -= factor * p;
            }
        }
    }
    RankInfo {
        rank: pivots.len(),
        pivots,
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting (by value
/// magnitude). Returns `None` when a pivot vanishes.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (p, mag) = (col..n)
            .map(|i| (i, m[i][col].value().norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag == 0.0 || !mag.is_finite() {
            return None;
        }
        m.swap(col, p);
        rhs.swap(col, p);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..n {
                let v = m[col][j];
                m[i][j] = m[i][j] - f * v;
            }
            let v = rhs[col];
            rhs[i] = rhs[i] - f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s = s - m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

/// Inverse by repeated solves; `None` if singular.
pub fn inverse<T: Scalar>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let e: Vec<T> = (0..n)
            .map(|i| if i == k { T::one() } else { T::zero() })
            .collect();
        cols.push(solve(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// Determinant by elimination with partial pivoting.
pub fn determinant<T: Scalar>(a: &[Vec<T>]) -> T {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let (p, mag) = (col..n)
            .map(|i| (i, m[i][col].value().norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag == 0.0 {
            return T::zero();
        }
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det = det * m[col][col];
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..n {
                let v = m[col][j];
                m[i][j] = m[i][j] - f * v;
            }
        }
    }
    det
}

/// Least-squares solution of `A x ≈ b` and the residual norm `‖A x − b‖`.
pub fn least_squares(a: &[Vec<C64>], b: &[C64]) -> (Vec<C64>, f64) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        let r = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        return (vec![C64::new(0.0, 0.0); cols], r);
    }
    let am = DMatrix::from_fn(rows, cols, |i, j| a[i][j]);
    let bm = DMatrix::from_fn(rows, 1, |i, _| b[i]);
    let svd = am.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let sol = svd
        .solve(&bm, max_sv * 1e-12)
        .unwrap_or_else(|_| DMatrix::zeros(cols, 1));
    let resid = (&am * &sol - &bm).norm();
    (sol.iter().cloned().collect(), resid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(xs: &[f64]) -> Vec<C64> {
        xs.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![row(&[1.0, 2.0, 3.0]), row(&[2.0, 4.0, 6.0]), row(&[0.0, 1.0, 1.0])];
        assert_eq!(numerical_rank(&rows, PIVOT_TOL).rank, 2);
    }

    #[test]
    fn rank_never_exceeds_dims() {
        let rows = vec![row(&[1.0, 0.0]), row(&[0.0, 1.0]), row(&[1.0, 1.0])];
        assert_eq!(numerical_rank(&rows, PIVOT_TOL).rank, 2);
        assert_eq!(numerical_rank(&[], PIVOT_TOL).rank, 0);
    }

    #[test]
    fn rank_ignores_tiny_perturbation() {
        let rows = vec![row(&[1.0, 1.0]), row(&[1.0, 1.0 + 1e-12])];
        assert_eq!(numerical_rank(&rows, PIVOT_TOL).rank, 1);
    }

    #[test]
    fn solve_and_determinant() {
        let a = vec![row(&[2.0, 1.0]), row(&[1.0, 3.0])];
        let x = solve(&a, &row(&[3.0, 5.0])).unwrap();
        assert!((x[0] - C64::new(0.8, 0.0)).norm() < 1e-14);
        assert!((x[1] - C64::new(1.4, 0.0)).norm() < 1e-14);
        assert!((determinant(&a) - C64::new(5.0, 0.0)).norm() < 1e-14);
        let inv = inverse(&a).unwrap();
        assert!((inv[0][0] - C64::new(0.6, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn least_squares_exact_fit() {
        let a = vec![row(&[1.0, 0.0]), row(&[0.0, 1.0]), row(&[1.0, 1.0])];
        let (x, r) = least_squares(&a, &row(&[1.0, 2.0, 3.0]));
        assert!(r < 1e-12);
        assert!((x[1] - C64::new(2.0, 0.0)).norm() < 1e-12);
    }
}
