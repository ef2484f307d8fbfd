use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

/// Pivots below `PIVOT_FACTOR · n · ε · max|A|` are treated as singular.
pub const PIVOT_FACTOR: f64 = 1.0;

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve_dense(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    solve_dense_with(a, b, PIVOT_FACTOR)
}

/// As [`solve_dense`] with an explicit pivot threshold factor.
pub fn solve_dense_with(a: &CMatrix, b: &CMatrix, pivot_factor: f64) -> Result<CMatrix> {
    let n = a.require_square()?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    let threshold = pivot_factor * n as f64 * f64::EPSILON * a.max_abs();
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = b.cols();

    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax <= threshold || pmax == 0.0 {
            return Err(Error::SingularToTolerance { pivot: pmax });
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            for j in 0..m {
                let t = x[(k, j)];
                x[(k, j)] = x[(p, j)];
                x[(p, j)] = t;
            }
        }
        let piv = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / piv;
            if f == ZERO {
                continue;
            }
            lu[(i, k)] = f;
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
            for j in 0..m {
                let u = x[(k, j)];
                x[(i, j)] -= f * u;
            }
        }
    }
    for j in 0..m {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for l in i + 1..n {
                s -= lu[(i, l)] * x[(l, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Inverse via [`solve_dense`] against the identity.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let n = a.require_square()?;
    solve_dense(a, &CMatrix::identity(n))
}

/// Solves the upper-triangular system `U x = b` columnwise; no pivoting.
pub(crate) fn solve_upper(u: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = u.require_square()?;
    let threshold = n as f64 * f64::EPSILON * u.max_abs();
    let mut x = b.clone();
    for j in 0..b.cols() {
        for i in (0..n).rev() {
            let d = u[(i, i)];
            if d.norm() <= threshold || d == ZERO {
                return Err(Error::SingularToTolerance { pivot: d.norm() });
            }
            let mut s = x[(i, j)];
            for l in i + 1..n {
                s -= u[(i, l)] * x[(l, j)];
            }
            x[(i, j)] = s / d;
        }
    }
    Ok(x)
}
