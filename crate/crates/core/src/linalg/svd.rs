//! One-sided (Hestenes) Jacobi singular values, used for spectral norms.

use super::matrix::{CMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Singular values of `a`, unsorted. Always terminates; at most `MAX_SWEEPS` sweeps.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    // Work on whichever orientation has fewer columns.
    let m = if a.cols() > a.rows() { a.adjoint() } else { a.clone() };
    let (rows, cols) = (m.rows(), m.cols());
    let mut c: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j).into_vec()).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = c[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = c[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = c[p].iter().zip(&c[q]).map(|(u, v)| u.conj() * v).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..rows {
                    let u = c[p][i];
                    let v = c[q][i] * phase.conj();
                    c[p][i] = u * cs - v * sn;
                    c[q][i] = (u * sn + v * cs) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    c.iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect()
}
