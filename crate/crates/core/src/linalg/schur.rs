//! Complex Schur form by Householder Hessenberg reduction followed by
//! single-shift QR with Wilkinson shifts, plus diagonal reordering and
//! eigenvector back-substitution.

use super::matrix::{CMatrix, CVector, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Iteration budget per eigenvalue before reporting non-convergence.
const ITER_PER_EIGENVALUE: usize = 60;

/// Unitary `q` and upper-triangular `t` with `A = q t q*`.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

/// Full spectrum with unit-norm right eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<C64>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub right_vectors: CMatrix,
    /// `max_k ‖A v_k − λ_k v_k‖ / (‖A‖ ‖v_k‖)`, measured.
    pub residual_bound: f64,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.right_vectors.column(k)
    }
}

/// Givens rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn zeroing(a: C64, b: C64) -> Self {
        let na = a.norm();
        let nb = b.norm();
        if nb == 0.0 {
            return Givens { c: 1.0, s: ZERO };
        }
        if na == 0.0 {
            return Givens { c: 0.0, s: ONE };
        }
        let nu = na.hypot(nb);
        Givens {
            c: na / nu,
            s: (a / na) * b.conj() / nu,
        }
    }

    /// Rows `k, k+1` of `m`, columns `cols`: `m ← G m`.
    fn apply_rows(&self, m: &mut CMatrix, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let x = m[(k, j)];
            let y = m[(k + 1, j)];
            m[(k, j)] = x * self.c + self.s * y;
            m[(k + 1, j)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `k, k+1` of `m`, rows `rows`: `m ← m G*`.
    fn apply_cols(&self, m: &mut CMatrix, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let u = m[(i, k)];
            let v = m[(i, k + 1)];
            m[(i, k)] = u * self.c + v * self.s.conj();
            m[(i, k + 1)] = -u * self.s + v * self.c;
        }
    }
}

/// Householder reduction to upper Hessenberg form: `A = q h q*`.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // h ← (I − 2vv*) h
        for j in 0..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(l, vl)| vl.conj() * h[(k + 1 + l, j)])
                .sum();
            for (l, vl) in v.iter().enumerate() {
                h[(k + 1 + l, j)] -= vl * s * 2.0;
            }
        }
        // h ← h (I − 2vv*), q ← q (I − 2vv*)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(l, vl)| m[(i, k + 1 + l)] * vl)
                    .sum();
                for (l, vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= s * vl.conj() * 2.0;
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = (a + d) * 0.5 + disc;
    let mu2 = (a + d) * 0.5 - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Complex Schur decomposition `A = Q T Q*`.
pub fn schur_dense(a: &CMatrix) -> Result<Schur> {
    let n = a.require_square()?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let (mut t, mut q) = hessenberg(a);
    let scale = t.frobenius_norm();
    let budget = ITER_PER_EIGENVALUE * n.max(1);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n.saturating_sub(1);

    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let mut diag = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= f64::EPSILON * diag {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::NonConvergence { iterations: total });
        }

        let mu = if since_deflation.is_multiple_of(11) {
            // exceptional shift
            t[(hi, hi)] + C64::new(0.75, 0.4) * t[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        for i in lo..=hi {
            t[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::zeroing(t[(k, k)], t[(k + 1, k)]);
            g.apply_rows(&mut t, k, k..n);
            t[(k + 1, k)] = ZERO;
            rots.push(g);
        }
        for (k, g) in (lo..hi).zip(&rots) {
            g.apply_cols(&mut t, k, 0..(k + 2).min(hi + 1));
            g.apply_cols(&mut q, k, 0..n);
        }
        for i in lo..=hi {
            t[(i, i)] += mu;
        }
    }
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur { q, t })
}

/// Swaps diagonal entries `k` and `k+1` of the triangular factor by a unitary
/// rotation, keeping `A = Q T Q*`.
pub fn swap_adjacent(s: &mut Schur, k: usize) {
    let n = s.t.rows();
    let a = s.t[(k, k)];
    let b = s.t[(k + 1, k + 1)];
    let off = s.t[(k, k + 1)];
    // Eigenvector of the 2×2 block for `b` is (off, b − a).
    let g = Givens::zeroing(off, b - a);
    if g.c == 1.0 && g.s == ZERO {
        return;
    }
    // Columns of G* span (v, v⊥) with v ∝ (off, b − a).
    g.apply_rows(&mut s.t, k, 0..n);
    g.apply_cols(&mut s.t, k, 0..n);
    g.apply_cols(&mut s.q, k, 0..n);
    s.t[(k + 1, k)] = ZERO;
    s.t[(k, k)] = b;
    s.t[(k + 1, k + 1)] = a;
}

/// Moves the diagonal entry at `from` to position 0 by adjacent swaps.
pub fn move_to_front(s: &mut Schur, from: usize) {
    for k in (0..from).rev() {
        swap_adjacent(s, k);
    }
}

/// Eigenvectors of the upper-triangular `t`, by back-substitution.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.rows();
    let smallnum = f64::MIN_POSITIVE * n as f64 / f64::EPSILON;
    let mut v = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        let smin = (f64::EPSILON * lam.norm()).max(smallnum);
        v[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[(i, j)] * v[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            v[(i, k)] = -s / d;
        }
    }
    v
}

/// Eigenvalues and unit-norm right eigenvectors.
pub fn eig_dense(a: &CMatrix) -> Result<EigenDecomposition> {
    let n = a.require_square()?;
    let schur = schur_dense(a)?;
    let vt = triangular_eigenvectors(&schur.t);
    let mut vecs = &schur.q * &vt;
    let eigenvalues: Vec<C64> = (0..n).map(|k| schur.t[(k, k)]).collect();
    for k in 0..n {
        let col = vecs.column(k);
        let nrm = col.norm();
        vecs.set_column(k, &col.scale(C64::new(1.0 / nrm, 0.0)));
    }
    let anorm = a.frobenius_norm();
    let mut residual_bound: f64 = 0.0;
    if anorm > 0.0 {
        for (k, lam) in eigenvalues.iter().enumerate() {
            let v = vecs.column(k);
            let r = &a.mul_vec(&v) - &v.scale(*lam);
            residual_bound = residual_bound.max(r.norm() / (anorm * v.norm()));
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        right_vectors: vecs,
        residual_bound,
    })
}
