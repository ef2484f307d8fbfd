//! Selection of a simple eigenvalue with paired right and left eigenvectors.
//!
//! The right vector comes from the eigendecomposition of `A`, the left vector
//! from the eigendecomposition of `A*` at the conjugate eigenvalue. The pair is
//! canonicalized so that `‖x₀‖ = 1`, the largest-modulus entry of `x₀` is real
//! positive, and `y₀*x₀ = 1`.

use crate::error::{Error, Result};
use crate::linalg::{eig_dense, CMatrix, CVector, EigenDecomposition, C64};

/// Default relative gap below which an eigenvalue is treated as multiple.
pub const DEFAULT_SIMPLICITY_TOL: f64 = 1e-8;

/// Relative `|y*x|` below which the pair is declared (nearly) orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenSelector {
    ClosestTo(C64),
    LargestReal,
    LargestModulus,
    Index(usize),
}

impl EigenSelector {
    /// Picks an index into `eigenvalues`. Ties go to the lowest index.
    pub fn pick(&self, eigenvalues: &[C64]) -> Result<usize> {
        let n = eigenvalues.len();
        let argbest = |score: &dyn Fn(C64) -> f64| {
            let mut best = 0;
            for k in 1..n {
                if score(eigenvalues[k]) > score(eigenvalues[best]) {
                    best = k;
                }
            }
            best
        };
        match *self {
            EigenSelector::Index(k) if k < n => Ok(k),
            EigenSelector::Index(k) => Err(Error::InvalidArgument(format!(
                "eigenvalue index {k} out of range for dimension {n}"
            ))),
            EigenSelector::ClosestTo(t) => Ok(argbest(&|z| -(z - t).norm())),
            EigenSelector::LargestReal => Ok(argbest(&|z| z.re)),
            EigenSelector::LargestModulus => Ok(argbest(&|z| z.norm())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenTriple {
    pub lambda0: C64,
    pub x0: CVector,
    pub y0: CVector,
    /// Distance from `λ₀` to the nearest other computed eigenvalue.
    pub gap: f64,
    /// `‖x₀‖·‖y₀‖`.
    pub chi: f64,
    /// `(‖A x₀ − λ₀ x₀‖, ‖y₀*A − λ₀ y₀*‖)`.
    pub residuals: (f64, f64),
}

impl EigenTriple {
    /// The pair `(ωx₀, y₀/ω̄)`, which leaves `y₀*x₀` and `x₀y₀*` unchanged.
    pub fn rescaled(&self, omega: C64) -> Result<EigenTriple> {
        if omega.norm() == 0.0 || !omega.re.is_finite() || !omega.im.is_finite() {
            return Err(Error::InvalidArgument("rescaling factor must be finite and nonzero".into()));
        }
        let x0 = self.x0.scale(omega);
        let y0 = self.y0.scale(C64::new(1.0, 0.0) / omega.conj());
        Ok(EigenTriple {
            lambda0: self.lambda0,
            chi: x0.norm() * y0.norm(),
            residuals: (self.residuals.0 * omega.norm(), self.residuals.1 / omega.norm()),
            x0,
            y0,
            gap: self.gap,
        })
    }

    /// Rank-one eigenprojector `x₀y₀*`.
    pub fn projector(&self) -> CMatrix {
        self.x0.outer(&self.y0)
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }
}

/// `χ = ‖x₀‖‖y₀‖`.
pub fn condition_number(t: &EigenTriple) -> f64 {
    t.x0.norm() * t.y0.norm()
}

/// Minimum distance from `eigenvalues[k]` to the rest of the spectrum
/// (`+∞` for a 1×1 matrix).
pub fn spectral_gap(eigenvalues: &[C64], k: usize) -> f64 {
    eigenvalues
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, z)| (z - eigenvalues[k]).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Index of the eigenvalue farthest from the rest of the spectrum.
pub fn most_isolated(eigenvalues: &[C64]) -> usize {
    let mut best = 0;
    for k in 1..eigenvalues.len() {
        if spectral_gap(eigenvalues, k) > spectral_gap(eigenvalues, best) {
            best = k;
        }
    }
    best
}

/// Extracts the triple for the selected eigenvalue of `a`.
pub fn extract_triple(a: &CMatrix, sel: EigenSelector, simplicity_tol: f64) -> Result<EigenTriple> {
    a.require_square()?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let eig = eig_dense(a)?;
    let k = sel.pick(&eig.eigenvalues)?;
    triple_from_decomposition(a, &eig, k, simplicity_tol)
}

/// As [`extract_triple`], reusing an existing eigendecomposition of `a` and a
/// chosen eigenvalue index.
pub fn triple_from_decomposition(
    a: &CMatrix,
    eig: &EigenDecomposition,
    k: usize,
    simplicity_tol: f64,
) -> Result<EigenTriple> {
    if !(simplicity_tol > 0.0) {
        return Err(Error::InvalidArgument("simplicity tolerance must be positive".into()));
    }
    let n = a.rows();
    let lambda0 = eig.eigenvalues[k];
    let gap = spectral_gap(&eig.eigenvalues, k);
    let anorm = a.norm2();
    let threshold = simplicity_tol * anorm;
    if gap <= threshold {
        return Err(Error::NotSimple { gap, threshold });
    }

    let x = eig.vector(k);
    let w = left_vector(a, lambda0, gap)?;

    let product = w.dot(&x);
    let rel = product.norm() / (x.norm() * w.norm());
    if rel < ORTHOGONALITY_TOL {
        return Err(Error::NearOrthogonalPair { product: rel });
    }

    // ‖x‖ = 1 with the largest-modulus entry real positive.
    let j = x.argmax_abs();
    let phase = x[j].conj() / x[j].norm();
    let x0 = x.scale(phase / x.norm());
    let c = w.dot(&x0);
    let y0 = w.scale(C64::new(1.0, 0.0) / c.conj());

    let r_right = (&a.mul_vec(&x0) - &x0.scale(lambda0)).norm();
    let r_left = (&y0.adjoint_mul(a) - &y0.conj().scale(lambda0)).norm();
    let chi = x0.norm() * y0.norm();
    debug_assert_eq!(x0.len(), n);
    Ok(EigenTriple {
        lambda0,
        x0,
        y0,
        gap,
        chi,
        residuals: (r_right, r_left),
    })
}

/// Right eigenvector `w` of `A*` for `conj(λ₀)`, i.e. `w*A = λ₀w*`.
fn left_vector(a: &CMatrix, lambda0: C64, gap: f64) -> Result<CVector> {
    let adj = eig_dense(&a.adjoint())?;
    let target = lambda0.conj();
    let mut order: Vec<(f64, usize)> = adj
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, mu)| ((mu - target).norm(), i))
        .collect();
    order.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    let radius = if gap.is_finite() { gap / 2.0 } else { f64::INFINITY };
    let (d0, i0) = order[0];
    if d0 > radius {
        return Err(Error::PairingAmbiguous(format!(
            "no eigenvalue of A* within {radius:e} of conj(λ₀)"
        )));
    }
    if let Some(&(d1, _)) = order.get(1) {
        if d1 <= radius || d1 == d0 {
            return Err(Error::PairingAmbiguous(
                "two eigenvalues of A* equally close to conj(λ₀)".into(),
            ));
        }
    }
    Ok(adj.vector(i0))
}
