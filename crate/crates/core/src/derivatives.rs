//! First-order derivatives at `τ₀`:
//!
//! ```text
//! λ'      = y₀* A' x₀            = tr(Π₀ A')
//! x'      = −S A' x₀
//! (y*)'   = −y₀* A' S
//! Π'      = −Π₀ A' S − S A' Π₀
//! ```
//!
//! `(y*)'` is kept as the row functional it is; `y(τ)` itself is not analytic.

use crate::eigentriple::EigenTriple;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::spectral::{derivative_bound, SpectralStructure};

#[derive(Clone, Debug)]
pub struct SensitivityReport {
    pub lambda_prime: C64,
    pub lambda_prime_trace_form: C64,
    pub x_prime: CVector,
    /// Entries of the row vector `(y*)'(τ₀)`.
    pub ystar_prime: CVector,
    pub pi_prime: CMatrix,
    /// `κ(X)·‖(λ₀I − B₁)⁻¹‖·‖A'‖`.
    pub bound_rhs: f64,
    /// `χ·‖A'‖`, the bound on `|λ'|`.
    pub chi_times_norm_aprime: f64,
}

fn check_dims(n: usize, aprime: &CMatrix) -> Result<()> {
    let m = aprime.require_square()?;
    if m != n {
        return Err(Error::DimensionMismatch { expected: n, found: m });
    }
    Ok(())
}

/// `λ'(τ₀) = y₀*A'x₀`.
pub fn lambda_derivative(t: &EigenTriple, aprime: &CMatrix) -> Result<C64> {
    check_dims(t.dim(), aprime)?;
    Ok(t.y0.dot(&aprime.mul_vec(&t.x0)))
}

/// `λ'(τ₀) = tr(Π₀A')`.
pub fn lambda_derivative_trace(pi0: &CMatrix, aprime: &CMatrix) -> Result<C64> {
    let n = pi0.require_square()?;
    check_dims(n, aprime)?;
    Ok((0..n)
        .map(|i| (0..n).map(|k| pi0[(i, k)] * aprime[(k, i)]).sum::<C64>())
        .sum())
}

/// `(x', (y*)') = (−SA'x₀, −y₀*A'S)`.
pub fn eigenvector_derivatives(ss: &SpectralStructure, aprime: &CMatrix) -> Result<(CVector, CVector)> {
    check_dims(ss.dim(), aprime)?;
    let x_prime = -&ss.s.mul_vec(&aprime.mul_vec(ss.x0()));
    let ystar_prime = -&ss.y0().adjoint_mul(aprime).row_times(&ss.s);
    Ok((x_prime, ystar_prime))
}

/// `Π'(τ₀) = −Π₀A'S − SA'Π₀`.
pub fn projector_derivative(ss: &SpectralStructure, aprime: &CMatrix) -> Result<CMatrix> {
    check_dims(ss.dim(), aprime)?;
    let left = &(&ss.pi0 * aprime) * &ss.s;
    let right = &(&ss.s * aprime) * &ss.pi0;
    Ok(-&(&left + &right))
}

/// All first-order quantities from one structure.
pub fn sensitivity(ss: &SpectralStructure, aprime: &CMatrix) -> Result<SensitivityReport> {
    let lambda_prime = lambda_derivative(&ss.triple, aprime)?;
    let lambda_prime_trace_form = lambda_derivative_trace(&ss.pi0, aprime)?;
    let (x_prime, ystar_prime) = eigenvector_derivatives(ss, aprime)?;
    let pi_prime = projector_derivative(ss, aprime)?;
    let bound_rhs = derivative_bound(ss, aprime)?.bound;
    Ok(SensitivityReport {
        lambda_prime,
        lambda_prime_trace_form,
        x_prime,
        ystar_prime,
        pi_prime,
        bound_rhs,
        chi_times_norm_aprime: ss.triple.chi * aprime.norm2(),
    })
}

impl CVector {
    /// Row vector (given by its entries) times a matrix.
    pub fn row_times(&self, m: &CMatrix) -> CVector {
        assert_eq!(self.len(), m.rows());
        CVector::from_vec(
            (0..m.cols())
                .map(|j| (0..m.rows()).map(|i| self[i] * m[(i, j)]).sum())
                .collect(),
        )
    }

    /// Row vector (given by its entries) times a column vector.
    pub fn row_dot(&self, col: &CVector) -> C64 {
        self.dot_t(col)
    }
}
