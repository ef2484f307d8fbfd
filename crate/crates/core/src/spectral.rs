//! Block decomposition `Y*AX = diag(λ₀, B₁)` around a simple eigenvalue, the
//! eigenprojector `Π₀ = x₀y₀*`, its complement `Π₁`, and the group inverse
//! `S = X₁(B₁ − λ₀I)⁻¹Y₁*` of `A − λ₀I`.
//!
//! Construction: reorder a Schur form so that `λ₀` leads,
//! `T = [[λ₀, t*], [0, T₂₂]]`, then solve `r*(T₂₂ − λ₀I) = t*` to decouple the
//! blocks. With `Q = [q₁, Q₂]` this gives `X = [q₁, Q₂ + q₁r*]`,
//! `Y = [q₁ − Q₂r, Q₂]` and `B₁ = T₂₂`. Only `S`, `Π₀`, `Π₁` and the norm
//! bounds are basis independent; `X₁`, `Y₁`, `B₁` depend on the Schur route.

use crate::eigentriple::EigenTriple;
use crate::error::{Error, Result};
use crate::linalg::{inverse, move_to_front, schur_dense, solve_upper, CMatrix, CVector, C64};

#[derive(Clone, Debug)]
pub struct SpectralStructure {
    /// Triple rescaled to be consistent with `X`, `Y` (same scaling as the input triple).
    pub triple: EigenTriple,
    pub x1: CMatrix,
    pub y1: CMatrix,
    pub b1: CMatrix,
    pub s: CMatrix,
    pub pi0: CMatrix,
    pub pi1: CMatrix,
    /// `κ(X) = ‖X‖‖Y‖`.
    pub kappa_x: f64,
    /// `‖(λ₀I − B₁)⁻¹‖`.
    pub resolvent_norm: f64,
    /// Eigenvalues of `B₁` (the rest of the spectrum).
    pub other_eigenvalues: Vec<C64>,
}

impl SpectralStructure {
    pub fn dim(&self) -> usize {
        self.pi0.rows()
    }

    pub fn lambda0(&self) -> C64 {
        self.triple.lambda0
    }

    pub fn x0(&self) -> &CVector {
        &self.triple.x0
    }

    pub fn y0(&self) -> &CVector {
        &self.triple.y0
    }

    /// `X = [x₀, X₁]`.
    pub fn x_full(&self) -> CMatrix {
        hstack(&self.triple.x0, &self.x1)
    }

    /// `Y = [y₀, Y₁]`.
    pub fn y_full(&self) -> CMatrix {
        hstack(&self.triple.y0, &self.y1)
    }
}

fn hstack(first: &CVector, rest: &CMatrix) -> CMatrix {
    let n = first.len();
    CMatrix::build(n, rest.cols() + 1, |i, j| if j == 0 { first[i] } else { rest[(i, j - 1)] })
}

/// Builds the decomposition for the eigenvalue of `t` within `a`.
pub fn build_structure(a: &CMatrix, t: &EigenTriple) -> Result<SpectralStructure> {
    let n = a.require_square()?;
    if t.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.dim(),
        });
    }
    let mut schur = schur_dense(a)?;
    let p = (0..n)
        .min_by(|&i, &j| {
            (schur.t[(i, i)] - t.lambda0)
                .norm()
                .total_cmp(&(schur.t[(j, j)] - t.lambda0).norm())
        })
        .expect("nonempty");
    if (schur.t[(p, p)] - t.lambda0).norm() > t.gap / 2.0 {
        return Err(Error::ReorderFailure);
    }
    move_to_front(&mut schur, p);
    let lambda0 = schur.t[(0, 0)];
    if (lambda0 - t.lambda0).norm() > t.gap / 2.0 {
        return Err(Error::ReorderFailure);
    }

    let q1 = schur.q.column(0);
    let m = n - 1;
    let q2 = schur.q.block(0, 1, n, m);
    let t22 = schur.t.block(1, 1, m, m);

    // r = (T₂₂ − λ₀I)^{-*} t, solved as the row system r*(T₂₂ − λ₀I) = t*.
    // The transposed system is lower triangular; flip indices to reuse the
    // upper-triangular solver.
    let (r, shifted_inv) = if m == 0 {
        (CVector::zeros(0), CMatrix::zeros(0, 0))
    } else {
        let shifted = t22.shift(lambda0);
        let lower = shifted.adjoint();
        let flip = |k: usize| m - 1 - k;
        let upper = CMatrix::build(m, m, |i, j| lower[(flip(i), flip(j))]);
        let rhs = CMatrix::build(m, 1, |i, _| schur.t[(0, 1 + flip(i))].conj());
        let sol = solve_upper(&upper, &rhs).map_err(|e| match e {
            Error::SingularToTolerance { .. } => Error::NotSimple {
                gap: t.gap,
                threshold: 0.0,
            },
            other => other,
        })?;
        let r = CVector::from_vec((0..m).map(|i| sol[(flip(i), 0)]).collect());
        let inv = solve_upper(&shifted, &CMatrix::identity(m)).map_err(|_| Error::NotSimple {
            gap: t.gap,
            threshold: 0.0,
        })?;
        (r, inv)
    };

    // Unscaled first columns: x ∝ q₁, y ∝ q₁ − Q₂r with y*x = 1 at unit scale.
    let y_unscaled = if m == 0 { q1.clone() } else { &q1 - &q2.mul_vec(&r) };
    // Match the input triple's scaling: x₀ = c q₁ with c = q₁*x₀.
    let c = q1.dot(&t.x0);
    if c.norm() == 0.0 {
        return Err(Error::ReorderFailure);
    }
    let x0 = q1.scale(c);
    let y0 = y_unscaled.scale(C64::new(1.0, 0.0) / c.conj());

    let (x1, y1, s) = if m == 0 {
        (CMatrix::zeros(n, 0), CMatrix::zeros(n, 0), CMatrix::zeros(n, n))
    } else {
        let x1 = &q2 + &q1.outer(&r);
        let y1 = q2.clone();
        let s = &(&x1 * &shifted_inv) * &y1.adjoint();
        (x1, y1, s)
    };

    let pi0 = x0.outer(&y0);
    let pi1 = &CMatrix::identity(n) - &pi0;

    let x_full = hstack(&x0, &x1);
    let y_full = hstack(&y0, &y1);
    let kappa_x = x_full.norm2() * y_full.norm2();
    // ‖(λ₀I − B₁)⁻¹‖ = ‖(B₁ − λ₀I)⁻¹‖
    let resolvent_norm = if m == 0 { 0.0 } else { shifted_inv.norm2() };

    let chi = x0.norm() * y0.norm();
    let r_right = (&a.mul_vec(&x0) - &x0.scale(lambda0)).norm();
    let r_left = (&y0.adjoint_mul(a) - &y0.conj().scale(lambda0)).norm();
    let other_eigenvalues: Vec<C64> = (0..m).map(|i| t22[(i, i)]).collect();
    let gap = other_eigenvalues
        .iter()
        .map(|z| (z - lambda0).norm())
        .fold(f64::INFINITY, f64::min);

    Ok(SpectralStructure {
        triple: EigenTriple {
            lambda0,
            x0,
            y0,
            gap,
            chi,
            residuals: (r_right, r_left),
        },
        x1,
        y1,
        b1: t22,
        s,
        pi0,
        pi1,
        kappa_x,
        resolvent_norm,
        other_eigenvalues,
    })
}

/// `S = X₁(B₁ − λ₀I)⁻¹Y₁*`.
pub fn group_inverse(ss: &SpectralStructure) -> CMatrix {
    ss.s.clone()
}

/// Eigenvector derivative bounds for a given `A'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeBound {
    /// `κ(X)·‖(λ₀I − B₁)⁻¹‖·‖A'‖`.
    pub bound: f64,
    /// `κ(X)·‖A'‖ / min_j |λ₀ − λ_j|`; `None` when `B₁` is not diagonal.
    pub gap_form: Option<f64>,
}

/// Bound on `‖x'‖/‖x₀‖` and `‖(y*)'‖/‖y₀‖`.
pub fn derivative_bound(ss: &SpectralStructure, aprime: &CMatrix) -> Result<DerivativeBound> {
    let n = ss.dim();
    let na = aprime.require_square()?;
    if na != n {
        return Err(Error::DimensionMismatch { expected: n, found: na });
    }
    let anorm = aprime.norm2();
    let bound = ss.kappa_x * ss.resolvent_norm * anorm;
    let m = ss.b1.rows();
    let b1_scale = ss.b1.max_abs().max(f64::MIN_POSITIVE);
    let diagonal = (0..m).all(|i| (0..m).all(|j| i == j || ss.b1[(i, j)].norm() <= 1e-14 * b1_scale));
    let gap_form = if diagonal && m > 0 {
        let gap = ss
            .other_eigenvalues
            .iter()
            .map(|z| (z - ss.lambda0()).norm())
            .fold(f64::INFINITY, f64::min);
        Some(ss.kappa_x * anorm / gap)
    } else {
        None
    };
    Ok(DerivativeBound { bound, gap_form })
}

/// Explicit inverse of `λ₀I − B₁`.
pub fn reduced_resolvent_block(ss: &SpectralStructure) -> Result<CMatrix> {
    let m = ss.b1.rows();
    if m == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let shifted = CMatrix::identity(m).scale(ss.lambda0());
    inverse(&(&shifted - &ss.b1))
}
