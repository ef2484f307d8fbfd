//! Eigenvector normalizations and transport of the derivatives through the
//! scalings `x̂(τ) = α(τ)x(τ)`, `ŷ(τ)* = β(τ)*y(τ)*`:
//!
//! ```text
//! x̂'(τ₀)    = α(τ₀)x'(τ₀) + α'(τ₀)x₀
//! (ŷ*)'(τ₀) = β*(τ₀)(y*)'(τ₀) + (β*)'(τ₀)y₀*
//! ```
//!
//! Schemes:
//! - `N0`: projector-based vectors `x(τ) = (y₀*Π(τ)x₀)^{-1/2}Π(τ)x₀` (α = β = 1).
//! - `N1`: `e_jᵀx̂ = 1`, `ŷ*e_k = 1`.
//! - `N2`: `e_jᵀx̂ = 1`, `ŷ*x̂ = 1`.
//! - `N3`: `x̂ᵀx̂ = 1`, `ŷ*x̂ = 1`, determined up to a common sign.
//! - `N4Rp`: `‖x̂‖ = ‖ŷ‖ = 1` with `ŷ*x̂` real positive; not unique, no derivative.
//!
//! Indices are 0-based.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};
use crate::spectral::SpectralStructure;

/// Guard band around the nonpositive real axis for principal square roots.
pub const BRANCH_GUARD: f64 = 1e-8;
/// Relative size below which a pinned entry counts as zero.
pub const PINNED_ENTRY_TOL: f64 = 1e-8;
/// Relative size of `|x₀ᵀx₀|` below which `x₀` counts as isotropic.
pub const ISOTROPY_TOL: f64 = 1e-8;
/// Relative size below which the real part of the reference entry is ignored.
pub const SIGN_FALLBACK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    N0,
    N1,
    N2,
    N3,
    N4Rp,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeKind::N0 => "n0",
            SchemeKind::N1 => "n1",
            SchemeKind::N2 => "n2",
            SchemeKind::N3 => "n3",
            SchemeKind::N4Rp => "n4",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationScheme {
    pub kind: SchemeKind,
    /// Pinned entry of `x̂` (N1, N2, and the sign test of N3). Defaults to the
    /// largest-modulus entry of `x₀`.
    pub index_j: Option<usize>,
    /// Pinned entry of `ŷ` (N1). Defaults to the largest-modulus entry of `y₀`.
    pub index_k: Option<usize>,
    /// N3 only: +1 or −1. Defaults to the sign making `Re(e_jᵀx̂(τ₀)) > 0`.
    pub sign_choice: Option<i8>,
}

impl NormalizationScheme {
    pub fn new(kind: SchemeKind) -> Self {
        Self {
            kind,
            index_j: None,
            index_k: None,
            sign_choice: None,
        }
    }

    pub fn pinned(kind: SchemeKind, j: usize, k: usize) -> Self {
        Self {
            kind,
            index_j: Some(j),
            index_k: Some(k),
            sign_choice: None,
        }
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.sign_choice = Some(sign);
        self
    }
}

#[derive(Clone, Debug)]
pub struct NormalizedPair {
    pub kind: SchemeKind,
    pub x_hat: CVector,
    pub y_hat: CVector,
    pub x_hat_prime: Option<CVector>,
    /// Entries of the row vector `(ŷ*)'(τ₀)`.
    pub y_hat_star_prime: Option<CVector>,
    pub alpha0: C64,
    pub alpha_prime0: Option<C64>,
    pub beta_star0: C64,
    pub beta_star_prime0: Option<C64>,
    pub well_defined: bool,
    pub unique: bool,
    /// Resolved pinned indices and sign.
    pub index_j: usize,
    pub index_k: usize,
    pub sign: f64,
}

impl NormalizedPair {
    /// `ŷ*` as row entries.
    pub fn y_hat_star(&self) -> CVector {
        self.y_hat.conj()
    }
}

/// Principal square root, refusing arguments within [`BRANCH_GUARD`] of `(−∞, 0]`.
pub fn guarded_sqrt(z: C64) -> Result<C64> {
    let dist = if z.re > 0.0 { z.norm() } else { z.im.abs() };
    if dist < BRANCH_GUARD {
        return Err(Error::BranchCutViolation { re: z.re, im: z.im });
    }
    Ok(z.sqrt())
}

/// Normalization-0 vectors from computed `x̃`, `ỹ` with `ỹ*x̃ = 1`, without
/// forming the projector:
/// `x̃̃ = (ỹ*x₀ / y₀*x̃)^{1/2} x̃`, `ỹ̃ = (x̃*y₀ / x₀*ỹ)^{1/2} ỹ`.
///
/// The literal ratios change sign under `(x̃, ỹ) → (ωx̃, ỹ/ω̄)` when the
/// principal branch flips, so each root's sign is taken from the invariant
/// factor `p^{-1/2}(ỹ*x₀)` with `p = (y₀*x̃)(ỹ*x₀) = y₀*Π̃x₀`. The branch-cut
/// guard applies to `p`, which equals 1 at `τ₀`.
pub fn normalize0_computed(x_t: &CVector, y_t: &CVector, x0: &CVector, y0: &CVector) -> Result<NormalizedPair> {
    let n = x0.len();
    for v in [x_t, y_t, y0] {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
    }
    let yx0 = y_t.dot(x0);
    let y0x = y0.dot(x_t);
    let inv_root = C64::new(1.0, 0.0) / guarded_sqrt(y0x * yx0)?;
    let align = |literal: C64, invariant: C64| {
        if (literal - invariant).norm() <= (literal + invariant).norm() {
            literal
        } else {
            -literal
        }
    };
    let sx = align((yx0 / y0x).sqrt(), inv_root * yx0);
    let sy = align((x_t.dot(y0) / x0.dot(y_t)).sqrt(), (inv_root * y0x).conj());
    let x_hat = x_t.scale(sx);
    let y_hat = y_t.scale(sy);
    Ok(NormalizedPair {
        kind: SchemeKind::N0,
        x_hat,
        y_hat,
        x_hat_prime: None,
        y_hat_star_prime: None,
        alpha0: C64::new(1.0, 0.0),
        alpha_prime0: None,
        beta_star0: C64::new(1.0, 0.0),
        beta_star_prime0: None,
        well_defined: true,
        unique: true,
        index_j: x0.argmax_abs(),
        index_k: y0.argmax_abs(),
        sign: 1.0,
    })
}

/// `(argmax|x₀|, argmax|y₀|)`, lowest index on ties.
pub fn default_indices(x0: &CVector, y0: &CVector) -> (usize, usize) {
    (x0.argmax_abs(), y0.argmax_abs())
}

fn sign_of(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Sign `s` making `e_jᵀ(s·x̂(τ))` agree in real part (or, if the reference
/// real part is negligible, imaginary part) with `e_jᵀx̂(τ₀)`.
pub fn sign_consistency(x_hat_tau: &CVector, x_hat_ref: &CVector, j: usize) -> Result<f64> {
    let r = x_hat_ref[j];
    let cand = x_hat_tau[j];
    let mag = r.norm();
    if r.re.abs() >= SIGN_FALLBACK_TOL * mag && mag > 0.0 {
        Ok(sign_of(cand.re) * sign_of(r.re))
    } else if r.im.abs() >= SIGN_FALLBACK_TOL * mag && mag > 0.0 {
        Ok(sign_of(cand.im) * sign_of(r.im))
    } else {
        Err(Error::AmbiguousSign)
    }
}

fn check_index(index: usize, n: usize) -> Result<()> {
    if index >= n {
        return Err(Error::InvalidArgument(format!("index {index} out of range for dimension {n}")));
    }
    Ok(())
}

fn pinned_entry(v: &CVector, index: usize) -> Result<C64> {
    let e = v[index];
    if e.norm() < PINNED_ENTRY_TOL * v.norm() {
        return Err(Error::PinnedEntryZero {
            index,
            magnitude: e.norm(),
        });
    }
    Ok(e)
}

fn isotropy_check(x0: &CVector) -> Result<C64> {
    let q = x0.dot_t(x0);
    let rel = q.norm() / x0.norm().powi(2);
    if rel < ISOTROPY_TOL {
        return Err(Error::IsotropicVector { magnitude: rel });
    }
    Ok(q)
}

/// Applies `scheme` at `τ₀` and transports `x'`, `(y*)'` (as produced from
/// the same structure) to the normalized vectors.
pub fn apply_normalization(
    scheme: &NormalizationScheme,
    ss: &SpectralStructure,
    x_prime: &CVector,
    ystar_prime: &CVector,
) -> Result<NormalizedPair> {
    let x0 = ss.x0();
    let y0 = ss.y0();
    let n = x0.len();
    if x_prime.len() != n || ystar_prime.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x_prime.len().min(ystar_prime.len()),
        });
    }
    let (dj, dk) = default_indices(x0, y0);
    let j = scheme.index_j.unwrap_or(dj);
    let k = scheme.index_k.unwrap_or(dk);
    check_index(j, n)?;
    check_index(k, n)?;
    if let Some(s) = scheme.sign_choice {
        if s != 1 && s != -1 {
            return Err(Error::InvalidArgument(format!("sign choice must be ±1, got {s}")));
        }
    }
    let one = C64::new(1.0, 0.0);
    // (y*)' e_k, and y₀*e_k
    let ystar0 = y0.conj();

    let (alpha0, alpha_p, beta0, beta_p, sign, unique) = match scheme.kind {
        SchemeKind::N0 => (one, C64::new(0.0, 0.0), one, C64::new(0.0, 0.0), 1.0, true),
        SchemeKind::N1 => {
            let xj = pinned_entry(x0, j)?;
            let yk = pinned_entry(&ystar0, k)?;
            (
                one / xj,
                -x_prime[j] / (xj * xj),
                one / yk,
                -ystar_prime[k] / (yk * yk),
                1.0,
                true,
            )
        }
        SchemeKind::N2 => {
            let xj = pinned_entry(x0, j)?;
            (one / xj, -x_prime[j] / (xj * xj), xj, x_prime[j], 1.0, true)
        }
        SchemeKind::N3 => {
            let q = isotropy_check(x0)?;
            let root = q.sqrt();
            let xtx_prime = x_prime.dot_t(x0);
            let plus_entry = x0[j] / root;
            let sign = match scheme.sign_choice {
                Some(s) => s as f64,
                None => {
                    let mag = plus_entry.norm();
                    if plus_entry.re.abs() >= SIGN_FALLBACK_TOL * mag {
                        sign_of(plus_entry.re)
                    } else {
                        sign_of(plus_entry.im)
                    }
                }
            };
            (
                one * sign / root,
                -xtx_prime * sign / (q * root),
                root * sign,
                xtx_prime * sign / root,
                sign,
                false,
            )
        }
        SchemeKind::N4Rp => {
            let xn = x0.norm();
            let yn = y0.norm();
            let x_hat = x0.scale(C64::new(1.0 / xn, 0.0));
            let y_hat = y0.scale(C64::new(1.0 / yn, 0.0));
            return Ok(NormalizedPair {
                kind: SchemeKind::N4Rp,
                x_hat,
                y_hat,
                x_hat_prime: None,
                y_hat_star_prime: None,
                alpha0: C64::new(1.0 / xn, 0.0),
                alpha_prime0: None,
                beta_star0: C64::new(1.0 / yn, 0.0),
                beta_star_prime0: None,
                well_defined: true,
                unique: false,
                index_j: j,
                index_k: k,
                sign: 1.0,
            });
        }
    };

    let x_hat = x0.scale(alpha0);
    // ŷ* = β* y₀*  ⇒  ŷ = conj(β*) y₀
    let y_hat = y0.scale(beta0.conj());
    let x_hat_prime = &x_prime.scale(alpha0) + &x0.scale(alpha_p);
    let y_hat_star_prime = &ystar_prime.scale(beta0) + &ystar0.scale(beta_p);
    Ok(NormalizedPair {
        kind: scheme.kind,
        x_hat,
        y_hat,
        x_hat_prime: Some(x_hat_prime),
        y_hat_star_prime: Some(y_hat_star_prime),
        alpha0,
        alpha_prime0: Some(alpha_p),
        beta_star0: beta0,
        beta_star_prime0: Some(beta_p),
        well_defined: true,
        unique,
        index_j: j,
        index_k: k,
        sign,
    })
}

/// Renormalizes computed eigenvectors `x̃`, `ỹ` of `A(τ)` according to the
/// scheme resolved in `reference` (the pair at `τ₀`). Returns `x̂(τ)` and the
/// row entries of `ŷ(τ)*`. For N3 the sign is fixed by [`sign_consistency`].
pub fn renormalize_computed(
    reference: &NormalizedPair,
    x_t: &CVector,
    y_t: &CVector,
    x0: &CVector,
    y0: &CVector,
) -> Result<(CVector, CVector)> {
    let one = C64::new(1.0, 0.0);
    let yx = y_t.dot(x_t);
    let ystar_t = y_t.conj();
    match reference.kind {
        SchemeKind::N0 => {
            let p = normalize0_computed(x_t, y_t, x0, y0)?;
            let ys = p.y_hat_star();
            Ok((p.x_hat, ys))
        }
        SchemeKind::N1 => {
            let xj = pinned_entry(x_t, reference.index_j)?;
            let yk = pinned_entry(&ystar_t, reference.index_k)?;
            Ok((x_t.scale(one / xj), ystar_t.scale(one / yk)))
        }
        SchemeKind::N2 => {
            let xj = pinned_entry(x_t, reference.index_j)?;
            Ok((x_t.scale(one / xj), ystar_t.scale(xj / yx)))
        }
        SchemeKind::N3 => {
            let q = isotropy_check(x_t)?;
            let root = q.sqrt();
            let x_hat = x_t.scale(one / root);
            let s = sign_consistency(&x_hat, &reference.x_hat, reference.index_j)?;
            Ok((x_hat.scale(C64::new(s, 0.0)), ystar_t.scale(root * s / yx)))
        }
        SchemeKind::N4Rp => Err(Error::NotVerifiable(SchemeKind::N4Rp.to_string())),
    }
}
