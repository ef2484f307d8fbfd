//! First-order perturbation theory for a simple eigenvalue of an analytic
//! matrix family `A(τ)`: derivatives of the eigenvalue, of its right and left
//! eigenvectors under several normalizations, and of its eigenprojector,
//! together with finite-difference and contour-integral verification.

pub mod derivatives;
pub mod eigentriple;
pub mod error;
pub mod family;
pub mod linalg;
pub mod normalize;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
