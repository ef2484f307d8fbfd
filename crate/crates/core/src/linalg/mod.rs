//! Dense complex linear algebra for small matrices.

mod lu;
mod matrix;
mod schur;
mod svd;

pub use lu::{inverse, solve_dense, solve_dense_with};
pub(crate) use lu::solve_upper;
pub use matrix::{CMatrix, CVector, C64};
pub(crate) use matrix::ZERO;
pub use schur::{eig_dense, move_to_front, schur_dense, swap_adjacent, EigenDecomposition, Schur};
pub use svd::singular_values;
