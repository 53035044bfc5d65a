//! GraphBLAS-flavoured containers and primitives.
//!
//! Containers are plain owned values: [`SparseMatrix`] (CSR), [`DenseVector`]
//! and the structural [`IndexMask`]. The operations in [`ops`] follow the
//! GraphBLAS output convention: the output is passed by `&mut` and is the only
//! container written.

mod mask;
mod matrix;
pub mod ops;
mod semiring;
mod vector;
pub mod work;

pub use mask::IndexMask;
pub use matrix::SparseMatrix;
pub use ops::{apply_masked, dot, mxv, set_all, waxpby, waxpby_assign};
pub use semiring::{Descriptor, PlusTimes, Semiring};
pub use vector::DenseVector;
