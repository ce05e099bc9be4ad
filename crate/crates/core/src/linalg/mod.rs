//! Dense matrices, three-way arrays, and the few factorizations the
//! clustering code needs.

mod basis;
mod matrix;
mod tensor;

pub use basis::truncated_basis;
pub use matrix::{kronecker, Matrix};
pub use tensor::{Mode, Tensor3};
