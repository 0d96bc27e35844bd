mod field;
mod matrix;

pub use field::{Field, Scalar};
pub use matrix::{Matrix, Rref};
