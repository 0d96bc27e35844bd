pub mod algebra;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod linalg;
pub mod module;
pub mod par;
pub mod periodicity;
pub mod report;
pub mod tilting;
pub mod twist;

pub use algebra::{Algebra, AlgebraMorphism, QuiverPresentation};
pub use error::{Error, Result};
pub use linalg::{Field, Matrix, Scalar};
pub use module::Module;
