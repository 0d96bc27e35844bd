use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("input error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("quiver presentation is not finite dimensional: paths of length {0} survive")]
    NotFiniteDimensional(usize),
    #[error("malformed relation: {0}")]
    MalformedRelation(String),
    #[error("algebra is not split basic: {0}")]
    NotSplitBasic(String),
    #[error("no symmetrising form: {0}")]
    NotSymmetric(String),
    #[error("complex has non-projective terms: {0}")]
    NotProjectiveTerms(String),
    #[error("algebras do not match: {0}")]
    AlgebraMismatch(String),
    #[error("invalid vertex subset: {0}")]
    BadSubset(String),
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("search budget of {0} exhausted")]
    BudgetExceeded(u64),
    #[error("twisted periodicity not certified: {0}")]
    NotCertified(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
