use thiserror::Error;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("map is not an isometry on the support (residual {residual:e})")]
    NotIsometry { residual: f64 },

    #[error("vectors are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("dense oracle could not factor the projected vector (residual {residual:e})")]
    FactorizationFailure { residual: f64 },

    #[error("total dimension {dim} exceeds the dense limit {limit}")]
    DimTooLarge { dim: usize, limit: usize },

    #[error("chain of {factors} antilinear factors has an antilinear result")]
    OddParity { factors: usize },

    #[error("cannot combine a linear and an antilinear map")]
    MixedParity,

    #[error("vector is not cyclic and separating (reduced ranks {rank_a}/{dim_a} and {rank_b}/{dim_b})")]
    NotSeparating {
        rank_a: usize,
        dim_a: usize,
        rank_b: usize,
        dim_b: usize,
    },

    #[error("matrix is singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;
