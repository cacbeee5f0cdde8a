use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("Kraus operators are not trace preserving (residual {residual:e})")]
    NotTracePreserving { residual: f64 },

    #[error("Kraus list must hold between 1 and {max} operators, got {got}")]
    KrausCount { got: usize, max: usize },

    #[error("unitary parameters must have unit norm, got {norm}")]
    NotUnitNorm { norm: f64 },

    #[error("Bloch vector norm {norm} exceeds 1")]
    OutsideBall { norm: f64 },

    #[error("affine map is not a valid qubit channel: {0}")]
    InvalidAffine(String),

    #[error("channel is not CPTP (min Choi eigenvalue {min_choi_eigenvalue:e})")]
    NotCptp { min_choi_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("random channel generation failed after {0} attempts")]
    SingularSample(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
