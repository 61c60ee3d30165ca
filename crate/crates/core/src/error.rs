use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("realization mismatch: cannot combine {left} with {right}")]
    RealizationMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("sampled functions live on different grids")]
    GridMismatch,

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("element is not self-adjoint (asymmetry {asymmetry:.3e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("element is not positive (smallest spectral value {min_spectrum:.3e})")]
    NotPositive { min_spectrum: f64 },

    #[error("coefficient does not commute with the algebra ({0})")]
    NotCommuting(&'static str),

    #[error("norm {norm} violates the precondition ‖a‖ < {limit}")]
    PreconditionNormTooLarge { norm: f64, limit: f64 },

    #[error("coefficient norm {norm} exceeds the regime cap {cap}")]
    CoefficientNormTooLarge { norm: f64, cap: f64 },

    #[error("point outside the domain of {context}: {detail}")]
    DomainMismatch { context: String, detail: String },

    #[error("window {window} needs a sequence longer than {len} points and at least 1")]
    WindowTooLarge { window: usize, len: usize },

    #[error("precondition not established: {0}")]
    PreconditionNotEstablished(String),

    #[error("geometric rate {0} is not < 1")]
    RateNotLessThanOne(f64),

    #[error("certificate is not usable: {0}")]
    CertificateInvalid(String),

    #[error("integral operator is not contractive (lambda = {lambda})")]
    NotContractive { lambda: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
