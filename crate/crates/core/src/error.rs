use thiserror::Error;

/// Errors raised by state construction, optics, detection and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("mode cutoff must be at least 1")]
    ZeroCutoff,

    #[error("occupation has {found} entries but the register has {expected} modes")]
    OccupationLength { expected: usize, found: usize },

    #[error("occupation {count} in mode `{mode}` exceeds cutoff {cutoff}")]
    CutoffOverflow { mode: String, count: u32, cutoff: usize },

    #[error("register mismatch: {left:?} vs {right:?}")]
    RegisterMismatch { left: Vec<String>, right: Vec<String> },

    #[error("cannot normalize the zero ket")]
    ZeroKet,

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("unitary acts on {expected} modes but {found} were given")]
    ArityMismatch { expected: usize, found: usize },

    #[error("{name} = {value} is out of range: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{0} photons exceed the exact factorial expansion limit")]
    TooManyPhotons(u32),

    #[error("oracle size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("invalid click pattern: {0}")]
    InvalidPattern(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Parameter { name, value, reason }
}
