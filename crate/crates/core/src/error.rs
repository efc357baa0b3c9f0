use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into two families. Input and certification errors
/// (`OutOfCertifiedBall`, `InvalidInput`, `InsufficientRadius`, ...) mean the
/// request cannot be answered at the configured scale. The `*Violated` and
/// `SeamMismatch` variants are bug detectors: they guard statements that are
/// theorems, so on valid inputs they must never fire.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {word} lies outside the certified ball of radius {radius}")]
    OutOfCertifiedBall { word: String, radius: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown generator symbol in {0:?}")]
    UnknownSymbol(String),

    #[error("search budget of {budget} exceeded in {what}")]
    BudgetExceeded { what: &'static str, budget: u64 },

    #[error("no valid local window: k = {k} must exceed 8*delta = {bound}")]
    NoValidWindow { k: u32, bound: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ray depth {requested} exceeds DSG support (radius {radius})")]
    DepthExceedsSupport { requested: u32, radius: u32 },

    #[error("DSG support too small: {0}")]
    InsufficientSupport(String),

    #[error("boundary representative too shallow: need depth {needed}, have {have}")]
    InsufficientDepth { needed: u32, have: u32 },

    #[error("no divergence constant certifies within radius {radius}: {detail}")]
    InsufficientRadius { radius: u32, detail: String },

    #[error("no Lebesgue level found up to depth {0}")]
    NotFoundWithinDepth(u32),

    #[error("perturbation too large: {0}")]
    PerturbationTooLarge(String),

    #[error("pseudo-orbit support exhausted at {0}")]
    SupportExhausted(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("proposition violated (implementation bug): {0}")]
    PropositionViolated(String),

    #[error("seam mismatch (implementation bug): {0}")]
    SeamMismatch(String),

    #[error("claim violated (implementation bug): {0}")]
    ClaimViolated(String),

    #[error("no geodesic ray within K of the path (implementation bug): {0}")]
    NoRayWithinK(String),

    #[error("consistency violated (implementation bug): {0}")]
    ConsistencyViolated(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for the bug-detector variants that guard proven statements.
    pub fn is_theorem_failure(&self) -> bool {
        matches!(
            self,
            Error::PropositionViolated(_)
                | Error::SeamMismatch(_)
                | Error::ClaimViolated(_)
                | Error::NoRayWithinK(_)
                | Error::ConsistencyViolated(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
