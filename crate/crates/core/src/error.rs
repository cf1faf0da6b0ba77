use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),

    #[error("argument within pole guard radius (|z| = {dist:.3e}, guard = {guard:.3e})")]
    Pole { dist: f64, guard: f64 },

    #[error("root finding did not converge: {0}")]
    NonConvergence(String),

    #[error("branch values must be pairwise distinct")]
    CoincidentBranchValues,

    #[error("invalid type vector {0:?}: {1}")]
    InvalidTypeVector([i64; 4], String),

    #[error("type vector {0:?} does not lie in the class-0 parity family")]
    NotClassZero([i64; 4]),

    #[error("unsupported depth d = {0}: closed-form counts stop at d = 2, use the recursion evaluator with base data")]
    UnsupportedDepth(i64),

    #[error("missing base entries for the recursion: {0}")]
    MissingBaseEntries(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("the ramification curve is not elliptic: some type coordinate vanishes")]
    OmegaNotElliptic,

    #[error("degenerate cross-ratio: lambda in {{0, 1}}")]
    DegenerateCrossRatio,

    #[error("branch does not pass through the given point")]
    BranchNotThroughPoint,

    #[error("point does not lie on the curve")]
    PointNotOnCurve,
}

pub type Result<T> = std::result::Result<T, Error>;
