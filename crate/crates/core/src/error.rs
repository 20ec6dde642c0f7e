use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for every operation in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point lies outside the region (boundary points count as outside)")]
    PointOutsideRegion,

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("unsupported dimension {0}, expected 1, 2 or 3")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("region is unbounded and no sampling window was supplied")]
    UnboundedWithoutWindow,

    #[error("rejection sampling acceptance ratio fell below 1e-6")]
    RejectionBudgetExceeded,

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("region has infinite inradius")]
    InfiniteInradius,

    #[error("cube budget of {0} exceeded during decomposition")]
    CubeBudgetExceeded(usize),

    #[error("Gram matrix condition number {cond:.3e} exceeds 1e12; lower the basis size or raise precision")]
    IllConditionedGram { cond: f64 },

    #[error("1D eigenvalue table too short for the requested cutoff")]
    TableExhausted,

    #[error("support margin too narrow: need at least {need} grid cells, found {found}")]
    SupportTooNarrow { need: usize, found: usize },

    #[error(
        "spectral and finite-difference derivatives disagree: {spectral:.6e} vs {finite_difference:.6e}"
    )]
    DifferentiationDisagreement { spectral: f64, finite_difference: f64 },

    #[error("test function support touches the region boundary")]
    SupportTouchesBoundary,

    #[error("quadratic form vanishes; the ratio is undefined for f = 0")]
    ZeroForm,

    #[error("grid too coarse for cutoff index {n}: need spacing <= {max_h:.3e}, found {h:.3e}")]
    GridTooCoarse { n: u32, max_h: f64, h: f64 },

    #[error("gamma = {gamma} must exceed N/2m = {min}")]
    GammaTooSmall { gamma: f64, min: f64 },

    #[error("kernel bound constant required for m = {m}, N = {dim}; only m = 1 has a default")]
    MissingKernelConstant { m: u32, dim: usize },

    #[error("every quadrature direction reported an unbounded ray; pseudodistance is infinite")]
    AllDirectionsUnbounded,
}
