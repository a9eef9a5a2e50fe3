use thiserror::Error;

/// Errors produced by grid construction, geometry validation, the variational
/// solvers, and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too coarse: need at least 8 points per axis, got {0}")]
    GridTooCoarse(usize),

    #[error("box half-width must be positive, got {0}")]
    NonPositiveHalfWidth(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("negative lambda: {0}")]
    NegativeLambda(f64),

    #[error("potential a(x) must be nonnegative; found {0}")]
    NegativePotential(f64),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("wells {i} and {j} overlap ({which}): separation {sep}")]
    WellsOverlap {
        i: usize,
        j: usize,
        which: &'static str,
        sep: f64,
    },

    #[error("upsilon: a non-empty subset of well indices is required")]
    EmptyUpsilon,

    #[error("upsilon index {idx} out of range (k = {k} wells)")]
    UpsilonIndexOutOfRange { idx: usize, k: usize },

    #[error("direct-summation oracle limited to 32^3 grids, got {0}^3")]
    OracleGridTooLarge(usize),

    #[error("field has mass outside its admissible region: {0:.3e}")]
    MassOutsideRegion(f64),

    #[error("masks in partition overlap")]
    OverlappingMasks,

    #[error("component {j} collapsed: norm {norm:.3e} below floor {floor:.3e}")]
    ComponentCollapse { j: usize, norm: f64, floor: f64 },

    #[error("no componentwise-positive solution found in [{lo:.3e}, {hi:.3e}]^{l}")]
    NoSignChangeBox { lo: f64, hi: f64, l: usize },

    #[error("no converged after {iterations} iterations (residual {residual:.3e}, tol {tol:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("iteration collapsed to the trivial attractor (|u| below floor); try a stronger initial bump")]
    TrivialAttractor,

    #[error("sign conditions for the path radius R not satisfied up to R = {0}")]
    PathRadiusNotFound(f64),

    #[error("lambda schedule must be strictly increasing with all values >= 1")]
    BadSchedule,

    #[error("need at least {need} diagnostics rows, got {got}")]
    TooFewRows { need: usize, got: usize },

    #[error("insufficient lambda spread for trend tests")]
    InsufficientLambdaSpread,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
