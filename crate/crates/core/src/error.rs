use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("too few samples: need at least {required}, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("moment order {nu} out of range 0..={max}")]
    MomentOrderOutOfRange { nu: usize, max: usize },

    #[error("sign polynomial vanishes at center x* = {x_star}")]
    DegenerateCenter { x_star: f64 },

    #[error("grid too coarse: n = {n} but breakpoint neighborhoods require n > {required}")]
    GridTooCoarse { n: usize, required: usize },

    #[error("order n = {n} is not above the threshold {required}")]
    OrderTooSmall { n: usize, required: usize },

    #[error("input is not comonotone: f'(x) * sign polynomial < 0 at x = {at}")]
    NotComonotone { at: f64 },

    #[error("degenerate correction at breakpoint {breakpoint}: derivative floor not met")]
    DegenerateCorrection { breakpoint: f64 },

    #[error("point x = {x} lies outside grid interval {j}")]
    PointOutsideInterval { x: f64, j: i64 },

    #[error("divided difference nodes must be pairwise distinct")]
    DuplicateNodes,

    #[error("node and value counts differ: {nodes} vs {values}")]
    LengthMismatch { nodes: usize, values: usize },

    #[error("{0} must be nonempty")]
    EmptyInput(&'static str),

    #[error("rate fit requires strictly positive errors")]
    NonPositiveError,

    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),

    #[error("run of {run} borderline intervals exceeds the smoothness bound {max}")]
    BorderlineRunTooLong { run: usize, max: usize },

    #[error("kernel power l = {l} too small: need l > r + 2 = {min}")]
    KernelPowerTooSmall { l: usize, min: usize },

    #[error("coefficient extraction did not converge under refinement: {0}")]
    RefinementFailed(String),

    #[error("missing constant estimate: {0}")]
    MissingEstimate(String),

    #[error("unknown constant override key: {0}")]
    UnknownConstant(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Name of the failing pipeline stage, if the error is stage-tagged.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
