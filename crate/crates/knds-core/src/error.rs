use thiserror::Error;

/// Unified error type for the forward and inverse pipelines.
///
/// Reconstruction wraps stage failures in [`Error::Stage`] so callers can
/// report which step of the pipeline rejected the input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The spacetime has no distinct event/cosmological horizon pair.
    #[error("regime violation: {0}")]
    Regime(String),

    #[error("r0 = {r0} is not a horizon radius: |delta_r| = {residual:.3e} exceeds {tolerance:.3e}")]
    NotAHorizon {
        r0: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// k = 0 has no closed-form gamma_k; the invariant trace is gamma_0.
    #[error("k = 0 is the invariant mode; use the gamma_0 forms")]
    ZeroMode,

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("discretization error: {0}")]
    Discretization(String),

    #[error("eigenvalue {index} of mode k = {k} changed by {change:.3e} (relative) under grid doubling, tolerance {tolerance:.3e}")]
    Convergence {
        k: i32,
        index: usize,
        change: f64,
        tolerance: f64,
    },

    /// The Weyl fit lambda_j ~ A j^2 + B j produced A <= 0.
    #[error("trace tail model rejected: {0}")]
    TailModel(String),

    #[error("degenerate traces: {0}")]
    DegenerateTraces(String),

    #[error("trace combination gives a nonpositive cosmological constant ({0})")]
    NonPositiveLambda(f64),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("inconsistent traces: {context} give {primary} vs {alternate} (relative difference {rel_diff:.3e})")]
    InconsistentTraces {
        context: &'static str,
        primary: f64,
        alternate: f64,
        rel_diff: f64,
    },

    #[error("negative squared radius for the {horizon} horizon: {value}")]
    NegativeRadiusSquared { horizon: &'static str, value: f64 },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// A reconstruction stage failure, labeled with the stage that raised it.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Stage label when this is a reconstruction stage error.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    /// The underlying failure with any stage wrapping removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
