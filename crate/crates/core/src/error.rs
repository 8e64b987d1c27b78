use thiserror::Error;

/// Errors produced by the boundary-geometry toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation contract (dimension mismatch,
    /// unsupported derivative order, wrong architecture for a checker, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A model file could not be parsed or failed shape validation.
    /// `path` locates the offending field, e.g. `layers[1].W`.
    #[error("model parse error at {path}: {message}")]
    Parse { path: String, message: String },

    /// The gradient vanishes (or nearly so) at a queried boundary point, so
    /// every curvature denominator vanishes with it.
    #[error("singular point: |grad f| = {grad_norm:.3e} below threshold {threshold:.3e}")]
    SingularPoint { grad_norm: f64, threshold: f64 },

    /// The dependent-axis derivative is too small for the chosen chart.
    #[error("chart degenerate: |f_dep| = {dep_component:.3e} on axis {axis}")]
    ChartDegenerate { axis: usize, dep_component: f64 },

    /// Boundary dimension outside the supported range for the requested
    /// operation (e.g. Euler form on an odd-dimensional boundary).
    #[error("unsupported boundary dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: String },

    /// Grid would exceed the configured cell cap.
    #[error("grid of {cells} cells exceeds the cap of {cap}")]
    GridTooLarge { cells: u64, cap: u64 },

    /// A flat-network construction could not place a boundary in the box.
    #[error("construction failed: {0}")]
    Construction(String),

    /// Turning-number integration requires a closed loop.
    #[error("operation requires a closed curve, got an open chain")]
    OpenCurve,

    /// Numerical failure inside an otherwise valid computation
    /// (metric not positive definite, divergent training loss, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Failure inside a named pipeline stage.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
