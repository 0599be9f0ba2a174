use thiserror::Error;

/// Errors surfaced by the engine. Variants map onto the CLI exit-code
/// contract: `Input` is a caller mistake (exit 1), everything else is a
/// numerical or verification failure (exit 2).
#[derive(Debug, Error)]
pub enum LotError {
    /// A point lies outside its chart domain, or an operation left the
    /// chart (e.g. a sphere geodesic landing on the excluded pole).
    #[error("chart domain error: {0}")]
    Domain(String),

    /// The logarithm is not single-valued (antipodal pair on the sphere).
    #[error("logarithm ambiguity: {0}")]
    AmbiguousLog(String),

    /// Two distinct minimizers with equal action were found; the query
    /// sits on a cut locus and map extraction must refuse it.
    #[error("ambiguous minimizer (cut locus): {0}")]
    AmbiguousMinimizer(String),

    /// A tie at a c-transform argmax; the point lies over the exceptional
    /// set where the potential need not be differentiable.
    #[error("c-transform tie at argmax: {0}")]
    AmbiguousArgmax(String),

    /// Iterative solver failed to reach its tolerance. Carries the best
    /// residual achieved.
    #[error("solver did not converge: {context} (best residual {residual:.3e})")]
    Convergence { context: String, residual: f64 },

    /// An ODE step produced a non-finite state.
    #[error("flow integration blew up: {0}")]
    Integration(String),

    /// A certified precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed configuration, measures, or arguments.
    #[error("input error: {0}")]
    Input(String),

    /// Internal numerical guarantee violated (reported, never silent).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LotError>;
