use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precondition on the inputs does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Adaptive routine ran out of budget; carries the last error estimate.
    #[error("{what} did not converge (error estimate {estimate:e})")]
    Convergence { what: String, estimate: f64 },

    #[error("vacuum at ({t}, {x})")]
    Vacuum { t: f64, x: f64 },

    #[error("degenerate overlap: u2*t + 2*eps = 0")]
    DegenerateOverlap,

    #[error("epsilon too large for jump separation")]
    EpsilonTooLarge,

    /// Characteristic geometry outside what a solver handles.
    #[error("geometry: {0}")]
    Geometry(String),

    #[error("linear segment at the critical point: use delta_amplitude")]
    LinearSegment,

    #[error("point tangency: amplitude is zero initially")]
    PointTangency,

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("degenerate flux: G' vanishes at v = {0}")]
    DegenerateFlux(f64),

    #[error("value {0} outside the range of the flux map")]
    OutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
