use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("invalid parameters for {what}: {reason}")]
    InvalidParams { what: String, reason: String },

    #[error("Lorentz index {0} out of range 0..4")]
    IndexOutOfRange(usize),

    #[error("projector is singular: |P.P| = {p_sq:e} is below tolerance")]
    SingularProjector { p_sq: f64 },

    #[error("potential is singular at the origin (r = 0)")]
    SingularOrigin,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("total momentum mismatch: {0}")]
    MomentumMismatch(String),

    #[error("grid operators require the c.m. frame, got spatial total momentum {0:?}")]
    NotCenterOfMass([f64; 3]),

    #[error("state is not a solution: residual {residual:e} exceeds {tolerance:e}")]
    NotASolution { residual: f64, tolerance: f64 },

    #[error("propagator is singular at q^2 = 0 with regulator {eps:e}")]
    SingularPropagator { eps: f64 },

    #[error("momentum {0:?} is not resolved by the periodic grid")]
    UnresolvedMomentum([f64; 3]),
}

impl Error {
    pub(crate) fn params(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParams {
            what: what.into(),
            reason: reason.into(),
        }
    }
}
