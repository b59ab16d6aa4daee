use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Matrix or Fourier dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Jet rings with different filtration depths were combined.
    #[error("filtration depth mismatch: {0}")]
    DepthMismatch(String),

    /// An operation's precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A floor deeper than what the inputs determine was requested.
    #[error("requested floor {requested} is below the attainable floor {attainable}")]
    Precision {
        requested: String,
        attainable: String,
    },

    /// The principal symbol is not invertible (or its inverse is not
    /// representable as a trigonometric polynomial).
    #[error("ellipticity failure: {0}")]
    Ellipticity(String),

    /// Spectral data too close to a contour or to zero for stable quadrature.
    #[error("conditioning failure: {0}")]
    Conditioning(String),

    /// Sampled data violates the structural constraints of a convolution bundle.
    #[error("structure violation: {0}")]
    Structure(String),

    /// A linear map on Mat(k) failed the multiplicativity check.
    #[error("not an algebra automorphism: {0}")]
    NotAnAutomorphism(String),

    /// The exact-action oracle only supports polynomial-in-ξ symbols.
    #[error("unsupported oracle input: {0}")]
    UnsupportedOracle(String),

    /// Malformed JSON input; the pointer locates the offending node.
    #[error("parse error at `{pointer}`: {message}")]
    Parse { pointer: String, message: String },
}

impl CoreError {
    pub fn parse(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CoreError::Parse {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
