use thiserror::Error;

/// Everything that can go wrong between parsing a chart and emitting a
/// report.  Variants carry human-readable context; geometric failures carry
/// an exact witness (which equation, which component, which value) so a
/// failed check can be reproduced by hand.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The expression source does not match the grammar.
    #[error("syntax error at byte {offset}: {message}")]
    ExprParse { offset: usize, message: String },

    /// An identifier in an expression is not a coordinate of the chart.
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },

    /// A quotient whose denominator has zero value part at the sample point.
    #[error("division by zero value part in `{expr}`")]
    DivisionByZero { expr: String },

    /// An operation needs more Taylor coefficients than the jet carries.
    #[error("jet order {order} is insufficient: {context}")]
    InsufficientJetOrder { order: u8, context: String },

    /// A linear solve or inversion met a value-part matrix without full rank.
    #[error("singular value part: {context}")]
    SingularValuePart { context: String },

    /// An overdetermined linear system failed its exact consistency check.
    #[error("inconsistent linear system: {witness}")]
    InconsistentSystem { witness: String },

    /// The chart violates the Reeb compatibility equations that characterize
    /// quaternionic contact structures.
    #[error("not a quaternionic contact structure: {witness}")]
    NotQuaternionicContact { witness: String },

    /// A matrix that must be invertible for the construction (a restricted
    /// 2-form, the candidate metric) is degenerate at the sample point.
    #[error("degenerate structure: {context}")]
    DegenerateStructure { context: String },

    /// No sign assignment for the three almost complex structures satisfies
    /// the quaternion relations together with a common compatible metric.
    #[error("no quaternion-compatible structure: {context}")]
    NotQuaternionCompatible { context: String },

    /// The three independent computations of the normalized scalar curvature
    /// disagree, so the input is not a single coherent structure.
    #[error("cross-k inconsistency: {context}")]
    CrossKInconsistency { context: String },

    /// The requested operation is only defined for `n > 1` (dimension > 7).
    #[error("unsupported in dimension seven: {context}")]
    DimensionSevenUnsupported { context: String },

    /// A built-in chart failed its own construction-time validation.
    #[error("construction invalid: {context}")]
    ConstructionInvalid { context: String },

    /// A chart file or programmatic chart violates the chart schema.
    #[error("invalid chart: {context}")]
    InvalidChart { context: String },

    /// Jets are limited to 16 variables of total degree at most 15 by the
    /// packed multi-index representation.
    #[error("capacity exceeded: {context}")]
    CapacityExceeded { context: String },

    /// The fast prime-field pass disagreed with the exact rational pass.
    #[error("prescreen mismatch: {context}")]
    PrescreenMismatch { context: String },

    /// Reading or writing a chart or report file failed.
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    /// A chart or report file is not valid JSON of the expected shape.
    #[error("json error: {message}")]
    Json { message: String },
}

impl Error {
    pub fn io(path: &std::path::Path, err: &std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
