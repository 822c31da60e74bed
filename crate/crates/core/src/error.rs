use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Domain errors. The variant name is what the command line reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incidence matrix {level} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        level: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("incidence matrix {level} has an all-zero {kind} {index}")]
    ZeroRowOrColumn {
        level: usize,
        kind: &'static str,
        index: usize,
    },
    #[error("level 0 must consist of exactly one vertex")]
    EmptyRootLevel,
    #[error("tail rule is incompatible with the explicit prefix: {0}")]
    BadTail(String),
    #[error("level {requested} is beyond the available depth {available}")]
    DepthExceeded { requested: usize, available: usize },
    #[error("invalid telescoping cuts: {0}")]
    InvalidCuts(String),
    #[error("index {index} out of range (level {level}, vertex {vertex}, {count} paths)")]
    IndexOutOfRange {
        level: usize,
        vertex: usize,
        index: usize,
        count: u64,
    },
    #[error("vertex {vertex} does not exist at level {level}")]
    NoSuchVertex { level: usize, vertex: usize },
    #[error("path count overflow at level {0}")]
    CountOverflow(usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("bundle {source_vertex}->{target} between levels {level} and {} has a single edge", .level + 1)]
    NoPairableEdges {
        level: usize,
        source_vertex: usize,
        target: usize,
    },
    #[error("edge bundles too small: need more than {required}, found {found}")]
    BundlesTooSmall { required: String, found: u64 },
    #[error("consistency fails at level {level}, vertex {vertex}: {lhs} != {rhs}")]
    ConsistencyViolation {
        level: usize,
        vertex: usize,
        lhs: String,
        rhs: String,
    },
    #[error("weights at level {level} sum to {total}, not 1")]
    NotNormalized { level: usize, total: String },
    #[error("negative weight at level {level}, vertex {vertex}")]
    NegativeWeight { level: usize, vertex: usize },
    #[error("stationary matrix is not primitive")]
    NotPrimitive,
    #[error("diagram has no built-in measure: {0}")]
    NoBuiltinMeasure(String),
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("numeric verdict within tolerance of zero (pivot {pivot} at step {step})")]
    ToleranceAmbiguous { step: usize, pivot: String },
    #[error("target fractions unreachable; best achievable {best:?}")]
    UnreachableTarget { best: Vec<String> },
    #[error("element level {element} is above harness level {level}")]
    ElementTooDeep { element: usize, level: usize },
    #[error("argument out of range: {0}")]
    ArgumentOutOfRange(String),
    #[error("operation requires the B_R diagram")]
    WrongDiagram,
    #[error("measures and diagram disagree: {0}")]
    MeasureMismatch(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    /// Short stable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::ZeroRowOrColumn { .. } => "ZeroRowOrColumn",
            Error::EmptyRootLevel => "EmptyRootLevel",
            Error::BadTail(_) => "BadTail",
            Error::DepthExceeded { .. } => "DepthExceeded",
            Error::InvalidCuts(_) => "InvalidCuts",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NoSuchVertex { .. } => "NoSuchVertex",
            Error::CountOverflow(_) => "CountOverflow",
            Error::NotAPermutation(_) => "NotAPermutation",
            Error::NoPairableEdges { .. } => "NoPairableEdges",
            Error::BundlesTooSmall { .. } => "BundlesTooSmall",
            Error::ConsistencyViolation { .. } => "ConsistencyViolation",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::NotPrimitive => "NotPrimitive",
            Error::NoBuiltinMeasure(_) => "NoBuiltinMeasure",
            Error::NotSymmetric(..) => "NotSymmetric",
            Error::ToleranceAmbiguous { .. } => "ToleranceAmbiguous",
            Error::UnreachableTarget { .. } => "UnreachableTarget",
            Error::ElementTooDeep { .. } => "ElementTooDeep",
            Error::ArgumentOutOfRange(_) => "ArgumentOutOfRange",
            Error::WrongDiagram => "WrongDiagram",
            Error::MeasureMismatch(_) => "MeasureMismatch",
            Error::Parse { .. } => "Parse",
        }
    }
}
