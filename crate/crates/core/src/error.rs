use thiserror::Error;

use crate::softmax::GluingReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // structure validation
    #[error("atom names must be non-empty")]
    EmptyAtomName,
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("context `{0}` is empty")]
    EmptyContext(String),
    #[error("context `{context}` references undeclared atom `{atom}`")]
    UnknownAtomInContext { context: String, atom: String },
    #[error("context `{context}` lists atom `{atom}` more than once")]
    DuplicateAtomInContext { context: String, atom: String },
    #[error("contexts `{first}` and `{second}` contain the same atoms")]
    DuplicateContext { first: String, second: String },
    #[error("duplicate context name `{0}`")]
    DuplicateContextName(String),
    #[error("atom `{0}` does not belong to any context")]
    OrphanAtom(String),
    #[error("cycle logics need n >= 3, got {0}")]
    InvalidN(usize),
    #[error("structure is not a cycle logic: {0}")]
    NotACycleStructure(String),

    // weights
    #[error("no value given for atom `{0}`")]
    MissingAtomValue(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("weight has {got} values but the structure has {expected} atoms")]
    SizeMismatch { expected: usize, got: usize },
    #[error("values mix rational and float modes")]
    MixedModes,
    #[error("path parameter must be non-negative, got {0}")]
    NegativeR(String),
    #[error("cannot parse numeric value `{0}`")]
    BadNumber(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),

    // states
    #[error("more than {limit} two-valued states")]
    EnumerationLimitExceeded { limit: usize },
    #[error("weight is not admissible (max context deviation {max_deviation})")]
    NotAdmissible { max_deviation: String },
    #[error("structure has no two-valued states, its classical hull is empty")]
    NoTwoValuedStates,

    // softmax
    #[error("score {value} for atom `{atom}` lies outside the domain of the {link} link")]
    ScoreOutOfDomain { atom: String, value: String, link: String },
    #[error("invalid link function: {0}")]
    InvalidLink(String),
    #[error("score assignment does not match the structure: {0}")]
    ScoreShape(String),
    #[error("context distributions do not glue")]
    NotGlued(Box<GluingReport>),
    #[error("weight vanishes on atoms {atoms:?}; exact zeros are only reached as limits (see boundary_path)")]
    NotStrictlyPositive { atoms: Vec<String> },
    #[error("scale factor alpha = {0} does not put every coordinate inside the link range")]
    AlphaOutOfRange(String),
    #[error("atom set is not a connected component of the structure")]
    NotAComponent,
    #[error("additive gauge shifts need the exponential link")]
    GaugeNeedsExponential,
    #[error("path parameters must be positive and strictly decreasing")]
    BadPathParameters,
    #[error("target mean {target} is not strictly between {min} and {max}")]
    TargetOutOfRange { target: f64, min: f64, max: f64 },
    #[error("all scores are equal, the mean does not depend on beta")]
    DegenerateScores,
    #[error("bisection bracket exceeded |beta| = 2^40")]
    BracketExhausted,
    #[error("tolerance must be non-negative and finite")]
    BadTolerance,

    // empirical
    #[error("count document: {0}")]
    Schema(String),
    #[error("negative count {count} for atom `{atom}` in context `{context}`")]
    NegativeCount { context: String, atom: String, count: i64 },
    #[error("context `{0}` has no observations")]
    EmptyContextSample(String),
    #[error("context-sum constraints are inconsistent")]
    SingularKkt,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}
