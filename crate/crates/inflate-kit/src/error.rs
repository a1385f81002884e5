use thiserror::Error;

/// Crate-wide error type. Variants carry enough of a witness to reproduce the
/// failure by hand.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate element identifier `{0}`")]
    DuplicateElement(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("cover relation has a directed cycle: {}", .0.join(" < "))]
    CycleDetected(Vec<String>),

    #[error("{what} has size {size}, exceeding the bound {bound}")]
    TooLarge {
        what: &'static str,
        size: usize,
        bound: usize,
    },

    #[error("missing stalk for element `{0}`")]
    MissingStalk(String),

    #[error("duplicate stalk member `{member}` at element `{element}`")]
    DuplicateStalkMember { element: String, member: String },

    #[error("map on cover ({from}, {to}) is not total: {detail}")]
    PartialMap {
        from: String,
        to: String,
        detail: String,
    },

    #[error("map given for ({from}, {to}), which is not a cover of the base poset")]
    UnexpectedMap { from: String, to: String },

    #[error(
        "diagram is not functorial from `{low}` to `{high}`: composites {left} and {right} \
         disagree at stalk member `{at}`"
    )]
    NotFunctorial {
        low: String,
        high: String,
        left: String,
        right: String,
        at: String,
    },

    #[error("sections over the empty open set are undefined")]
    EmptyOpenSet,

    #[error("set is not open: `{0}` is missing a successor")]
    NotOpen(String),

    #[error("restriction target is not a subset of the section domain")]
    NotSubset,

    #[error("diagram base does not match the expected poset: {0}")]
    BaseMismatch(String),

    #[error("stalk partition is invalid: {0}")]
    BadPartition(String),

    #[error("split point `{element}` has a proper face `{witness}` with a non-singleton stalk")]
    MinimalityViolated { element: String, witness: String },

    #[error("no inflation count for vertex `{0}`")]
    MissingCount(String),

    #[error("inflation count for vertex `{0}` must be at least 1")]
    NonPositiveCount(String),

    #[error("the forbidden face must be nonempty")]
    EmptySimplex,

    #[error("vertex map does not send {{{0}}} to a face of the target")]
    NotSimplicialMap(String),

    #[error("map collapses the face {{{0}}}")]
    DegenerateMap(String),

    #[error("target face {{{0}}} has no preimage")]
    NotSurjective(String),

    #[error("hypothesis `{hypothesis}` fails: {witness}")]
    HypothesisViolated { hypothesis: String, witness: String },

    #[error("wedge certificate failed in degree {degree}: {detail}")]
    CertificateFailed { degree: i64, detail: String },

    #[error("poset is not connected")]
    NotConnected,

    #[error("poset is not a geometric simplicial poset: {0}")]
    NotSimplicial(String),

    #[error("torsion coefficient does not fit in 64 bits")]
    TorsionOverflow,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
