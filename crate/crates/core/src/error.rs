use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("empty Newton pair list")]
    EmptyPairs,
    #[error("Newton pair ({0},{1}) has a zero entry")]
    NonPositive(u64, u64),
    #[error("Newton pair ({0},{1}) is not coprime")]
    NotCoprime(u64, u64),
    #[error("first Newton pair ({0},{1}) must satisfy p < q")]
    FirstPairOrder(u64, u64),
    #[error("invalid characteristic exponents: {0}")]
    BadCharacteristic(String),
    #[error("invalid multiplicity sequence: {0}")]
    BadMultiplicitySequence(String),
    #[error("multiplicity sequence {0} is not the sequence of a unibranch germ")]
    NotUnibranch(String),
    #[error("integer overflow while converting {0}")]
    Overflow(String),
    #[error("sequence would exceed {0} entries")]
    TooLong(usize),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("degree must be positive")]
    ZeroDegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("precision exhausted (needed a term at or beyond order {0})")]
    PrecisionExhausted(u32),
    #[error("division by a series of higher order or with unknown leading term")]
    NotDivisible,
    #[error("edge polynomial has no complete set of rational roots")]
    IrrationalCoefficient,
    #[error("polynomial does not vanish at the chosen point")]
    NotOnCurve,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("parametrization image is degenerate at this parameter (all coordinates vanish)")]
    DegenerateImage,
    #[error("parametrization is not homogeneous of a single degree")]
    NotHomogeneous,
    #[error("branch is not a primitive parametrization of an irreducible germ")]
    NotPrimitive,
    #[error("Newton-Puiseux recursion did not terminate (is the polynomial squarefree?)")]
    NoTermination,
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown curve `{0}`")]
    UnknownOwner(String),
    #[error("name `{0}` is already in use")]
    DuplicateName(String),
    #[error("`{0}` is not a divisor")]
    NotADivisor(String),
    #[error("`{0}` has self-intersection {1}, only (-1)-divisors can be contracted")]
    NotExceptional(String, i64),
    #[error("inconsistent tangency data at `{point}`: {a}~{b} and {b}~{c} but not {a}~{c}")]
    NonTransitive { point: String, a: String, b: String, c: String },
    #[error("negative residual intersection between `{0}` and `{1}` at `{2}`")]
    NegativeResidual(String, String, String),
    #[error("contracting `{e}` would merge two germs of `{owner}` (node creation)")]
    NodeCreation { e: String, owner: String },
    #[error("contracting `{e}` would give divisor `{owner}` a singular point")]
    SingularDivisor { e: String, owner: String },
    #[error("contracting `{e}` gives multiplicity {new} before existing multiplicity {first}")]
    BadMultiplicity { e: String, new: u64, first: u64 },
    #[error("`{0}` and `{1}` do not meet")]
    NoMeeting(String, String),
    #[error("`{0}` and `{1}` meet at {2} points")]
    AmbiguousMeeting(String, String, usize),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot finalize: {0}")]
    Finalize(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("parameters out of range for family {family}: {msg}")]
    OutOfRange { family: String, msg: String },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate identifier `{name}`")]
    Duplicate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: `{name}` is used before it is defined")]
    Undefined { line: usize, col: usize, name: String },
    #[error("{line}:{col}: malformed multiplicity sequence: {msg}")]
    Multseq { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {source}")]
    Surface { line: usize, col: usize, source: SurfaceError },
}
