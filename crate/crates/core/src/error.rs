use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// No axes were supplied.
    EmptyGrid,
    /// An axis violates its invariants (empty, duplicated or unordered values).
    InvalidAxis { axis: String, reason: String },
    /// Sampling fraction outside `(0, 1]`.
    InvalidFraction(f64),
    /// A setting does not match the axes it is used with.
    InvalidSetting(String),
    /// A setting already present in a database was inserted again.
    DuplicateSetting(usize),
    /// A learning curve violates its invariants.
    InvalidCurve(String),
    /// Requested training-part size is not strictly between 0 and the record count.
    SplitOutOfRange { n_train: usize, total: usize },
    /// Curve fitting needs at least two points with distinct epochs.
    TooFewPoints(usize),
    /// Every accuracy in the curve is zero; no feasible power law fits it.
    DegenerateCurve,
    /// Feature vectors of different lengths were combined.
    DimensionMismatch { expected: usize, found: usize },
    /// A NaN or infinite value was found in training data.
    NonFinite(&'static str),
    /// A numeric parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// The dual solver did not reach the requested tolerance.
    IterationCap { iterations: usize, gap: f64 },
    /// An operation required a non-empty data set.
    EmptyData(&'static str),
    /// Training/target vectors have different lengths.
    LengthMismatch { features: usize, targets: usize },
    /// A trainer could not produce a learning curve.
    Trainer(String),
    /// Exploration finished without a single successful iteration.
    NoSuccessfulIterations,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyGrid => write!(f, "empty grid"),
            Error::InvalidAxis { axis, reason } => write!(f, "invalid axis `{axis}`: {reason}"),
            Error::InvalidFraction(v) => write!(f, "sampling fraction {v} is not in (0, 1]"),
            Error::InvalidSetting(msg) => write!(f, "invalid setting: {msg}"),
            Error::DuplicateSetting(id) => write!(f, "duplicate setting {id}"),
            Error::InvalidCurve(msg) => write!(f, "invalid learning curve: {msg}"),
            Error::SplitOutOfRange { n_train, total } => {
                write!(f, "n_train {n_train} must satisfy 0 < n_train < {total}")
            }
            Error::TooFewPoints(n) => {
                write!(f, "curve fitting needs at least 2 distinct epochs, got {n}")
            }
            Error::DegenerateCurve => write!(f, "degenerate curve: all accuracies are zero"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::IterationCap { iterations, gap } => write!(
                f,
                "dual solver stopped after {iterations} iterations with violation {gap:e}"
            ),
            Error::EmptyData(what) => write!(f, "empty {what}"),
            Error::LengthMismatch { features, targets } => {
                write!(f, "{features} feature vectors but {targets} targets")
            }
            Error::Trainer(msg) => write!(f, "trainer failed: {msg}"),
            Error::NoSuccessfulIterations => {
                write!(f, "exploration produced no successful iteration")
            }
        }
    }
}

impl core::error::Error for Error {}
