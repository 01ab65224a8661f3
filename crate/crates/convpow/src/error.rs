//! Error type shared by all modules.

use std::fmt;

/// Ways an operation can reject its input or fail to meet a target.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A measure constructor received an empty coefficient sequence.
    EmptyMeasure,
    /// A coefficient or parameter was NaN or infinite.
    NonFinite(&'static str),
    /// An operation that needs a probability measure got something else.
    NotProbability(String),
    /// The zero measure was passed where support is required.
    ZeroMeasure,
    /// A parameter left its admissible range.
    InvalidParameter(String),
    /// A representative measure had a node at or beyond t = 1.
    AtomAtOne,
    /// A representative measure with zero total weight.
    ZeroWeight,
    /// Family tag of a representative measure does not match the operation.
    FamilyMismatch { expected: &'static str, got: &'static str },
    /// A builder cannot reach the requested tail target at the given window.
    TailTargetUnreachable { requested: f64, achievable: f64, required_n: u64 },
    /// An exponent pattern whose series does not converge.
    NotNormalizable(String),
    /// A gauge function vanished at an interior grid point.
    PsiVanishes(f64),
    /// |mu^(theta)| >= 1 at an interior theta, so ratio scans are undefined.
    NotAperiodicOnGrid(f64),
    /// A log-log fit was asked for on nonpositive data.
    NonPositiveSeries { index: usize, value: f64 },
    /// Degenerate denominator in an inequality profile.
    DegenerateMeasure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyMeasure => write!(f, "empty measure"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::NotProbability(why) => write!(f, "not a probability measure: {why}"),
            Error::ZeroMeasure => write!(f, "zero measure"),
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Error::AtomAtOne => write!(f, "atom at 1"),
            Error::ZeroWeight => write!(f, "representative measure has zero total weight"),
            Error::FamilyMismatch { expected, got } => {
                write!(f, "family mismatch: expected {expected}, got {got}")
            }
            Error::TailTargetUnreachable { requested, achievable, required_n } => write!(
                f,
                "tail target {requested:.3e} unreachable (achievable {achievable:.3e}); \
                 increase n_max to about {required_n}"
            ),
            Error::NotNormalizable(why) => write!(f, "not normalizable: {why}"),
            Error::PsiVanishes(theta) => write!(f, "psi vanishes off 0 at theta = {theta:.6e}"),
            Error::NotAperiodicOnGrid(theta) => {
                write!(f, "not strictly aperiodic on grid: |mu^| >= 1 at theta = {theta:.6e}")
            }
            Error::NonPositiveSeries { index, value } => {
                write!(f, "nonpositive entry {value:.3e} at index {index} in positive series")
            }
            Error::DegenerateMeasure(why) => write!(f, "degenerate measure: {why}"),
        }
    }
}

impl std::error::Error for Error {}
