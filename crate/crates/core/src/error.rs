use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coordinate or parameter fell outside the admissible range.
    Domain { what: &'static str, value: f64, lo: f64, hi: f64 },
    /// Second derivatives of sampled data are not available at the poles.
    UnsupportedPoint { s: f64 },
    /// Curvature-type formulas are singular where the warping function vanishes.
    PoleProximity { s: f64, f: f64 },
    /// A region with vanishing warping function separates the two points.
    Disconnected { s: f64 },
    /// The superlevel set `{f >= 1/k}` is empty.
    EmptyWindow { k: u32, max_f: f64 },
    /// The superlevel set `{f >= 1/k}` has several components.
    DisconnectedWindow { k: u32, components: usize },
    /// Two grid functions do not share an interval and resolution.
    Shape { left: usize, right: usize },
    /// A generator could not build the requested profile.
    Construction { reason: String },
    /// Profile data failed one or more validity checks.
    Invalid { violations: Vec<String> },
    /// Precondition of an operation not met.
    Precondition { reason: String },
}

impl Error {
    pub(crate) fn precondition(reason: impl Into<String>) -> Self {
        Error::Precondition { reason: reason.into() }
    }

    pub(crate) fn construction(reason: impl Into<String>) -> Self {
        Error::Construction { reason: reason.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value, lo, hi } => {
                write!(f, "{what} = {value} outside [{lo}, {hi}]")
            }
            Error::UnsupportedPoint { s } => {
                write!(f, "second derivative of sampled data unsupported at s = {s}")
            }
            Error::PoleProximity { s, f: fv } => {
                write!(f, "s = {s} lies inside the pole guard (f = {fv:e})")
            }
            Error::Disconnected { s } => {
                write!(f, "warping function vanishes at s = {s}, region is disconnected")
            }
            Error::EmptyWindow { k, max_f } => {
                write!(f, "window for k = {k} is empty (1/k >= max f = {max_f})")
            }
            Error::DisconnectedWindow { k, components } => write!(
                f,
                "superlevel set {{f >= 1/{k}}} has {components} components; k too small for a connected window"
            ),
            Error::Shape { left, right } => {
                write!(f, "grid mismatch: {left} samples vs {right} samples")
            }
            Error::Construction { reason } => write!(f, "construction failed: {reason}"),
            Error::Invalid { violations } => {
                write!(f, "invalid profile: {}", violations.join("; "))
            }
            Error::Precondition { reason } => write!(f, "precondition violated: {reason}"),
        }
    }
}

impl core::error::Error for Error {}
