use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the operation's domain.
    Domain(&'static str),
    /// Argument outside the domain, with detail.
    InvalidInput(String),
    /// Series or continued fraction exhausted its iteration budget.
    Convergence(&'static str),
    QuadratureDidNotConverge {
        last: f64,
        previous: f64,
    },
    TruncationDominates(String),
    SegmentsOverlap {
        component: usize,
    },
    EmptyProfile,
    NotSquareIntegrable {
        component: usize,
        segment: usize,
    },
    ComponentMismatch {
        profile: usize,
        symbol: usize,
    },
    IndicatorNotResolved(String),
    EnlargeRSearch(String),
    WindowTooShallow(String),
    WindowTooShort(String),
    Capacity(String),
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Convergence(what) => write!(f, "{what} did not converge"),
            Error::QuadratureDidNotConverge { last, previous } => {
                write!(f, "quadrature did not converge (last estimates {previous:e} and {last:e})")
            }
            Error::TruncationDominates(msg) => write!(f, "truncation dominates: {msg}"),
            Error::SegmentsOverlap { component } => {
                write!(f, "segments overlap in component {component}")
            }
            Error::EmptyProfile => write!(f, "empty profile"),
            Error::NotSquareIntegrable { component, segment } => {
                write!(f, "not square integrable (component {component}, segment {segment})")
            }
            Error::ComponentMismatch { profile, symbol } => {
                write!(f, "profile has {profile} components but symbol has {symbol} dampings")
            }
            Error::IndicatorNotResolved(msg) => write!(f, "indicator not resolved: {msg}"),
            Error::EnlargeRSearch(msg) => write!(f, "enlarge r_search: {msg}"),
            Error::WindowTooShallow(msg) => write!(f, "window too shallow: {msg}"),
            Error::WindowTooShort(msg) => write!(f, "window too short: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
            Error::Internal(msg) => write!(f, "internal consistency error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
