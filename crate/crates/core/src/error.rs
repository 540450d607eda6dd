use core::fmt;

/// Errors raised by the tracking library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Image dimensions unsuitable for the requested operation.
    Dimension { width: usize, height: usize, reason: &'static str },
    /// A sample point lies outside the frame.
    OutOfBounds { x: f64, y: f64, width: usize, height: usize },
    /// A template sample grid leaves the frame. `feature` is set when the
    /// failing grid belongs to an indexed feature of a joint state.
    Boundary { feature: Option<usize> },
    /// Not enough samples or data points.
    InsufficientData(&'static str),
    /// An empty or reversed time interval.
    Interval { t0: f64, t1: f64 },
    /// Invalid or singular calibration.
    Calibration(&'static str),
    /// Least-squares calibration system has a null space of this dimension
    /// (a unique solution needs exactly one).
    RankDeficient { null_dimension: usize },
    /// A mapped point landed on or behind the plane at infinity.
    DegeneratePoint { index: usize },
    /// Two time series cannot be aligned.
    Alignment(&'static str),
    /// Malformed or inconsistent input data.
    Data(&'static str),
    /// Invalid configuration.
    Config(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { width, height, reason } => {
                write!(f, "unsupported frame size {width}x{height}: {reason}")
            }
            Error::OutOfBounds { x, y, width, height } => {
                write!(f, "point ({x}, {y}) outside {width}x{height} frame")
            }
            Error::Boundary { feature: Some(i) } => {
                write!(f, "template grid of feature {i} leaves the frame")
            }
            Error::Boundary { feature: None } => write!(f, "template grid leaves the frame"),
            Error::InsufficientData(what) => write!(f, "insufficient data: {what}"),
            Error::Interval { t0, t1 } => write!(f, "invalid interval [{t0}, {t1}]"),
            Error::Calibration(what) => write!(f, "calibration error: {what}"),
            Error::RankDeficient { null_dimension } => write!(
                f,
                "calibration system is rank deficient: {null_dimension} null directions (need 1)"
            ),
            Error::DegeneratePoint { index } => {
                write!(f, "point {index} maps to the plane at infinity")
            }
            Error::Alignment(what) => write!(f, "cannot align series: {what}"),
            Error::Data(what) => write!(f, "invalid data: {what}"),
            Error::Config(what) => write!(f, "invalid configuration: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
