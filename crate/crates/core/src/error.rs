use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor argument is outside its admissible range.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// Eigen-index outside `0..M`.
    IndexOutOfRange { k: usize, l: usize, m: usize },
    /// The logarithmic potential was evaluated at `|u| >= 1`.
    Domain { value: f64 },
    /// Bisection for the bound `β` found no sign change of `f`.
    NoSignChange,
    /// A scalar left the representable range (e.g. overflow of `σ(r)/σ(e)`).
    NumericRange { what: &'static str },
    /// A step produced NaN or infinity.
    NonFinite { step: u64, what: &'static str },
    /// Dense oracles refuse grids above a fixed size.
    TooLarge { m: usize, max: usize },
    /// Field length does not match `M²`.
    ShapeMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::IndexOutOfRange { k, l, m } => {
                write!(f, "eigen-index ({k}, {l}) out of range for M = {m}")
            }
            Error::Domain { value } => write!(
                f,
                "logarithmic potential evaluated at u = {value} outside (-1, 1); the bound was violated upstream"
            ),
            Error::NoSignChange => write!(f, "no sign change of f on (0, 1); cannot locate the bound"),
            Error::NumericRange { what } => write!(f, "{what} is not finite"),
            Error::NonFinite { step, what } => write!(f, "step {step}: {what} is not finite"),
            Error::TooLarge { m, max } => {
                write!(f, "dense operators are limited to M <= {max}, got M = {m}")
            }
            Error::ShapeMismatch { expected, found } => {
                write!(f, "expected {expected} grid values, found {found}")
            }
        }
    }
}

impl core::error::Error for Error {}
