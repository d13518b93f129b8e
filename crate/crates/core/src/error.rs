use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shape requirement not met (empty matrix, `K > N`, length mismatch...).
    Dimension(&'static str),
    /// Exponent `p` outside the range accepted by the operation.
    Exponent { p: f64, min: f64, max: f64 },
    /// NaN or infinite input.
    NonFinite,
    /// Entry required to be nonnegative (or strictly positive) is not.
    Sign(&'static str),
    /// Vector entry expected on the unit circle.
    NotUnitModulus { index: usize, modulus: f64 },
    /// Matrix order above the cap of the requested algorithm.
    TooLarge { n: usize, cap: usize },
    /// Indices `i`, `j` of a transposition are equal or out of range.
    Transposition { i: usize, j: usize, n: usize },
    /// Time must be nonnegative.
    NegativeTime(f64),
    /// A column that must be nonzero is zero.
    ZeroColumn(usize),
    /// Anything else a caller passed in that the operation cannot accept.
    Invalid(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(what) => write!(f, "dimension error: {what}"),
            Error::Exponent { p, min, max } => {
                write!(f, "exponent p = {p} outside [{min}, {max}]")
            }
            Error::NonFinite => f.write_str("non-finite entry"),
            Error::Sign(what) => write!(f, "sign error: {what}"),
            Error::NotUnitModulus { index, modulus } => {
                write!(f, "entry {index} has modulus {modulus}, expected 1")
            }
            Error::TooLarge { n, cap } => write!(f, "order {n} exceeds cap {cap}"),
            Error::Transposition { i, j, n } => {
                write!(f, "invalid transposition ({i}, {j}) on {n} letters")
            }
            Error::NegativeTime(t) => write!(f, "negative time {t}"),
            Error::ZeroColumn(k) => write!(f, "column {k} is zero"),
            Error::Invalid(what) => f.write_str(what),
        }
    }
}

impl core::error::Error for Error {}
