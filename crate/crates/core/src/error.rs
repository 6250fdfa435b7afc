use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument is outside its documented domain.
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A read event was requested with both coupling magnitudes zero.
    InvalidRead,
    /// A write event was requested with both coupling magnitudes zero.
    InvalidWrite,
    /// Beam ramps overlap or are not time-ordered.
    InvalidSchedule(&'static str),
    /// The integration step violates the explicit-scheme stability bound.
    Unstable { dt: f64, max_rate: f64, bound: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                reason,
            } => write!(f, "invalid parameter `{name}` = {value}: {reason}"),
            Error::InvalidRead => f.write_str("invalid read: both coupling magnitudes are zero"),
            Error::InvalidWrite => f.write_str("invalid write: both coupling magnitudes are zero"),
            Error::InvalidSchedule(why) => write!(f, "invalid schedule: {why}"),
            Error::Unstable { dt, max_rate, bound } => write!(
                f,
                "time step {dt:e} s too large: dt * max rate ({max_rate:e} rad/s) = {:.3} must stay below {bound}",
                dt * max_rate
            ),
        }
    }
}

impl core::error::Error for Error {}
