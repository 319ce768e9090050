use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{p} is not prime (witness {witness})")]
    Composite { p: u64, witness: u64 },
    #[error("prime {0} is below 5")]
    PrimeTooSmall(u64),
    #[error("lambda {lambda} is singular for p = {p} (must avoid 0 and -1)")]
    SingularParameter { p: u64, lambda: u64 },
    #[error("field element {x} out of range for p = {p}")]
    ElementOutOfRange { p: u64, x: u64 },
    #[error("-{0} is not an imaginary quadratic discriminant")]
    NotDiscriminant(u64),
    #[error("D = {d} exceeds Hurwitz table range {d_max}")]
    TableRange { d: u64, d_max: u64 },
    #[error("invalid interval [{lo}, {hi}]: {reason}")]
    Interval { lo: f64, hi: f64, reason: &'static str },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
