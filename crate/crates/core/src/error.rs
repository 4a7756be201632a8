use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong. Validation variants carry a message naming
/// the offending open, index tuple or element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    UnknownPoint(String),
    UnknownElement(String),
    MismatchedSpaces,
    MismatchedCovers,
    InvalidSpace(String),
    InvalidCover(String),
    InvalidNerve(String),
    DisconnectedIntersection(String),
    InvalidGroup(String),
    InvalidHomomorphism(String),
    InvalidPresheaf(String),
    NotASheaf(String),
    InvalidTorsor(String),
    InvalidCocycle(String),
    NotTrivializing(String),
    InvalidGroupoid(String),
    NotPrestack(String),
    InvalidBand(String),
    InvalidPresentation(String),
    NonCentral(String),
    InvalidExtension(String),
    MissingData(String),
    /// An enumeration would exceed the configured limit.
    Budget {
        what: &'static str,
        needed: u128,
        limit: u64,
    },
    /// A mathematical invariant that should always hold did not.
    Internal(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownPoint(p) => write!(f, "unknown point `{p}`"),
            Error::UnknownElement(e) => write!(f, "unknown element `{e}`"),
            Error::MismatchedSpaces => f.write_str("opens belong to different spaces"),
            Error::MismatchedCovers => f.write_str("data refer to different covers"),
            Error::InvalidSpace(m) => write!(f, "invalid space: {m}"),
            Error::InvalidCover(m) => write!(f, "invalid cover: {m}"),
            Error::InvalidNerve(m) => write!(f, "invalid nerve: {m}"),
            Error::DisconnectedIntersection(m) => {
                write!(
                    f,
                    "disconnected intersection {m} cannot carry a single section"
                )
            }
            Error::InvalidGroup(m) => write!(f, "invalid group: {m}"),
            Error::InvalidHomomorphism(m) => write!(f, "invalid homomorphism: {m}"),
            Error::InvalidPresheaf(m) => write!(f, "invalid presheaf: {m}"),
            Error::NotASheaf(m) => write!(f, "not a sheaf: {m}"),
            Error::InvalidTorsor(m) => write!(f, "invalid torsor: {m}"),
            Error::InvalidCocycle(m) => write!(f, "invalid cocycle: {m}"),
            Error::NotTrivializing(m) => write!(f, "cover does not trivialize the torsor: {m}"),
            Error::InvalidGroupoid(m) => write!(f, "invalid groupoid: {m}"),
            Error::NotPrestack(m) => write!(f, "not a prestack: {m}"),
            Error::InvalidBand(m) => write!(f, "invalid band: {m}"),
            Error::InvalidPresentation(m) => write!(f, "invalid presentation: {m}"),
            Error::NonCentral(m) => write!(f, "expected a central element: {m}"),
            Error::InvalidExtension(m) => write!(f, "invalid groupoid extension: {m}"),
            Error::MissingData(m) => write!(f, "missing data: {m}"),
            Error::Budget {
                what,
                needed,
                limit,
            } => {
                write!(
                    f,
                    "budget exceeded while {what}: needs {needed}, limit {limit}"
                )
            }
            Error::Internal(m) => write!(f, "internal invariant violated: {m}"),
        }
    }
}

impl core::error::Error for Error {}

/// Outcome of a verification that reports the first failure it meets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Holds,
    Fails(String),
}

impl Check {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn diagnostic(&self) -> Option<&str> {
        match self {
            Check::Holds => None,
            Check::Fails(m) => Some(m),
        }
    }
}
