use std::fmt;

/// Exit-code bearing failure: 1 usage or configuration, 2 verification, 3 irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    Usage(String),
    Verification(String),
    Irreducible(String),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Verification(_) => 2,
            Failure::Irreducible(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(s) => write!(f, "error: {}", s),
            Failure::Verification(s) => write!(f, "verification failed: {}", s),
            Failure::Irreducible(s) => write!(f, "irreducible: {}", s),
        }
    }
}

impl std::error::Error for Failure {}
