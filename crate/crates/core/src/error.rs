use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("position {x_m} m is outside the wire [0, {length_m}] m")]
    OutOfDomain { x_m: f64, length_m: f64 },

    #[error("measurement dwell {dwell_s} s is shorter than the MPPT settle time {t_p_s} s")]
    SettleViolation { dwell_s: f64, t_p_s: f64 },

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: unknown key `{key}`")]
    UnknownKey {
        path: String,
        line: usize,
        key: String,
    },

    #[error("reports belong to different scenario families ({expected} vs {found})")]
    FamilyMismatch { expected: String, found: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{message}")]
    Usage { message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Coarse error classes, stable across releases. The CLI prints the class
/// name and maps it to an exit code; the C ABI maps it to a status code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    ScenarioInvalid,
    Runtime,
}

impl ErrorClass {
    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Usage => "usage",
            ErrorClass::ScenarioInvalid => "scenario_invalid",
            ErrorClass::Runtime => "runtime",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 2,
            ErrorClass::ScenarioInvalid => 3,
            ErrorClass::Runtime => 4,
        }
    }
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Invalid { .. } | Error::Parse { .. } | Error::UnknownKey { .. } => {
                ErrorClass::ScenarioInvalid
            }
            Error::Usage { .. } | Error::FamilyMismatch { .. } => ErrorClass::Usage,
            Error::OutOfDomain { .. }
            | Error::SettleViolation { .. }
            | Error::Precondition(_)
            | Error::Io { .. }
            | Error::Csv { .. }
            | Error::Json { .. } => ErrorClass::Runtime,
        }
    }
}
