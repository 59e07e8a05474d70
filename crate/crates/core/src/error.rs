use thiserror::Error;

/// Every failure the engine can report. `exit_code` groups them the way the CLI does.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("discriminant vanishes identically")]
    DegenerateDiscriminant,
    #[error("discriminant has a multiple root near {0}")]
    MultipleRoot(String),
    #[error("expected {expected} discriminant points inside |s| < {radius}, found {found}")]
    RootCountMismatch { expected: usize, found: usize, radius: f64 },
    #[error("root finder failed: {0}")]
    NoConvergence(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("path {path}: {reason}")]
    Tracking { path: usize, reason: String },
    #[error("no Kodaira row for orders (f={f}, g={g}, disc={disc})")]
    UnknownKodaira { f: String, g: String, disc: String },
    #[error("lattice: {0}")]
    Lattice(String),
    #[error("classification: {0}")]
    Classification(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("monodromy: {0}")]
    Monodromy(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Config(_) | Error::DegenerateDiscriminant | Error::Io(_) => 2,
            Error::UnknownKodaira { .. } | Error::Lattice(_) | Error::Classification(_) | Error::Budget(_) => 4,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::DegenerateDiscriminant => "degenerate-discriminant",
            Error::MultipleRoot(_) => "multiple-root",
            Error::RootCountMismatch { .. } => "root-count-mismatch",
            Error::NoConvergence(_) => "no-convergence",
            Error::Degenerate(_) => "degenerate",
            Error::Tracking { .. } => "tracking",
            Error::UnknownKodaira { .. } => "unknown-kodaira",
            Error::Lattice(_) => "lattice",
            Error::Classification(_) => "classification",
            Error::Budget(_) => "budget",
            Error::Monodromy(_) => "monodromy",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
