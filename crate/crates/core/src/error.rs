//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("polygon {polygon}: {detail}")]
    Polygon { polygon: usize, detail: String },
    #[error("{}pairing segment lengths differ: {a_len} vs {b_len}", line_prefix(*.line))]
    LengthMismatch { line: Option<usize>, a_len: String, b_len: String },
    #[error("fullness violated: total pairing length {total} but half the boundary length is {expected}")]
    Fullness { total: String, expected: String },
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("scheme is not plain: {0}")]
    NotPlain(String),
    #[error("quotient is not a dendrite: {0}")]
    Structural(String),
    #[error("unknown builtin example `{0}`")]
    UnknownBuiltin(String),
    #[error("no certified-planar scar edge at this truncation")]
    NoPlanarEdge,
    #[error("radius {0} is not a planar radius")]
    NonPlanarRadius(String),
    #[error("frontier meets an unresolved tail: {0}")]
    TailContact(String),
    #[error("profile is approximate on {0}; caller did not opt in")]
    Approximate(String),
    #[error("no admissible epsilon at level {level}: blocked by {blocking}")]
    NoEpsilon { level: usize, blocking: String },
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("{0}")]
    Domain(String),
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

pub type Result<T> = std::result::Result<T, Error>;
