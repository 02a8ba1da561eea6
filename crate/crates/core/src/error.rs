use std::fmt;

use thiserror::Error;

/// Named constraint of the string or F-matrix encodings.
///
/// Validation always reports the first failing constraint in the fixed
/// order `S1 -> S4` (strings) or `F1 -> F3c` (matrices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// `t_1 = 0` and `1 <= t_i <= i - 1`.
    S1,
    /// Leaf counts sum to the tip count.
    S2,
    /// A node with no internal children has at least two leaves.
    S3,
    /// A node with exactly one internal child has at least one leaf.
    S4,
    /// Diagonal strictly increasing from at least 2 up to `N`, subdiagonal one below it.
    F1,
    /// First column steps down by at most one.
    F2,
    /// Rows are non-decreasing.
    F3a,
    /// Column steps are 0 or 1.
    F3b,
    /// 2x2 grid condition.
    F3c,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Constraint::S1 => "S1",
            Constraint::S2 => "S2",
            Constraint::S3 => "S3",
            Constraint::S4 => "S4",
            Constraint::F1 => "F1",
            Constraint::F2 => "F2",
            Constraint::F3a => "F3a",
            Constraint::F3b => "F3b",
            Constraint::F3c => "F3c",
        };
        f.write_str(s)
    }
}

/// Errors produced by this crate.
#[derive(Error, Debug)]
pub enum Error {
    /// The `t` and `l` vectors have different lengths.
    #[error("t and l have different lengths ({t} vs {l})")]
    LengthMismatch { t: usize, l: usize },
    /// An encoding with zero internal nodes.
    #[error("representation is empty")]
    Empty,
    /// A matrix row has the wrong number of columns.
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    /// A nonzero entry above the diagonal (1-based position).
    #[error("matrix has a nonzero entry above the diagonal at ({row}, {col})")]
    NotLowerTriangular { row: usize, col: usize },
    /// Well-formed input that breaks one of the encoding constraints.
    #[error("constraint {0} violated")]
    Violation(Constraint),
    /// Edge index outside `1..=K-1`.
    #[error("edge index {e} out of range for a tree with {k} internal nodes")]
    EdgeOutOfRange { e: usize, k: usize },
    /// Nodes `e` and `e + 1` are not joined by an edge.
    #[error("edge ({e}, {next}) is not present in the tree", next = e + 1)]
    EdgeNotPresent { e: usize },
    /// Malformed text input.
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    /// Two shapes with different tip counts were combined.
    #[error("tip counts differ ({0} vs {1})")]
    TipCountMismatch(usize, usize),
    /// Exhaustive routine called above its size cap.
    #[error("N = {n} exceeds the exhaustive cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    /// Argument outside the domain of an operation.
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// The violated constraint, if this is a constraint violation.
    pub fn violation(&self) -> Option<Constraint> {
        match self {
            Error::Violation(c) => Some(*c),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
