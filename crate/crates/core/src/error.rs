use thiserror::Error;

/// Line/column diagnostic produced by the text parsers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no such vertex: {0}")]
    UnknownVertex(String),
    #[error("duplicate vertex: {0}")]
    DuplicateVertex(String),
    #[error("invalid edge {0}-{1}")]
    InvalidEdge(String, String),
    #[error("graph has {0} vertices; at most 64 are supported")]
    TooManyVertices(usize),
    #[error("graph too large for exact {what}: {size} vertices exceeds cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("trivial vertex group")]
    TrivialGroup,
    #[error("element {value} is not valid for group {group}")]
    InvalidElement { value: i64, group: String },
    #[error("invalid group table: {0}")]
    BadTable(String),
    #[error("generators {gens:?} do not generate the group at vertex {vertex}")]
    NotGenerating { vertex: String, gens: Vec<i64> },
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("ball exceeds the cap of {0} vertices")]
    BallTooLarge(usize),
    #[error("enumeration bound must be at least 1 when an infinite vertex group is present")]
    ZeroBound,
    #[error("vertex {0} is not in the ball")]
    NotInBall(String),
    #[error("gated hull does not fit in the ball; increase radius")]
    HullEscapesBall,
    #[error("no induced square in the graph")]
    NoInducedSquare,
    #[error("({0}) is not an induced square")]
    NotAnInducedSquare(String),
    #[error("coloring is not proper: {0}")]
    ImproperColoring(String),
    #[error("{what} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("invalid wall system: {0}")]
    InvalidWalls(String),
    #[error("graph is not quasi-median: {0}")]
    NotQuasiMedian(String),
    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(String),
    #[error("internal invariant failure: {0}")]
    Invariant(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
