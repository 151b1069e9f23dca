use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate pair: the two points coincide")]
    DegeneratePair,

    #[error("no unique intersection: lines are parallel or degenerate")]
    NoUniqueIntersection,

    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoint(usize, usize),

    #[error("not in general position: collinear triples {0:?}")]
    NotInGeneralPosition(Vec<(usize, usize, usize)>),

    #[error("direction tie: pairs span parallel lines {0:?}")]
    DirectionTie(Vec<((usize, usize), (usize, usize))>),

    #[error("k = {k} out of range for n = {n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("invalid halfperiod: {0}")]
    InvalidHalfperiod(String),

    #[error("invalid edge vector: {0}")]
    InvalidEdgeVector(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
