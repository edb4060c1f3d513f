use thiserror::Error;

#[derive(Debug, Error)]
pub enum GacError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate vertex positions at indices {first} and {second}")]
    DuplicatePoints { first: usize, second: usize },

    #[error("non-finite coordinate at vertex {0}")]
    NonFinitePoint(usize),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid edge ({src}, {dst}) for a graph with {vertices} vertices")]
    InvalidEdge { src: usize, dst: usize, vertices: usize },

    #[error("field does not belong to this graph (expected {expected} values, found {found})")]
    FieldMismatch { expected: usize, found: usize },

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error("image is {width}x{height}, at least {min}x{min} pixels are required")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("evolution diverged at iteration {iteration}: non-finite embedding value")]
    Divergence { iteration: usize },

    #[error("invalid seed region: {0}")]
    SeedRegion(String),

    #[error("relative error undefined: exact field has zero energy")]
    ZeroEnergy,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for GacError {
    fn from(e: csv::Error) -> Self {
        GacError::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GacError>;
