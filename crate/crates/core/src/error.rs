use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("image dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },

    #[error("pixel buffer holds {actual} samples, expected {expected}")]
    PixelCount { expected: usize, actual: usize },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("coordinate ({x}, {y}) lies outside a {width}x{height} image")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("median of an even or empty sequence (length {0})")]
    MedianLength(usize),

    #[error("not a binary PGM stream: bad magic number")]
    PgmMagic,

    #[error("malformed PGM header: {0}")]
    PgmHeader(String),

    #[error("unsupported PGM maxval {0}, only 255 is accepted")]
    PgmMaxval(u64),

    #[error("PGM dimensions must be positive, got {width}x{height}")]
    PgmDimensions { width: u64, height: u64 },

    #[error("truncated PGM payload: expected {expected} bytes, found {actual}")]
    PgmTruncated { expected: usize, actual: usize },
}
