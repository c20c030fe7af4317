use thiserror::Error;

/// Errors reported by histogram, optimization, and image operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An input collection (channel, histogram, image) was empty.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A parameter was outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two inputs that must share a bin count (or pixel count) did not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A histogram had zero (or non-finite) total mass where positive mass
    /// is required.
    #[error("degenerate histogram: {0}")]
    DegenerateHistogram(&'static str),

    /// A pair matrix of the wrong kind was supplied (count vs. location).
    #[error("pair matrix kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },

    /// Image decode, encode, or I/O failure.
    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    /// Filesystem failure while reading or writing an image.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
