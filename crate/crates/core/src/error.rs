use thiserror::Error;

/// Errors raised by the metric, synthesis and statistics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An image or region is too small for the requested operation.
    #[error("image is {width}x{height}, but at least {min_width}x{min_height} is required")]
    TooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },
    /// Two operands were expected to share a shape.
    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },
    /// A sample buffer does not match its declared dimensions.
    #[error("buffer holds {len} samples, expected {width}x{height}")]
    BufferLength { width: usize, height: usize, len: usize },
    /// A sample lies outside [0, 1] or is not finite.
    #[error("sample {value} at index {index} is outside [0, 1]")]
    SampleRange { index: usize, value: f64 },
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: &'static str },
    /// A statistical routine received too few samples.
    #[error("need at least {required} samples, got {got}")]
    SampleSize { required: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn mismatch(l: (usize, usize), r: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            left_width: l.0,
            left_height: l.1,
            right_width: r.0,
            right_height: r.1,
        }
    }

    pub fn param(name: &'static str, reason: &'static str) -> Self {
        Error::Parameter { name, reason }
    }
}
