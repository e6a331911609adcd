use thiserror::Error;

/// Errors produced by the embedding and extraction pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RdhError {
    /// A coordinate outside the image, or one lacking its four cross-neighbors.
    #[error("coordinate ({row}, {col}) is out of bounds for a {width}x{height} image or lacks cross-neighbors")]
    Bounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },

    /// The payload does not fit, or a histogram has no usable peak/zero layout.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Stego image and metadata disagree: extraction ran out of pixels.
    #[error("corrupt stego image: {0}")]
    CorruptStego(String),

    /// Malformed image, metadata or mismatched dimensions.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, RdhError>;
