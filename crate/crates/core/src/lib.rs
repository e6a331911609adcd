//! Reversible data hiding for 8-bit grayscale images.
//!
//! Pixels are split into two checkerboard sets. Each set is visited from
//! smoothest to roughest by a fluctuation measure computed from the other set,
//! predicted from its four cross neighbours with adaptive weights, and
//! carries bits by shifting a double-peak prediction-error histogram.

pub mod cli;
pub mod codec;
pub mod error;
pub mod histogram;
pub mod image;
pub mod io;
pub mod locmap;
pub mod metadata;
pub mod metrics;
pub mod predictor;
pub mod texture;

pub use codec::{capacity, embed, extract, feasible_payload_len, Embedding, OrderMode};
pub use error::{RdhError, Result};
pub use image::{Coord, Dims, GrayImage, Parity, Region};
pub use metadata::StegoMetadata;
