//! Grayscale image container and the checkerboard partition.
//!
//! Pixels are split into two interleaved sets by coordinate parity: set A
//! holds every `(row, col)` with an even `row + col`, set B the odd ones.
//! Only interior pixels (all four cross-neighbors present) take part in
//! embedding; border rows and columns are never written.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{RdhError, Result};

/// Smallest accepted side length. Below this no pixel has a diagonal
/// same-set neighbor with its own cross-neighbors.
pub const MIN_SIDE: usize = 5;

/// An 8-bit grayscale image stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(RdhError::Format(format!(
                "image is {width}x{height}, both sides must be at least {MIN_SIDE}"
            )));
        }
        if pixels.len() != width * height {
            return Err(RdhError::Format(format!(
                "expected {} pixels for a {width}x{height} image, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(row, col));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> Dims {
        Dims {
            width: self.width,
            height: self.height,
        }
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, c: Coord) -> u8 {
        self.pixels[c.row * self.width + c.col]
    }

    #[inline]
    pub(crate) fn at(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, c: Coord, value: u8) {
        self.pixels[c.row * self.width + c.col] = value;
    }

    /// Copies out a rectangular sub-image.
    pub fn crop(&self, region: Region) -> Result<GrayImage> {
        if region.row + region.height > self.height || region.col + region.width > self.width {
            return Err(RdhError::Format(format!(
                "region {region:?} does not fit in a {}x{} image",
                self.width, self.height
            )));
        }
        GrayImage::from_fn(region.width, region.height, |r, c| {
            self.at(region.row + r, region.col + c)
        })
    }

    /// Interior means the four cross-neighbors all exist.
    pub fn is_interior(&self, c: Coord) -> bool {
        has_cross_neighbors(c, self.dims())
    }

    pub(crate) fn check_interior(&self, c: Coord) -> Result<()> {
        if self.is_interior(c) {
            Ok(())
        } else {
            Err(RdhError::Bounds {
                row: c.row,
                col: c.col,
                width: self.width,
                height: self.height,
            })
        }
    }

    /// Up, down, left and right neighbor values of an interior pixel.
    #[inline]
    pub(crate) fn cross(&self, c: Coord) -> [u8; 4] {
        let i = c.row * self.width + c.col;
        [
            self.pixels[i - self.width],
            self.pixels[i + self.width],
            self.pixels[i - 1],
            self.pixels[i + 1],
        ]
    }
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

/// A pixel position: `row` counts down from the top, `col` right from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// A rectangular window inside an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub row: usize,
    pub col: usize,
    pub width: usize,
    pub height: usize,
}

/// One of the two checkerboard sub-images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    A,
    B,
}

impl Parity {
    pub fn other(self) -> Parity {
        match self {
            Parity::A => Parity::B,
            Parity::B => Parity::A,
        }
    }

    #[inline]
    pub(crate) fn of_unchecked(c: Coord) -> Parity {
        if (c.row + c.col).is_multiple_of(2) {
            Parity::A
        } else {
            Parity::B
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::A => f.write_str("A"),
            Parity::B => f.write_str("B"),
        }
    }
}

/// Set membership of an in-bounds coordinate.
pub fn parity_of(c: Coord, dims: Dims) -> Result<Parity> {
    if c.row >= dims.height || c.col >= dims.width {
        return Err(RdhError::Bounds {
            row: c.row,
            col: c.col,
            width: dims.width,
            height: dims.height,
        });
    }
    Ok(Parity::of_unchecked(c))
}

pub fn has_cross_neighbors(c: Coord, dims: Dims) -> bool {
    c.row >= 1 && c.col >= 1 && c.row + 2 <= dims.height && c.col + 2 <= dims.width
}

/// Interior coordinates of one set, row-major.
pub fn processable_coords(dims: Dims, set: Parity) -> Vec<Coord> {
    let mut out = Vec::with_capacity((dims.height.saturating_sub(2) * dims.width.saturating_sub(2)).div_ceil(2));
    for row in 1..dims.height.saturating_sub(1) {
        for col in 1..dims.width.saturating_sub(1) {
            let c = Coord::new(row, col);
            if Parity::of_unchecked(c) == set {
                out.push(c);
            }
        }
    }
    out
}
