//! Adaptive four-neighbor prediction.
//!
//! Each neighbor is weighted inversely to `1 + |mean - neighbor|`, where
//! `mean` is the floored average of the four neighbors. Weights and the
//! weighted sum stay in integer arithmetic over a common denominator; the only
//! rounding is the final floor, so embedder and extractor agree bit-exactly on
//! every platform.

use crate::error::Result;
use crate::image::{Coord, GrayImage};

/// Normalized weights for the up, down, left and right neighbors, held as
/// numerators over one shared denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborWeights {
    numerators: [u64; 4],
    denominator: u64,
}

impl NeighborWeights {
    const EQUAL: NeighborWeights = NeighborWeights {
        numerators: [1; 4],
        denominator: 4,
    };

    /// Weights for neighbor values `[up, down, left, right]`.
    pub fn from_neighbors(n: [u8; 4]) -> Self {
        let mean = neighbor_mean_of(n) as i32;
        let dev = n.map(|v| (mean - v as i32).unsigned_abs() as u64);
        if dev.iter().sum::<u64>() == 0 {
            return Self::EQUAL;
        }
        // Raw weight i is S / (1 + |e_i|). Normalizing cancels S, and scaling
        // by the product of all (1 + |e_k|) clears the fractions.
        let factors = dev.map(|d| 1 + d);
        let mut numerators = [0u64; 4];
        for (i, num) in numerators.iter_mut().enumerate() {
            *num = factors
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, f)| f)
                .product();
        }
        let denominator = numerators.iter().sum();
        Self {
            numerators,
            denominator,
        }
        .reduced()
    }

    fn reduced(self) -> Self {
        let g = self.numerators.iter().fold(self.denominator, |g, &n| gcd(g, n));
        Self {
            numerators: self.numerators.map(|n| n / g),
            denominator: self.denominator / g,
        }
    }

    /// Weight `i` (0 = up, 1 = down, 2 = left, 3 = right) as a reduced fraction.
    pub fn fraction(&self, i: usize) -> (u64, u64) {
        let g = gcd(self.numerators[i], self.denominator);
        (self.numerators[i] / g, self.denominator / g)
    }

    pub fn numerators(&self) -> [u64; 4] {
        self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn as_f64(&self) -> [f64; 4] {
        self.numerators.map(|n| n as f64 / self.denominator as f64)
    }

    /// `floor(sum_i w_i * v_i)` computed exactly.
    pub fn apply(&self, n: [u8; 4]) -> u8 {
        let num: u64 = self
            .numerators
            .iter()
            .zip(n)
            .map(|(&w, v)| w * v as u64)
            .sum();
        (num / self.denominator) as u8
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
fn neighbor_mean_of(n: [u8; 4]) -> u8 {
    (n.iter().map(|&v| v as u32).sum::<u32>() / 4) as u8
}

/// Floored mean of the four cross-neighbors.
pub fn neighbor_mean(img: &GrayImage, c: Coord) -> Result<u8> {
    img.check_interior(c)?;
    Ok(neighbor_mean_of(img.cross(c)))
}

pub fn weights(img: &GrayImage, c: Coord) -> Result<NeighborWeights> {
    img.check_interior(c)?;
    Ok(NeighborWeights::from_neighbors(img.cross(c)))
}

#[inline]
pub(crate) fn predict_unchecked(img: &GrayImage, c: Coord) -> u8 {
    let n = img.cross(c);
    NeighborWeights::from_neighbors(n).apply(n)
}

/// Predicted value of an interior pixel from its cross-neighbors.
pub fn predict(img: &GrayImage, c: Coord) -> Result<u8> {
    img.check_interior(c)?;
    Ok(predict_unchecked(img, c))
}

/// `pixel - prediction`, in `[-255, 255]`.
pub fn prediction_error(img: &GrayImage, c: Coord) -> Result<i32> {
    img.check_interior(c)?;
    Ok(img.get(c) as i32 - predict_unchecked(img, c) as i32)
}
