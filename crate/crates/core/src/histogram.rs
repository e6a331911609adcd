//! Prediction-error histograms and double-peak selection.

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::error::{RdhError, Result};
use crate::image::{processable_coords, GrayImage, Parity};
use crate::predictor::predict_unchecked;

pub const MIN_BIN: i32 = -255;
pub const MAX_BIN: i32 = 255;
const NUM_BINS: usize = (MAX_BIN - MIN_BIN + 1) as usize;

/// Counts of prediction errors in `[-255, 255]`.
#[derive(Clone, PartialEq, Eq)]
pub struct ErrorHistogram {
    counts: Box<[u64; NUM_BINS]>,
    total: u64,
}

impl Default for ErrorHistogram {
    fn default() -> Self {
        Self {
            counts: Box::new([0; NUM_BINS]),
            total: 0,
        }
    }
}

impl std::fmt::Debug for ErrorHistogram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.nonzero()).finish()
    }
}

impl ErrorHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Panics if `bin` is outside `[-255, 255]`.
    pub fn add(&mut self, bin: i32) {
        self.add_n(bin, 1);
    }

    pub fn add_n(&mut self, bin: i32, n: u64) {
        assert!((MIN_BIN..=MAX_BIN).contains(&bin), "error bin {bin} out of range");
        self.counts[(bin - MIN_BIN) as usize] += n;
        self.total += n;
    }

    /// Zero for bins outside the histogram range.
    pub fn count(&self, bin: i32) -> u64 {
        if (MIN_BIN..=MAX_BIN).contains(&bin) {
            self.counts[(bin - MIN_BIN) as usize]
        } else {
            0
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `(bin, count)` pairs with a nonzero count, ascending by bin.
    pub fn nonzero(&self) -> impl Iterator<Item = (i32, u64)> + '_ {
        (MIN_BIN..=MAX_BIN)
            .map(|b| (b, self.count(b)))
            .filter(|&(_, n)| n > 0)
    }

    /// Number of bits the selected peaks can carry.
    pub fn peak_capacity(&self, params: &PeakZeroParams) -> u64 {
        self.count(params.pk1) + self.count(params.pk2)
    }
}

impl FromIterator<i32> for ErrorHistogram {
    fn from_iter<T: IntoIterator<Item = i32>>(iter: T) -> Self {
        let mut h = ErrorHistogram::new();
        for e in iter {
            h.add(e);
        }
        h
    }
}

/// Histogram of prediction errors over the processable pixels of `set`.
pub fn build_peh(img: &GrayImage, set: Parity) -> ErrorHistogram {
    processable_coords(img.dims(), set)
        .into_iter()
        .map(|c| img.get(c) as i32 - predict_unchecked(img, c) as i32)
        .collect()
}

/// The two peak bins and the empty bins bounding the shift ranges.
///
/// `pk1` is the fuller peak. Zero points satisfy `z1 < min(pk) < max(pk) < z2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeakZeroParams {
    pub pk1: i32,
    pub pk2: i32,
    pub z1: i32,
    pub z2: i32,
}

impl PeakZeroParams {
    /// Validates the ordering constraints without reference to a histogram.
    pub fn new(pk1: i32, pk2: i32, z1: i32, z2: i32) -> Result<Self> {
        let p = Self { pk1, pk2, z1, z2 };
        if pk1 == pk2 || z1 >= p.low_peak() || z2 <= p.high_peak() {
            return Err(RdhError::Format(format!(
                "inconsistent peak/zero parameters {p:?}"
            )));
        }
        Ok(p)
    }

    #[inline]
    pub fn low_peak(&self) -> i32 {
        self.pk1.min(self.pk2)
    }

    #[inline]
    pub fn high_peak(&self) -> i32 {
        self.pk1.max(self.pk2)
    }

    #[inline]
    pub fn low_zero(&self) -> i32 {
        self.z1.min(self.z2)
    }

    #[inline]
    pub fn high_zero(&self) -> i32 {
        self.z1.max(self.z2)
    }

    #[inline]
    pub fn is_peak(&self, e: i32) -> bool {
        e == self.pk1 || e == self.pk2
    }
}

/// Picks the two fullest bins as peaks (ties: smaller magnitude, then
/// smaller value) and the nearest empty bins outside them as zero points.
pub fn select_peaks_zeros(h: &ErrorHistogram) -> Result<PeakZeroParams> {
    let mut ranked: Vec<(i32, u64)> = h.nonzero().collect();
    if ranked.len() < 2 {
        return Err(RdhError::Capacity(format!(
            "prediction-error histogram has {} nonzero bin(s); two peaks are required",
            ranked.len()
        )));
    }
    ranked.sort_by_key(|&(b, n)| (Reverse(n), b.abs(), b));
    let (pk1, pk2) = (ranked[0].0, ranked[1].0);
    let (lo, hi) = (pk1.min(pk2), pk1.max(pk2));

    let z1 = (MIN_BIN..lo).rev().find(|&b| h.count(b) == 0);
    let z2 = (hi + 1..=MAX_BIN).find(|&b| h.count(b) == 0);
    match (z1, z2) {
        (Some(z1), Some(z2)) => Ok(PeakZeroParams { pk1, pk2, z1, z2 }),
        _ => Err(RdhError::Capacity(format!(
            "no empty bin on both sides of peaks {pk1} and {pk2}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(i32, u64)]) -> ErrorHistogram {
        let mut h = ErrorHistogram::new();
        for &(b, n) in pairs {
            if n > 0 {
                h.add_n(b, n);
            }
        }
        h
    }

    #[test]
    fn constant_image_single_bin() {
        let img = GrayImage::from_fn(9, 7, |_, _| 42).unwrap();
        let h = build_peh(&img, Parity::A);
        assert_eq!(h.nonzero().collect::<Vec<_>>(), vec![(0, h.total())]);
        assert_eq!(h.total() as usize, processable_coords(img.dims(), Parity::A).len());
        assert!(matches!(select_peaks_zeros(&h), Err(RdhError::Capacity(_))));
    }

    #[test]
    fn five_by_five_total() {
        let img = GrayImage::from_fn(5, 5, |r, c| (r * 50 + c * 7) as u8).unwrap();
        assert_eq!(build_peh(&img, Parity::A).total(), 5);
        assert_eq!(build_peh(&img, Parity::B).total(), 4);
    }

    #[test]
    fn selects_top_two_and_nearest_zeros() {
        let h = hist(&[(-3, 0), (-2, 5), (-1, 20), (0, 30), (1, 8), (2, 0)]);
        let p = select_peaks_zeros(&h).unwrap();
        assert_eq!(p, PeakZeroParams { pk1: 0, pk2: -1, z1: -3, z2: 2 });
    }

    #[test]
    fn tie_prefers_smaller_magnitude() {
        let h = hist(&[
            (0, 10),
            (1, 10),
            (2, 1),
            (-1, 1),
            (-2, 1),
            (3, 1),
            (4, 1),
            (-3, 1),
            (-4, 1),
        ]);
        let p = select_peaks_zeros(&h).unwrap();
        assert_eq!(p, PeakZeroParams { pk1: 0, pk2: 1, z1: -5, z2: 5 });

        // Equal magnitude: the negative bin wins.
        let h = hist(&[(-1, 4), (1, 4), (0, 2)]);
        let p = select_peaks_zeros(&h).unwrap();
        assert_eq!((p.pk1, p.pk2), (-1, 1));
        assert_eq!((p.z1, p.z2), (-2, 2));
    }

    #[test]
    fn peaks_need_not_be_adjacent() {
        let h = hist(&[(-2, 9), (-1, 1), (0, 3), (1, 9)]);
        let p = select_peaks_zeros(&h).unwrap();
        assert_eq!(p, PeakZeroParams { pk1: 1, pk2: -2, z1: -3, z2: 2 });
    }

    #[test]
    fn no_zero_on_one_side() {
        let mut h = ErrorHistogram::new();
        for b in MIN_BIN..=-100 {
            h.add(b);
        }
        h.add_n(-99, 50);
        h.add_n(-98, 40);
        assert!(matches!(select_peaks_zeros(&h), Err(RdhError::Capacity(_))));
    }

    #[test]
    fn params_validation() {
        assert!(PeakZeroParams::new(0, -1, -3, 2).is_ok());
        assert!(PeakZeroParams::new(0, 0, -3, 2).is_err());
        assert!(PeakZeroParams::new(0, -1, -1, 2).is_err());
        assert!(PeakZeroParams::new(0, -1, -3, 0).is_err());
    }

    #[test]
    fn total_ignores_scan_order() {
        let errors = [3, -1, 0, 0, 2, -1, 7, 0];
        let fwd: ErrorHistogram = errors.iter().copied().collect();
        let rev: ErrorHistogram = errors.iter().rev().copied().collect();
        assert_eq!(fwd, rev);
        assert_eq!(fwd.total(), 8);
    }
}
