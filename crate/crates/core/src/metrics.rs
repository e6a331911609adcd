//! Distortion and embedding-efficiency measurements.

use std::fmt;

use crate::codec::{modify_error, preprocess, EmbedStats, Embedding, ErrorAction};
use crate::error::{RdhError, Result};
use crate::histogram::{select_peaks_zeros, ErrorHistogram};
use crate::image::{Dims, GrayImage, Region};
use crate::predictor::predict_unchecked;

const PEAK_SQUARED: f64 = 255.0 * 255.0;

fn check_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(RdhError::Format(format!(
            "images differ in size: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// Sum of squared pixel differences.
pub fn squared_error(a: &GrayImage, b: &GrayImage) -> Result<u64> {
    check_dims(a, b)?;
    Ok(a.pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum())
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(squared_error(a, b)? as f64 / a.len() as f64)
}

/// `+inf` for a zero MSE.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK_SQUARED / mse).log10()
    }
}

pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

/// Splits the MSE into the part caused by bit-carrying shifts and the part
/// caused by invalid shifting pixels. Every change is one gray level, so each
/// pixel contributes exactly `1 / N`.
pub fn mse_decomposition(stats: &EmbedStats, dims: Dims) -> (f64, f64) {
    let n = (dims.width * dims.height) as f64;
    (stats.valid_shift_count as f64 / n, stats.isp_count as f64 / n)
}

/// Quality summary for one embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub width: usize,
    pub height: usize,
    pub payload_bits: usize,
    pub bpp: f64,
    pub valid_shift_count: usize,
    pub isp_count: usize,
    /// Against the original cover.
    pub mse: f64,
    pub psnr: f64,
    /// Against the cover after 0/255 preprocessing.
    pub mse_preprocessed: f64,
    pub psnr_preprocessed: f64,
}

impl QualityReport {
    pub fn new(cover: &GrayImage, embedding: &Embedding) -> Result<Self> {
        let mse_orig = mse(cover, &embedding.stego)?;
        let mse_pre = mse(&embedding.preprocessed, &embedding.stego)?;
        let payload_bits = embedding.meta.payload_bits;
        Ok(Self {
            width: cover.width(),
            height: cover.height(),
            payload_bits,
            bpp: payload_bits as f64 / cover.len() as f64,
            valid_shift_count: embedding.stats.valid_shift_count,
            isp_count: embedding.stats.isp_count,
            mse: mse_orig,
            psnr: psnr_from_mse(mse_orig),
            mse_preprocessed: mse_pre,
            psnr_preprocessed: psnr_from_mse(mse_pre),
        })
    }
}

fn fmt_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_owned()
    } else {
        format!("{v:.4}")
    }
}

impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width: {}", self.width)?;
        writeln!(f, "height: {}", self.height)?;
        writeln!(f, "payload_bits: {}", self.payload_bits)?;
        writeln!(f, "bpp: {:.6}", self.bpp)?;
        writeln!(f, "valid_shifts: {}", self.valid_shift_count)?;
        writeln!(f, "isp: {}", self.isp_count)?;
        writeln!(f, "mse: {:.8}", self.mse)?;
        writeln!(f, "psnr_db: {}", fmt_db(self.psnr))?;
        writeln!(f, "mse_preprocessed: {:.8}", self.mse_preprocessed)?;
        writeln!(f, "psnr_preprocessed_db: {}", fmt_db(self.psnr_preprocessed))
    }
}

/// Invalid shifting pixels produced by embedding `payload_bits` into one block
/// with a single peak pair, visiting its interior in raster order.
///
/// Which pixels shift does not depend on the bit values, only on how many
/// bits are placed, so no payload content is needed.
pub fn block_isp_count(block: &GrayImage, payload_bits: usize) -> Result<usize> {
    if payload_bits == 0 {
        return Ok(0);
    }
    let (pre, _) = preprocess(block);
    let mut errors = Vec::new();
    for row in 1..pre.height() - 1 {
        for col in 1..pre.width() - 1 {
            let c = crate::image::Coord::new(row, col);
            errors.push(pre.get(c) as i32 - predict_unchecked(&pre, c) as i32);
        }
    }
    let hist: ErrorHistogram = errors.iter().copied().collect();
    let params = select_peaks_zeros(&hist)?;
    let capacity = hist.peak_capacity(&params);
    if payload_bits as u64 > capacity {
        return Err(RdhError::Capacity(format!(
            "block can carry {capacity} bits, {payload_bits} requested"
        )));
    }
    let mut placed = 0;
    let mut isp = 0;
    for e in errors {
        let bit = params.is_peak(e).then_some(false);
        if modify_error(e, &params, bit).1 == ErrorAction::Shifted {
            isp += 1;
        }
        placed += bit.is_some() as usize;
        if placed == payload_bits {
            break;
        }
    }
    Ok(isp)
}

/// ISP counts for two equally sized blocks carrying the same payload size.
pub fn block_isp_experiment(
    img: &GrayImage,
    block_a: Region,
    block_b: Region,
    payload_bits: usize,
) -> Result<(usize, usize)> {
    if (block_a.width, block_a.height) != (block_b.width, block_b.height) {
        return Err(RdhError::Format("blocks must have the same size".into()));
    }
    Ok((
        block_isp_count(&img.crop(block_a)?, payload_bits)?,
        block_isp_count(&img.crop(block_b)?, payload_bits)?,
    ))
}
