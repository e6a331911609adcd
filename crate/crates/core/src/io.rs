//! Binary PGM (P5) files and payload bit handling.

use std::fs;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{RdhError, Result};
use crate::image::GrayImage;

fn io_err(path: &Path, e: std::io::Error) -> RdhError {
    RdhError::Format(format!("{}: {e}", path.display()))
}

/// Parses a P5 image with maxval 255. Comments in the header are skipped.
pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < data.len() && (data[pos].is_ascii_whitespace() || data[pos] == b'#') {
            if data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() && data[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(RdhError::Format("truncated PGM header".into()));
        }
        fields.push(std::str::from_utf8(&data[start..pos]).unwrap_or("").to_owned());
    }
    if fields[0] != "P5" {
        return Err(RdhError::Format(format!("expected P5 magic, found {:?}", fields[0])));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| RdhError::Format(format!("bad PGM {what} {s:?}")))
    };
    let width = num(&fields[1], "width")?;
    let height = num(&fields[2], "height")?;
    let maxval = num(&fields[3], "maxval")?;
    if maxval != 255 {
        return Err(RdhError::Format(format!("only maxval 255 is supported, found {maxval}")));
    }
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err(RdhError::Format("missing whitespace after PGM header".into()));
    }
    let raster = &data[pos + 1..];
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| RdhError::Format("PGM dimensions overflow".into()))?;
    if raster.len() != expected {
        return Err(RdhError::Format(format!(
            "PGM raster has {} bytes, expected {expected}",
            raster.len()
        )));
    }
    GrayImage::new(width, height, raster.to_vec())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let data = fs::read(path).map_err(|e| io_err(path, e))?;
    decode_pgm(&data).map_err(|e| match e {
        RdhError::Format(m) => RdhError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    fs::write(path, encode_pgm(img)).map_err(|e| io_err(path, e))
}

/// Bits of `bytes`, most significant bit first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |i| b >> i & 1 == 1))
        .collect()
}

/// Packs bits MSB first; the last byte is zero-padded.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (b as u8) << (7 - i))
        })
        .collect()
}

/// `n` pseudo-random bits from a ChaCha8 stream seeded with `seed`.
pub fn random_bits(n: usize, seed: u64) -> Vec<bool> {
    let mut bytes = vec![0u8; n.div_ceil(8)];
    ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut bytes);
    let mut bits = bytes_to_bits(&bytes);
    bits.truncate(n);
    bits
}
