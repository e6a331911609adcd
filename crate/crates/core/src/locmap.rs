//! Location map for pixels pulled in from the 0/255 extremes.
//!
//! One bit per interior pixel whose preprocessed value is 1 or 254, in raster
//! order: 1 if the pixel was moved there from 0 or 255, 0 if it was already
//! there. The compressed form (`rle-v1`) is a leading byte holding the first
//! bit value followed by LEB128 run lengths of alternating bits. An empty map
//! compresses to zero bytes.

use crate::error::{RdhError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocationMap {
    bits: Vec<bool>,
}

impl LocationMap {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub(crate) fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn compress(&self) -> Vec<u8> {
        let Some(&first) = self.bits.first() else {
            return Vec::new();
        };
        let mut out = vec![first as u8];
        let mut current = first;
        let mut run: u64 = 0;
        for &b in &self.bits {
            if b == current {
                run += 1;
            } else {
                write_varint(&mut out, run);
                current = b;
                run = 1;
            }
        }
        write_varint(&mut out, run);
        out
    }

    pub fn decompress(data: &[u8]) -> Result<Self> {
        let Some((&first, mut rest)) = data.split_first() else {
            return Ok(Self::default());
        };
        let mut current = match first {
            0 => false,
            1 => true,
            other => {
                return Err(RdhError::Format(format!(
                    "location map starts with invalid bit byte {other}"
                )))
            }
        };
        let mut bits = Vec::new();
        while !rest.is_empty() {
            let (run, used) = read_varint(rest)?;
            if run == 0 {
                return Err(RdhError::Format("zero-length run in location map".into()));
            }
            bits.extend(std::iter::repeat_n(current, run as usize));
            current = !current;
            rest = &rest[used..];
        }
        if bits.is_empty() {
            return Err(RdhError::Format("location map has no runs".into()));
        }
        Ok(Self { bits })
    }
}

fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8 & 0x7f) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

fn read_varint(data: &[u8]) -> Result<(u64, usize)> {
    let mut v: u64 = 0;
    for (i, &byte) in data.iter().enumerate().take(10) {
        v |= ((byte & 0x7f) as u64) << (7 * i);
        if byte & 0x80 == 0 {
            return Ok((v, i + 1));
        }
    }
    Err(RdhError::Format("truncated or oversized run length in location map".into()))
}
