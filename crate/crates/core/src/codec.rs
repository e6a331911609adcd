//! Embedding and extraction.
//!
//! The cover is first pulled away from the 0/255 extremes (recorded in a
//! [`LocationMap`]). Set A then takes the first half of the payload (rounded
//! up), visiting its pixels from smoothest to roughest and shifting prediction
//! errors around two peak bins. Set B takes the rest, predicted from the
//! already-marked A pixels. Extraction runs the same walks in reverse order:
//! B first, then A, then the location map.
//!
//! Every visited pixel moves by at most one gray level, and a set stops being
//! walked right after its last payload bit, so pixels later in the order are
//! left alone.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{RdhError, Result};
use crate::histogram::{select_peaks_zeros, ErrorHistogram, PeakZeroParams};
use crate::image::{processable_coords, Coord, GrayImage, Parity};
use crate::locmap::LocationMap;
use crate::metadata::StegoMetadata;
use crate::predictor::predict_unchecked;
use crate::texture::fluctuation_order;

/// The order in which a set's pixels are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OrderMode {
    /// Ascending fluctuation: smooth pixels first.
    #[default]
    Fluctuation,
    /// Plain row-major scan, kept as a baseline.
    Raster,
}

impl OrderMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderMode::Fluctuation => "fluctuation",
            OrderMode::Raster => "raster",
        }
    }
}

impl fmt::Display for OrderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderMode {
    type Err = RdhError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fluctuation" => Ok(OrderMode::Fluctuation),
            "raster" => Ok(OrderMode::Raster),
            other => Err(RdhError::Format(format!("unknown order mode {other:?}"))),
        }
    }
}

/// What happened to one prediction error during embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorAction {
    /// The error sat on a peak and carried a payload bit.
    Embedded,
    /// The error was pushed one bin outward to make room, carrying nothing.
    Shifted,
    Unchanged,
}

/// Pixel counters for one embedding run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedStats {
    /// Pixels changed because they carried a 1 bit.
    pub valid_shift_count: usize,
    /// Invalid shifting pixels: moved but carrying no bit.
    pub isp_count: usize,
    /// Visited pixels left as they were.
    pub unchanged_count: usize,
}

impl EmbedStats {
    pub fn visited(&self) -> usize {
        self.valid_shift_count + self.isp_count + self.unchanged_count
    }

    pub fn changed(&self) -> usize {
        self.valid_shift_count + self.isp_count
    }
}

impl Add for EmbedStats {
    type Output = EmbedStats;

    fn add(self, rhs: Self) -> Self {
        EmbedStats {
            valid_shift_count: self.valid_shift_count + rhs.valid_shift_count,
            isp_count: self.isp_count + rhs.isp_count,
            unchanged_count: self.unchanged_count + rhs.unchanged_count,
        }
    }
}

impl AddAssign for EmbedStats {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Side information the extractor needs for one set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetSideInfo {
    pub set: Parity,
    /// `None` only when nothing was embedded in the set.
    pub params: Option<PeakZeroParams>,
    pub bits_embedded: usize,
    /// Number of pixels visited, in traversal order.
    pub processed_prefix_len: usize,
}

impl SetSideInfo {
    pub fn empty(set: Parity) -> Self {
        Self {
            set,
            params: None,
            bits_embedded: 0,
            processed_prefix_len: 0,
        }
    }
}

/// Result of embedding into one set.
#[derive(Debug, Clone)]
pub struct SetEmbedding {
    pub image: GrayImage,
    pub info: SetSideInfo,
    pub stats: EmbedStats,
}

/// Result of a full embed.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub stego: GrayImage,
    /// The cover after 0/255 preprocessing; the reference for distortion
    /// identities.
    pub preprocessed: GrayImage,
    pub meta: StegoMetadata,
    pub stats: EmbedStats,
}

/// Gross peak capacity of a cover. The B figure is measured on the
/// preprocessed cover rather than on the A-marked image, so it is an
/// estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityReport {
    pub set_a: u64,
    pub set_b_estimate: u64,
}

impl CapacityReport {
    pub fn gross(&self) -> u64 {
        self.set_a + self.set_b_estimate
    }
}

/// Maps interior 0 to 1 and 255 to 254, recording which interior 1/254
/// values were produced that way.
pub fn preprocess(img: &GrayImage) -> (GrayImage, LocationMap) {
    let mut out = img.clone();
    let mut map = LocationMap::default();
    for row in 1..img.height() - 1 {
        for col in 1..img.width() - 1 {
            let c = Coord::new(row, col);
            match img.get(c) {
                0 => {
                    out.set(c, 1);
                    map.push(true);
                }
                255 => {
                    out.set(c, 254);
                    map.push(true);
                }
                1 | 254 => map.push(false),
                _ => {}
            }
        }
    }
    (out, map)
}

/// Inverse of [`preprocess`].
pub fn postprocess(img: &GrayImage, map: &LocationMap) -> Result<GrayImage> {
    let mut out = img.clone();
    let mut bits = map.bits().iter();
    for row in 1..img.height() - 1 {
        for col in 1..img.width() - 1 {
            let c = Coord::new(row, col);
            let v = img.get(c);
            if v == 1 || v == 254 {
                let flagged = *bits.next().ok_or_else(|| {
                    RdhError::CorruptStego("location map is shorter than the number of 1/254 pixels".into())
                })?;
                if flagged {
                    out.set(c, if v == 1 { 0 } else { 255 });
                }
            }
        }
    }
    if bits.next().is_some() {
        return Err(RdhError::CorruptStego(
            "location map is longer than the number of 1/254 pixels".into(),
        ));
    }
    Ok(out)
}

/// Marks one prediction error. `next_bit` is consumed only when `e` is a peak.
pub fn modify_error(e: i32, params: &PeakZeroParams, next_bit: Option<bool>) -> (i32, ErrorAction) {
    let (lo, hi) = (params.low_peak(), params.high_peak());
    if e == hi || e == lo {
        return match next_bit {
            Some(b) if e == hi => (e + b as i32, ErrorAction::Embedded),
            Some(b) => (e - b as i32, ErrorAction::Embedded),
            None => (e, ErrorAction::Unchanged),
        };
    }
    if e > hi && e < params.high_zero() {
        (e + 1, ErrorAction::Shifted)
    } else if e < lo && e > params.low_zero() {
        (e - 1, ErrorAction::Shifted)
    } else {
        (e, ErrorAction::Unchanged)
    }
}

/// Reads the bit carried by a marked error (if any) and restores the error.
pub fn recover_error(marked: i32, params: &PeakZeroParams) -> (i32, Option<bool>) {
    let (lo, hi) = (params.low_peak(), params.high_peak());
    let bit = if params.is_peak(marked) {
        Some(false)
    } else if marked == lo - 1 || marked == hi + 1 {
        Some(true)
    } else {
        None
    };
    // Cases in this order; hi + 1 also falls in the shift-back range.
    let e = if marked == hi + 1 {
        marked - 1
    } else if marked == lo - 1 {
        marked + 1
    } else if params.is_peak(marked) {
        marked
    } else if marked <= params.high_zero() && marked > hi {
        marked - 1
    } else if marked >= params.low_zero() && marked < lo {
        marked + 1
    } else {
        marked
    };
    (e, bit)
}

/// Pixels of `set` in the order they are visited.
pub fn traversal(img: &GrayImage, set: Parity, mode: OrderMode) -> Vec<Coord> {
    match mode {
        OrderMode::Fluctuation => fluctuation_order(img, set).into_iter().map(|r| r.coord).collect(),
        OrderMode::Raster => processable_coords(img.dims(), set),
    }
}

/// Embeds `bits` into one set. Fails before writing anything if the peaks
/// cannot carry every bit.
pub fn embed_set(img: &GrayImage, set: Parity, bits: &[bool], mode: OrderMode) -> Result<SetEmbedding> {
    if bits.is_empty() {
        return Ok(SetEmbedding {
            image: img.clone(),
            info: SetSideInfo::empty(set),
            stats: EmbedStats::default(),
        });
    }

    // Predictions of one set read only the other set, so they can all be
    // taken from the input image up front.
    let plan: Vec<(Coord, i32, i32)> = traversal(img, set, mode)
        .into_iter()
        .map(|c| {
            let predicted = predict_unchecked(img, c) as i32;
            (c, predicted, img.get(c) as i32 - predicted)
        })
        .collect();
    let hist: ErrorHistogram = plan.iter().map(|&(_, _, e)| e).collect();
    let params = select_peaks_zeros(&hist)?;
    let capacity = hist.peak_capacity(&params);
    if bits.len() as u64 > capacity {
        return Err(RdhError::Capacity(format!(
            "set {set} can carry {capacity} bits, {} requested",
            bits.len()
        )));
    }

    let mut writes = Vec::new();
    let mut stats = EmbedStats::default();
    let mut next = 0;
    for &(c, predicted, e) in &plan {
        let bit = if params.is_peak(e) {
            next += 1;
            Some(bits[next - 1])
        } else {
            None
        };
        let (marked, action) = modify_error(e, &params, bit);
        match action {
            ErrorAction::Shifted => stats.isp_count += 1,
            ErrorAction::Embedded if marked != e => stats.valid_shift_count += 1,
            _ => stats.unchanged_count += 1,
        }
        let value = u8::try_from(predicted + marked).map_err(|_| {
            RdhError::Capacity(format!(
                "pixel ({}, {}) would leave [0, 255]; preprocess the cover first",
                c.row, c.col
            ))
        })?;
        writes.push((c, value));
        if next == bits.len() {
            break;
        }
    }

    let mut image = img.clone();
    for &(c, v) in &writes {
        image.set(c, v);
    }
    Ok(SetEmbedding {
        image,
        info: SetSideInfo {
            set,
            params: Some(params),
            bits_embedded: bits.len(),
            processed_prefix_len: writes.len(),
        },
        stats,
    })
}

/// Recovers the bits and the pre-embedding pixels of one set. `img` must be
/// the state right after that set was embedded.
pub fn extract_set(img: &GrayImage, info: &SetSideInfo, mode: OrderMode) -> Result<(Vec<bool>, GrayImage)> {
    if info.bits_embedded == 0 {
        if info.processed_prefix_len != 0 {
            return Err(RdhError::CorruptStego(format!(
                "set {} claims {} visited pixels but no bits",
                info.set, info.processed_prefix_len
            )));
        }
        return Ok((Vec::new(), img.clone()));
    }
    let params = info.params.ok_or_else(|| {
        RdhError::CorruptStego(format!("set {} carries bits but has no peak parameters", info.set))
    })?;

    let mut out = img.clone();
    let mut bits = Vec::with_capacity(info.bits_embedded);
    let mut visited = 0;
    for c in traversal(img, info.set, mode) {
        if bits.len() == info.bits_embedded {
            break;
        }
        let predicted = predict_unchecked(img, c) as i32;
        let (e, bit) = recover_error(img.get(c) as i32 - predicted, &params);
        bits.extend(bit);
        let value = u8::try_from(predicted + e).map_err(|_| {
            RdhError::CorruptStego(format!("recovered pixel ({}, {}) leaves [0, 255]", c.row, c.col))
        })?;
        out.set(c, value);
        visited += 1;
    }
    if bits.len() < info.bits_embedded {
        return Err(RdhError::CorruptStego(format!(
            "set {} yielded {} of {} bits",
            info.set,
            bits.len(),
            info.bits_embedded
        )));
    }
    if visited != info.processed_prefix_len {
        return Err(RdhError::CorruptStego(format!(
            "set {} visited {visited} pixels, metadata says {}",
            info.set, info.processed_prefix_len
        )));
    }
    Ok((bits, out))
}

/// Embeds `payload` into `cover`: ceil(L/2) bits into A, the rest into B.
pub fn embed(cover: &GrayImage, payload: &[bool], mode: OrderMode) -> Result<Embedding> {
    let (preprocessed, location_map) = preprocess(cover);
    let split = payload.len().div_ceil(2);
    let a = embed_set(&preprocessed, Parity::A, &payload[..split], mode)?;
    let b = embed_set(&a.image, Parity::B, &payload[split..], mode)?;
    let meta = StegoMetadata {
        width: cover.width(),
        height: cover.height(),
        order: mode,
        set_a: a.info,
        set_b: b.info,
        payload_bits: payload.len(),
        location_map,
    };
    Ok(Embedding {
        stego: b.image,
        preprocessed,
        meta,
        stats: a.stats + b.stats,
    })
}

/// Recovers the payload and the exact cover.
pub fn extract(stego: &GrayImage, meta: &StegoMetadata) -> Result<(Vec<bool>, GrayImage)> {
    if stego.width() != meta.width || stego.height() != meta.height {
        return Err(RdhError::Format(format!(
            "stego image is {}x{}, metadata describes {}x{}",
            stego.width(),
            stego.height(),
            meta.width,
            meta.height
        )));
    }
    let (bits_b, after_b) = extract_set(stego, &meta.set_b, meta.order)?;
    let (mut bits, after_a) = extract_set(&after_b, &meta.set_a, meta.order)?;
    bits.extend(bits_b);
    if bits.len() != meta.payload_bits {
        return Err(RdhError::CorruptStego(format!(
            "recovered {} bits, metadata says {}",
            bits.len(),
            meta.payload_bits
        )));
    }
    let cover = postprocess(&after_a, &meta.location_map)?;
    Ok((bits, cover))
}

fn peak_capacity_of(img: &GrayImage, set: Parity) -> Result<u64> {
    let h = crate::histogram::build_peh(img, set);
    let params = select_peaks_zeros(&h)?;
    Ok(h.peak_capacity(&params))
}

/// Gross double-peak capacity of both sets.
pub fn capacity(cover: &GrayImage) -> Result<CapacityReport> {
    let (pre, _) = preprocess(cover);
    Ok(CapacityReport {
        set_a: peak_capacity_of(&pre, Parity::A)?,
        set_b_estimate: peak_capacity_of(&pre, Parity::B)?,
    })
}

/// Longest prefix of `bits` that [`embed`] is guaranteed to accept.
///
/// Set B's real capacity depends on what was written into A, so this walks
/// down from the A capacity until the B half fits. The result is feasible,
/// and close to (though not provably equal to) the true maximum.
pub fn feasible_payload_len(cover: &GrayImage, bits: &[bool], mode: OrderMode) -> usize {
    let (pre, _) = preprocess(cover);
    let Ok(cap_a) = peak_capacity_of(&pre, Parity::A) else {
        return 0;
    };
    let n = bits.len();
    let mut k = (cap_a as usize).min(n.div_ceil(2));
    while k > 0 {
        let a = embed_set(&pre, Parity::A, &bits[..k], mode)
            .expect("A prefix within its own peak capacity");
        let cap_b = peak_capacity_of(&a.image, Parity::B).unwrap_or(0) as usize;
        let for_b = cap_b.min(k).min(n - k);
        if for_b + 1 >= k {
            return k + for_b;
        }
        k = for_b + 1;
    }
    0
}
