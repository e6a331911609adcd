#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdh_core::io::read_pgm;
use rdh_core::{embed, extract, GrayImage, OrderMode, RdhError, StegoMetadata};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Directory holding the natural test images; `RDH_TEST_IMAGES` overrides it.
pub fn image_dir() -> PathBuf {
    std::env::var_os("RDH_TEST_IMAGES")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data"))
}

pub fn load_image(name: &str) -> Result<GrayImage, String> {
    let path = image_dir().join(format!("{name}.pgm"));
    if !path.exists() {
        return Err(format!("{} not found", path.display()));
    }
    read_pgm(&path).map_err(|e| e.to_string())
}

/// Random test image mixing flat, noisy, gradient and saturated content.
pub fn random_image(rng: &mut ChaCha8Rng, width: usize, height: usize) -> GrayImage {
    let kind = rng.random_range(0..5);
    let base: i32 = rng.random_range(0..=255);
    let amp: i32 = rng.random_range(0..=40);
    let slope_r: i32 = rng.random_range(-6..=6);
    let slope_c: i32 = rng.random_range(-6..=6);
    let mut pixels = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            let v = match kind {
                0 => base,
                1 => base + rng.random_range(-amp..=amp),
                2 => base + slope_r * r as i32 + slope_c * c as i32,
                3 => base + slope_r * r as i32 + rng.random_range(-amp / 4..=amp / 4),
                _ => *[0, 255, base, base + 1].get(rng.random_range(0..4)).unwrap(),
            };
            pixels.push(v.clamp(0, 255) as u8);
        }
    }
    GrayImage::new(width, height, pixels).unwrap()
}

pub fn random_payload(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(0.5)).collect()
}

/// Outcome of comparing the codec with the oracle on one input.
#[derive(Debug, Default, Clone, Copy)]
pub struct OracleCase {
    pub embedded: bool,
    pub non_adjacent_peaks: bool,
}

/// Runs codec and oracle on the same input and compares every output.
pub fn compare_with_oracle(cover: &GrayImage, payload: &[bool], mode: OrderMode) -> Result<OracleCase, String> {
    let (w, h) = (cover.width(), cover.height());
    let fluct = mode == OrderMode::Fluctuation;
    let expected = oracle::embed(cover.pixels(), w, h, payload, fluct);
    let actual = embed(cover, payload, mode);
    let (exp, act) = match (expected, actual) {
        (None, Err(RdhError::Capacity(_))) => return Ok(OracleCase::default()),
        (None, other) => return Err(format!("oracle refuses, codec gave {:?}", other.map(|e| e.stats))),
        (Some(_), Err(e)) => return Err(format!("oracle embeds, codec failed: {e}")),
        (Some(x), Ok(y)) => (x, y),
    };
    if act.preprocessed.pixels() != &exp.preprocessed[..] {
        return Err("preprocessed cover differs".into());
    }
    if act.stego.pixels() != &exp.stego[..] {
        return Err("stego pixels differ".into());
    }
    if act.meta.location_map.bits() != &exp.locmap[..] {
        return Err("location map differs".into());
    }
    let mut non_adjacent = false;
    for (info, want) in [(&act.meta.set_a, &exp.sets[0]), (&act.meta.set_b, &exp.sets[1])] {
        let got = info.params.map(|p| (p.pk1, p.pk2, p.z1, p.z2));
        if got != want.params || info.bits_embedded != want.bits || info.processed_prefix_len != want.prefix_len {
            return Err(format!("set {} side info {:?} vs oracle {:?}", info.set, info, want));
        }
        if let Some((a, b, _, _)) = want.params {
            non_adjacent |= (a - b).abs() > 1;
        }
    }
    if (act.stats.isp_count, act.stats.valid_shift_count) != (exp.isp, exp.valid) {
        return Err("shift statistics differ".into());
    }

    let meta = StegoMetadata::from_json(&act.meta.to_json()).map_err(|e| e.to_string())?;
    let (bits, recovered) = extract(&act.stego, &meta).map_err(|e| format!("extract: {e}"))?;
    let (obits, orecovered) = oracle::extract(&exp.stego, w, h, &exp.sets, &exp.locmap, fluct);
    if bits != payload || obits != payload {
        return Err("payload not recovered".into());
    }
    if recovered.pixels() != cover.pixels() || orecovered != cover.pixels() {
        return Err("cover not recovered".into());
    }
    Ok(OracleCase { embedded: true, non_adjacent_peaks: non_adjacent })
}

pub const ORACLE_ALPHABET: [u8; 5] = [0, 1, 128, 254, 255];

/// 6x6 images over the oracle alphabet with short random payloads in both
/// traversal modes. Returns (embedded cases, cases with non-adjacent peaks).
pub fn oracle_sweep(samples: usize, seed: u64) -> Result<(usize, usize), String> {
    let mut rng = rng(seed);
    let mut embedded = 0;
    let mut non_adjacent = 0;
    for i in 0..samples {
        let pixels: Vec<u8> = (0..36).map(|_| ORACLE_ALPHABET[rng.random_range(0..5)]).collect();
        let cover = GrayImage::new(6, 6, pixels).unwrap();
        let len = rng.random_range(0..=10);
        let payload = random_payload(&mut rng, len);
        for mode in [OrderMode::Fluctuation, OrderMode::Raster] {
            let case = compare_with_oracle(&cover, &payload, mode)
                .map_err(|e| format!("sample {i} ({mode}): {e}; cover {:?} payload {payload:?}", cover.pixels()))?;
            embedded += case.embedded as usize;
            non_adjacent += case.non_adjacent_peaks as usize;
        }
    }
    Ok((embedded, non_adjacent))
}
