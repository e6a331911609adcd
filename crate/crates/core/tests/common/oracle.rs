//! Brute-force re-simulation of the scheme on plain pixel vectors.
//!
//! Written straight through without calling into the library, so agreement
//! with the codec is meaningful.

use std::collections::BTreeMap;

use num_rational::Ratio;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSet {
    /// (pk1, pk2, z1, z2), `None` for an empty set.
    pub params: Option<(i32, i32, i32, i32)>,
    pub bits: usize,
    pub prefix_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleEmbed {
    pub preprocessed: Vec<u8>,
    pub stego: Vec<u8>,
    pub sets: [OracleSet; 2],
    pub locmap: Vec<bool>,
    pub isp: usize,
    pub valid: usize,
}

fn px(img: &[u8], w: usize, r: usize, c: usize) -> i64 {
    img[r * w + c] as i64
}

fn omega(img: &[u8], w: usize, r: usize, c: usize) -> i64 {
    let a = px(img, w, r - 1, c);
    let b = px(img, w, r, c - 1);
    let cc = px(img, w, r, c + 1);
    let d = px(img, w, r + 1, c);
    (a - d).abs() + (b - cc).abs() + (a + cc - b - d).abs() + (cc + d - a - b).abs()
}

fn interior(w: usize, h: usize, r: i64, c: i64) -> bool {
    r >= 1 && c >= 1 && r <= h as i64 - 2 && c <= w as i64 - 2
}

/// Interior pixels of one parity (0 = even sum), visited smoothest first or
/// in raster order.
fn visit_order(img: &[u8], w: usize, h: usize, parity: usize, fluctuation: bool) -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            if (r + c) % 2 == parity {
                cells.push((r, c));
            }
        }
    }
    if !fluctuation {
        return cells;
    }
    let mut keyed = Vec::new();
    for (idx, &(r, c)) in cells.iter().enumerate() {
        let own = omega(img, w, r, c);
        let mut sum = 0;
        let mut n = 0;
        for (dr, dc) in [(-1i64, -1i64), (-1, 1), (1, -1), (1, 1)] {
            let (nr, nc) = (r as i64 + dr, c as i64 + dc);
            if interior(w, h, nr, nc) {
                sum += omega(img, w, nr as usize, nc as usize);
                n += 1;
            }
        }
        let f = if n == 0 { own } else { own + sum / n };
        keyed.push((f, idx, (r, c)));
    }
    keyed.sort();
    keyed.into_iter().map(|(_, _, rc)| rc).collect()
}

fn predict(img: &[u8], w: usize, r: usize, c: usize) -> i64 {
    let n = [
        px(img, w, r - 1, c),
        px(img, w, r + 1, c),
        px(img, w, r, c - 1),
        px(img, w, r, c + 1),
    ];
    let mean = (n[0] + n[1] + n[2] + n[3]) / 4;
    let inv: Vec<Ratio<i64>> = n.iter().map(|&v| Ratio::new(1, 1 + (mean - v).abs())).collect();
    let total: Ratio<i64> = inv.iter().sum();
    let mut acc = Ratio::from_integer(0);
    for i in 0..4 {
        acc += inv[i] / total * Ratio::from_integer(n[i]);
    }
    acc.floor().to_integer()
}

fn choose_params(errors: &[i64]) -> Option<(i32, i32, i32, i32)> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &e in errors {
        *counts.entry(e).or_default() += 1;
    }
    let mut bins: Vec<(i64, usize)> = counts.iter().map(|(&b, &n)| (b, n)).collect();
    if bins.len() < 2 {
        return None;
    }
    bins.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.abs().cmp(&y.0.abs())).then(x.0.cmp(&y.0)));
    let (pk1, pk2) = (bins[0].0, bins[1].0);
    let (lo, hi) = (pk1.min(pk2), pk1.max(pk2));
    let mut z1 = None;
    let mut b = lo - 1;
    while b >= -255 {
        if !counts.contains_key(&b) {
            z1 = Some(b);
            break;
        }
        b -= 1;
    }
    let mut z2 = None;
    let mut b = hi + 1;
    while b <= 255 {
        if !counts.contains_key(&b) {
            z2 = Some(b);
            break;
        }
        b += 1;
    }
    Some((pk1 as i32, pk2 as i32, z1? as i32, z2? as i32))
}

/// `None` when the codec is expected to refuse the payload.
pub fn embed(cover: &[u8], w: usize, h: usize, payload: &[bool], fluctuation: bool) -> Option<OracleEmbed> {
    let mut img = cover.to_vec();
    let mut locmap = Vec::new();
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            let i = r * w + c;
            if img[i] == 0 {
                img[i] = 1;
            } else if img[i] == 255 {
                img[i] = 254;
            }
            if img[i] == 1 || img[i] == 254 {
                locmap.push(cover[i] != img[i]);
            }
        }
    }
    let preprocessed = img.clone();
    let split = payload.len().div_ceil(2);
    let parts = [&payload[..split], &payload[split..]];
    let mut sets = Vec::new();
    let mut isp = 0;
    let mut valid = 0;
    for (parity, bits) in parts.into_iter().enumerate() {
        if bits.is_empty() {
            sets.push(OracleSet { params: None, bits: 0, prefix_len: 0 });
            continue;
        }
        let order = visit_order(&img, w, h, parity, fluctuation);
        let errors: Vec<i64> = order.iter().map(|&(r, c)| px(&img, w, r, c) - predict(&img, w, r, c)).collect();
        let (pk1, pk2, z1, z2) = choose_params(&errors)?;
        let (lo, hi) = (pk1.min(pk2) as i64, pk1.max(pk2) as i64);
        let cap = errors.iter().filter(|&&e| e == lo || e == hi).count();
        if bits.len() > cap {
            return None;
        }
        let before = img.clone();
        let mut used = 0;
        let mut visited = 0;
        for (k, &(r, c)) in order.iter().enumerate() {
            let e = errors[k];
            let marked = if e == hi || e == lo {
                let b = bits[used] as i64;
                used += 1;
                valid += b as usize;
                if e == hi { e + b } else { e - b }
            } else if e > hi && e < z2 as i64 {
                isp += 1;
                e + 1
            } else if e < lo && e > z1 as i64 {
                isp += 1;
                e - 1
            } else {
                e
            };
            let v = predict(&before, w, r, c) + marked;
            assert!((0..=255).contains(&v));
            img[r * w + c] = v as u8;
            visited += 1;
            if used == bits.len() {
                break;
            }
        }
        sets.push(OracleSet {
            params: Some((pk1, pk2, z1, z2)),
            bits: bits.len(),
            prefix_len: visited,
        });
    }
    let sets: [OracleSet; 2] = sets.try_into().unwrap();
    Some(OracleEmbed { preprocessed, stego: img, sets, locmap, isp, valid })
}

/// Payload and cover recovered from a stego vector using only side data.
pub fn extract(
    stego: &[u8],
    w: usize,
    h: usize,
    sets: &[OracleSet; 2],
    locmap: &[bool],
    fluctuation: bool,
) -> (Vec<bool>, Vec<u8>) {
    let mut img = stego.to_vec();
    let mut per_set: [Vec<bool>; 2] = [Vec::new(), Vec::new()];
    for parity in [1, 0] {
        let s = &sets[parity];
        let Some((pk1, pk2, z1, z2)) = s.params else { continue };
        let (lo, hi) = (pk1.min(pk2) as i64, pk1.max(pk2) as i64);
        let (z1, z2) = (z1 as i64, z2 as i64);
        let order = visit_order(&img, w, h, parity, fluctuation);
        let marked_img = img.clone();
        for &(r, c) in order.iter().take(s.prefix_len) {
            let p = predict(&marked_img, w, r, c);
            let em = px(&marked_img, w, r, c) - p;
            let e = if em == hi + 1 {
                per_set[parity].push(true);
                hi
            } else if em == lo - 1 {
                per_set[parity].push(true);
                lo
            } else if em == hi || em == lo {
                per_set[parity].push(false);
                em
            } else if em > hi && em <= z2 {
                em - 1
            } else if em < lo && em >= z1 {
                em + 1
            } else {
                em
            };
            img[r * w + c] = (p + e) as u8;
        }
        per_set[parity].truncate(s.bits);
    }
    let mut bits = per_set[0].clone();
    bits.extend_from_slice(&per_set[1]);
    let mut k = 0;
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            let i = r * w + c;
            if img[i] == 1 || img[i] == 254 {
                if locmap[k] {
                    img[i] = if img[i] == 1 { 0 } else { 255 };
                }
                k += 1;
            }
        }
    }
    (bits, img)
}
