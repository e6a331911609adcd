//! Local complexity and fluctuation scores.
//!
//! The complexity of a pixel looks only at its four cross-neighbors, which
//! belong to the opposite checkerboard set. The fluctuation adds the mean
//! complexity of the diagonal neighbors, which are in the same set but whose
//! complexities again read only opposite-set pixels. Rewriting every pixel of
//! one set therefore leaves that set's fluctuation values untouched, which is
//! what lets the extractor rebuild the embedding order.

use crate::error::Result;
use crate::image::{processable_coords, Coord, GrayImage, Parity};

const DIAGONALS: [(isize, isize); 4] = [(-1, -1), (-1, 1), (1, -1), (1, 1)];

/// A pixel's fluctuation together with its position in raster order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FluctuationRecord {
    pub coord: Coord,
    pub fluctuation: u32,
    /// Index into `processable_coords` for the same set; breaks ties.
    pub raster_index: usize,
}

/// Complexity from the up (`a`), left (`b`), right (`c`) and down (`d`)
/// neighbor values.
#[inline]
pub fn complexity_from_neighbors(a: u8, b: u8, c: u8, d: u8) -> u32 {
    let (a, b, c, d) = (a as i32, b as i32, c as i32, d as i32);
    ((a - d).abs() + (b - c).abs() + (a + c - b - d).abs() + (c + d - a - b).abs()) as u32
}

#[inline]
fn complexity_unchecked(img: &GrayImage, c: Coord) -> u32 {
    let [up, down, left, right] = img.cross(c);
    complexity_from_neighbors(up, left, right, down)
}

/// Local complexity of an interior pixel, in `[0, 1020]`.
pub fn local_complexity(img: &GrayImage, c: Coord) -> Result<u32> {
    img.check_interior(c)?;
    Ok(complexity_unchecked(img, c))
}

fn interior_diagonals(img: &GrayImage, c: Coord) -> impl Iterator<Item = Coord> + '_ {
    DIAGONALS.iter().filter_map(move |&(dr, dc)| {
        let row = c.row.checked_add_signed(dr)?;
        let col = c.col.checked_add_signed(dc)?;
        let d = Coord::new(row, col);
        img.is_interior(d).then_some(d)
    })
}

/// Complexity plus the floored mean complexity of the interior diagonal
/// neighbors. With no such neighbor the fluctuation is the complexity alone.
pub fn fluctuation(img: &GrayImage, c: Coord) -> Result<u32> {
    img.check_interior(c)?;
    let diag: Vec<u32> = interior_diagonals(img, c)
        .map(|d| complexity_unchecked(img, d))
        .collect();
    Ok(combine(complexity_unchecked(img, c), &diag))
}

#[inline]
fn combine(own: u32, diagonal: &[u32]) -> u32 {
    match diagonal.len() {
        0 => own,
        n => own + diagonal.iter().sum::<u32>() / n as u32,
    }
}

/// Fluctuation records for every processable pixel of `set`, ascending by
/// fluctuation, ties in raster order.
pub fn fluctuation_order(img: &GrayImage, set: Parity) -> Vec<FluctuationRecord> {
    let coords = processable_coords(img.dims(), set);
    let width = img.width();

    // Complexity is needed for every pixel of the set plus its diagonals,
    // which are the same set, so compute it once per coordinate.
    let mut omega = vec![0u32; img.len()];
    for &c in &coords {
        omega[c.row * width + c.col] = complexity_unchecked(img, c);
    }

    let mut records: Vec<FluctuationRecord> = coords
        .iter()
        .enumerate()
        .map(|(raster_index, &c)| {
            let mut diag = [0u32; 4];
            let mut n = 0;
            for d in interior_diagonals(img, c) {
                diag[n] = omega[d.row * width + d.col];
                n += 1;
            }
            FluctuationRecord {
                coord: c,
                fluctuation: combine(omega[c.row * width + c.col], &diag[..n]),
                raster_index,
            }
        })
        .collect();
    records.sort_unstable_by_key(|r| (r.fluctuation, r.raster_index));
    records
}
