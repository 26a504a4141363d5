//! Quad Bayer to RGGB Bayer remosaic by pixel permutation.
//!
//! Within every 4×4 tile, each Bayer target position takes the sample of a
//! source position with the same cell color. The permutation minimises the
//! summed squared displacement; it is found per color by exhaustive search
//! (at most 8! candidates), first lexicographic minimum wins.

use rayon::prelude::*;

use crate::{
    pattern::{PatternSpec, PixelClass, TILE},
    raw_io::RawImage,
};

/// RGGB Bayer color at (x, y).
#[inline]
pub fn bayer_color(x: usize, y: usize) -> PixelClass {
    match (y % 2, x % 2) {
        (0, 0) => PixelClass::Red,
        (1, 1) => PixelClass::Blue,
        _ => PixelClass::Green,
    }
}

/// `source[t]` is the tile index (`row * 4 + col`) whose sample moves to
/// target index `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RemosaicTable {
    source: [usize; TILE * TILE],
}

/// Table for the default pattern (red cell top-left). It swaps five pairs
/// and leaves six positions in place.
pub const DEFAULT_TABLE: [usize; 16] = [0, 2, 1, 3, 8, 10, 6, 11, 4, 9, 5, 7, 12, 14, 13, 15];

fn sq_dist(a: usize, b: usize) -> usize {
    let (ay, ax) = ((a / TILE) as isize, (a % TILE) as isize);
    let (by, bx) = ((b / TILE) as isize, (b % TILE) as isize);
    ((ay - by).pow(2) + (ax - bx).pow(2)) as usize
}

/// Rearranges `v` into the next lexicographic permutation; false when `v`
/// was the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

impl RemosaicTable {
    pub fn new(spec: &PatternSpec) -> Self {
        let mut source = [usize::MAX; TILE * TILE];
        for color in [PixelClass::Red, PixelClass::Green, PixelClass::Blue] {
            let targets: Vec<usize> = (0..TILE * TILE)
                .filter(|&t| bayer_color(t % TILE, t / TILE) == color)
                .collect();
            let mut sources: Vec<usize> = (0..TILE * TILE)
                .filter(|&s| spec.underlying_color(s % TILE, s / TILE) == color)
                .collect();
            debug_assert_eq!(targets.len(), sources.len());

            let mut best = sources.clone();
            let mut best_cost = usize::MAX;
            loop {
                let cost: usize = targets
                    .iter()
                    .zip(&sources)
                    .map(|(&t, &s)| sq_dist(t, s))
                    .sum();
                if cost < best_cost {
                    best_cost = cost;
                    best.copy_from_slice(&sources);
                }
                if !next_permutation(&mut sources) {
                    break;
                }
            }
            for (&t, &s) in targets.iter().zip(&best) {
                source[t] = s;
            }
        }
        Self { source }
    }

    pub fn source(&self) -> &[usize; TILE * TILE] {
        &self.source
    }

    /// Summed squared displacement of the permutation.
    pub fn cost(&self) -> usize {
        self.source
            .iter()
            .enumerate()
            .map(|(t, &s)| sq_dist(t, s))
            .sum()
    }
}

/// Source coordinate for target (x, y). Near the right/bottom edge of a
/// frame whose sides are not multiples of 4 the source may fall outside;
/// it then steps back whole tiles, and failing that (frames narrower than
/// the source phase) uses the nearest in-bounds pixel of the same color.
/// Frames without any pixel of that color keep the target's own sample.
fn source_coord(
    table: &RemosaicTable,
    spec: &PatternSpec,
    w: usize,
    h: usize,
    x: usize,
    y: usize,
) -> (usize, usize) {
    let s = table.source[(y % TILE) * TILE + x % TILE];
    let sx = x - x % TILE + s % TILE;
    let sy = y - y % TILE + s / TILE;
    let step_back = |v: usize, len: usize| {
        if v < len {
            Some(v)
        } else {
            let back = (v - len) / TILE + 1;
            v.checked_sub(back * TILE)
        }
    };
    if let (Some(sx), Some(sy)) = (step_back(sx, w), step_back(sy, h)) {
        return (sx, sy);
    }
    let color = spec.underlying_color(s % TILE, s / TILE);
    let mut best: Option<((usize, usize), usize)> = None;
    for cy in 0..h {
        for cx in 0..w {
            if spec.underlying_color(cx, cy) != color {
                continue;
            }
            let d = cx.abs_diff(x).pow(2) + cy.abs_diff(y).pow(2);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some(((cx, cy), d));
            }
        }
    }
    best.map_or((x, y), |(p, _)| p)
}

/// Permutes an inpainted Quad Bayer frame into RGGB Bayer order.
pub fn remosaic_quad_to_bayer(raw: &RawImage, spec: &PatternSpec) -> RawImage {
    remosaic_with(raw, spec, &RemosaicTable::new(spec))
}

pub fn remosaic_with(raw: &RawImage, spec: &PatternSpec, table: &RemosaicTable) -> RawImage {
    let (w, h) = (raw.width(), raw.height());
    let full_w = w - w % TILE;
    let full_h = h - h % TILE;
    let mut out = vec![0u16; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, v) in row.iter_mut().enumerate() {
            *v = if x < full_w && y < full_h {
                let s = table.source[(y % TILE) * TILE + x % TILE];
                raw.get(x - x % TILE + s % TILE, y - y % TILE + s / TILE)
            } else {
                let (sx, sy) = source_coord(table, spec, w, h, x, y);
                raw.get(sx, sy)
            };
        }
    });
    RawImage::new(w, h, out).expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_is_frozen() {
        let table = RemosaicTable::new(&PatternSpec::default());
        assert_eq!(table.source(), &DEFAULT_TABLE);
        assert_eq!(table.cost(), 12);
    }

    #[test]
    fn table_maps_colors_to_bayer() {
        let spec = PatternSpec::default();
        let table = RemosaicTable::new(&spec);
        let mut seen = [false; 16];
        for (t, &s) in table.source().iter().enumerate() {
            assert_eq!(
                bayer_color(t % 4, t / 4),
                spec.underlying_color(s % 4, s / 4)
            );
            assert!(!seen[s]);
            seen[s] = true;
        }
    }

    #[test]
    fn constant_stays_constant() {
        let spec = PatternSpec::default();
        for (w, h) in [(8, 8), (7, 5), (2, 3), (1, 1), (13, 6)] {
            let raw = RawImage::filled(w, h, 345).unwrap();
            assert_eq!(remosaic_quad_to_bayer(&raw, &spec), raw, "{w}x{h}");
        }
    }

    #[test]
    fn partial_tiles_keep_bayer_colors() {
        // Output samples near ragged edges must come from pixels of the
        // right color.
        let spec = PatternSpec::default();
        let (w, h) = (10, 7);
        let raw = RawImage::from_fn(w, h, |x, y| (y * w + x) as u16);
        let out = remosaic_quad_to_bayer(&raw, &spec);
        for y in 0..h {
            for x in 0..w {
                let v = out.get(x, y) as usize;
                let (sx, sy) = (v % w, v / w);
                assert_eq!(
                    spec.underlying_color(sx, sy),
                    bayer_color(x, y),
                    "({x},{y})"
                );
            }
        }
    }

    #[test]
    fn next_permutation_counts() {
        let mut v = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(v, vec![3, 2, 1, 0]);
    }
}
