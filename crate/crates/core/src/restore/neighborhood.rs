use crate::{pattern::PatternSpec, pattern::TILE, raw_io::MaskImage, raw_io::RawImage};

/// Same-color neighbor offsets for each of the 16 tile phases.
///
/// An offset `(dx, dy)` is listed for phase `(px, py)` when it lies within
/// the Chebyshev radius, is not the origin, and lands on a pixel whose cell
/// color equals the origin's. Whether the neighbor is an event pixel or in
/// bounds is decided per frame by [`SameColorNeighbors::for_each`].
#[derive(Clone, Debug)]
pub(crate) struct SameColorNeighbors {
    offsets: Vec<Vec<(isize, isize)>>,
}

impl SameColorNeighbors {
    pub fn new(spec: &PatternSpec, radius: usize) -> Self {
        let r = radius as isize;
        let mut offsets = Vec::with_capacity(TILE * TILE);
        for py in 0..TILE {
            for px in 0..TILE {
                let color = spec.underlying_color(px, py);
                let mut list = Vec::new();
                for dy in -r..=r {
                    for dx in -r..=r {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = (px as isize + dx).rem_euclid(TILE as isize) as usize;
                        let ny = (py as isize + dy).rem_euclid(TILE as isize) as usize;
                        if spec.underlying_color(nx, ny) == color {
                            list.push((dx, dy));
                        }
                    }
                }
                offsets.push(list);
            }
        }
        Self { offsets }
    }

    /// Calls `f` with every in-bounds, non-event same-color neighbor value
    /// of (`x`, `y`).
    #[inline]
    pub fn for_each(
        &self,
        raw: &RawImage,
        events: &MaskImage,
        x: usize,
        y: usize,
        mut f: impl FnMut(u16),
    ) {
        let (w, h) = (raw.width() as isize, raw.height() as isize);
        for &(dx, dy) in &self.offsets[(y % TILE) * TILE + x % TILE] {
            let nx = x as isize + dx;
            let ny = y as isize + dy;
            if nx < 0 || ny < 0 || nx >= w || ny >= h {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if events.get(nx, ny) {
                continue;
            }
            f(raw.get(nx, ny));
        }
    }
}

/// Mean of all non-event samples of each cell color (index by channel),
/// optionally skipping zeros. `None` when a color has no such sample.
pub(crate) fn global_color_means(
    raw: &RawImage,
    events: &MaskImage,
    spec: &PatternSpec,
    skip_zero: bool,
) -> [Option<u16>; 3] {
    color_sums(raw, events, spec, skip_zero)
        .map(|(sum, count)| (count > 0).then(|| crate::util::rounded_mean(sum, count)))
}

/// Mean of every non-event sample regardless of color.
pub(crate) fn global_mean(raw: &RawImage, events: &MaskImage, spec: &PatternSpec) -> Option<u16> {
    let (sum, count) = color_sums(raw, events, spec, false)
        .iter()
        .fold((0, 0), |(s, n), &(a, b)| (s + a, n + b));
    (count > 0).then(|| crate::util::rounded_mean(sum, count))
}

fn color_sums(
    raw: &RawImage,
    events: &MaskImage,
    spec: &PatternSpec,
    skip_zero: bool,
) -> [(u64, u64); 3] {
    let mut sum = [0u64; 3];
    let mut count = [0u64; 3];
    for y in 0..raw.height() {
        for x in 0..raw.width() {
            let v = raw.get(x, y);
            if events.get(x, y) || (skip_zero && v == 0) {
                continue;
            }
            let c = spec.underlying_color(x, y).channel().unwrap();
            sum[c] += v as u64;
            count[c] += 1;
        }
    }
    std::array::from_fn(|c| (sum[c], count[c]))
}
