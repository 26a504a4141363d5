//! Event pixel inpainting: each event position takes the rounded mean of
//! the non-event pixels of its cell color within the neighborhood radius.
//!
//! Frames too small to hold such a neighbor fall back to the global mean of
//! that color, then to the global mean of all color pixels.

use rayon::prelude::*;

use super::{
    check_mask,
    neighborhood::{global_color_means, global_mean, SameColorNeighbors},
};
use crate::{
    error::Result,
    pattern::PatternSpec,
    raw_io::{MaskImage, RawImage},
    util::rounded_mean,
};

pub fn inpaint_events(
    raw: &RawImage,
    events: &MaskImage,
    spec: &PatternSpec,
    radius: usize,
) -> Result<RawImage> {
    check_mask(raw, events)?;
    let neighbors = SameColorNeighbors::new(spec, radius);
    let w = raw.width();
    // Only reached on frames too small to hold a same-color neighbor.
    let fallback = std::sync::OnceLock::new();

    let mut out = raw.samples().to_vec();
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, v) in row.iter_mut().enumerate() {
            if !events.get(x, y) {
                continue;
            }
            let (mut sum, mut count) = (0u64, 0u64);
            neighbors.for_each(raw, events, x, y, |n| {
                sum += n as u64;
                count += 1;
            });
            *v = if count > 0 {
                rounded_mean(sum, count)
            } else {
                let (means, any) = fallback.get_or_init(|| {
                    (
                        global_color_means(raw, events, spec, false),
                        global_mean(raw, events, spec),
                    )
                });
                let c = spec.underlying_color(x, y).channel().unwrap();
                means[c].or(*any).unwrap_or(0)
            };
        }
    });
    RawImage::new(w, raw.height(), out)
}
