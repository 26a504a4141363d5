//! Defect pixel correction.
//!
//! Two detectors are provided. The zero mask treats every non-event sample
//! that reads exactly 0 as dead. The median detector flags any non-event
//! sample that strays from the median of its same-color neighborhood by
//! more than a threshold, which also catches hot pixels.
//!
//! Both read neighbors from the stage input only, so every output pixel is
//! independent of the others and rows are processed in parallel.

use rayon::prelude::*;

use super::neighborhood::{global_color_means, SameColorNeighbors};
use crate::{
    error::Result,
    pattern::PatternSpec,
    raw_io::{MaskImage, RawImage},
    util::{median, rounded_mean},
};

use super::check_mask;

/// Replaces zero-valued non-event samples with the rounded mean of their
/// non-zero same-color neighbors within `radius`.
///
/// When no such neighbor exists the global mean of non-zero same-color
/// samples is used, and 0 if there is none.
pub fn dpc_zero_mask(
    raw: &RawImage,
    events: &MaskImage,
    spec: &PatternSpec,
    radius: usize,
) -> Result<RawImage> {
    check_mask(raw, events)?;
    let neighbors = SameColorNeighbors::new(spec, radius);
    let w = raw.width();
    let fallback = std::sync::OnceLock::new();

    let mut out = raw.samples().to_vec();
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, v) in row.iter_mut().enumerate() {
            if *v != 0 || events.get(x, y) {
                continue;
            }
            let (mut sum, mut count) = (0u64, 0u64);
            neighbors.for_each(raw, events, x, y, |n| {
                if n != 0 {
                    sum += n as u64;
                    count += 1;
                }
            });
            *v = if count > 0 {
                rounded_mean(sum, count)
            } else {
                let means = fallback.get_or_init(|| global_color_means(raw, events, spec, true));
                let c = spec.underlying_color(x, y).channel().unwrap();
                means[c].unwrap_or(0)
            };
        }
    });
    RawImage::new(w, raw.height(), out)
}

/// Flags non-event samples with `|value - median| > threshold` and replaces
/// them by that median. Returns the corrected frame and the flag mask.
pub fn dpc_median_deviation(
    raw: &RawImage,
    events: &MaskImage,
    spec: &PatternSpec,
    threshold: u16,
    radius: usize,
) -> Result<(RawImage, MaskImage)> {
    check_mask(raw, events)?;
    let neighbors = SameColorNeighbors::new(spec, radius);
    let w = raw.width();

    let mut out = raw.samples().to_vec();
    let mut flags = vec![false; out.len()];
    out.par_chunks_mut(w)
        .zip(flags.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (row, flag_row))| {
            let mut buf = Vec::new();
            for x in 0..row.len() {
                if events.get(x, y) {
                    continue;
                }
                buf.clear();
                neighbors.for_each(raw, events, x, y, |n| buf.push(n));
                if buf.is_empty() {
                    continue;
                }
                let m = median(&mut buf);
                if row[x].abs_diff(m) > threshold {
                    row[x] = m;
                    flag_row[x] = true;
                }
            }
        });
    Ok((
        RawImage::new(w, raw.height(), out)?,
        MaskImage::from_bits(w, raw.height(), flags)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{inject_defects, mosaic, smooth_scene, DefectMode, DefectModel};

    fn spec() -> PatternSpec {
        PatternSpec::default()
    }

    #[test]
    fn zero_mask_identity_without_zeros() {
        let s = spec();
        let events = s.event_mask(12, 8);
        let raw = RawImage::from_fn(12, 8, |x, y| {
            if s.is_event(x, y) {
                0
            } else {
                (1 + x * 13 + y * 7) as u16
            }
        });
        assert_eq!(dpc_zero_mask(&raw, &events, &s, 4).unwrap(), raw);
    }

    #[test]
    fn zero_mask_hand_neighborhood() {
        // Radius 1 around the red pixel (0,0): its cell mates are (1,0),
        // (0,1) and the event at (1,1); only the first two count.
        let s = spec();
        let events = s.event_mask(4, 4);
        let mut raw = RawImage::from_fn(4, 4, |x, y| if s.is_event(x, y) { 0 } else { 500 });
        raw.set(0, 0, 0);
        raw.set(1, 0, 100);
        raw.set(0, 1, 104);
        let out = dpc_zero_mask(&raw, &events, &s, 1).unwrap();
        assert_eq!(out.get(0, 0), 102);
        for y in 0..4 {
            for x in 0..4 {
                if (x, y) != (0, 0) {
                    assert_eq!(out.get(x, y), raw.get(x, y));
                }
            }
        }
    }

    #[test]
    fn zero_mask_all_zero_image() {
        let s = spec();
        let raw = RawImage::filled(9, 7, 0).unwrap();
        let out = dpc_zero_mask(&raw, &s.event_mask(9, 7), &s, 4).unwrap();
        assert_eq!(out, raw);
    }

    #[test]
    fn zero_mask_global_fallback() {
        // 3x1 frame: two red cell mates and one green pixel.
        let s = spec();
        let raw = RawImage::new(3, 1, vec![0, 40, 0]).unwrap();
        let events = s.event_mask(3, 1);
        // (0,0) and (1,0) are red cell mates; radius 1 reaches (1,0) = 40
        let out = dpc_zero_mask(&raw, &events, &s, 1).unwrap();
        assert_eq!(out.get(0, 0), 40);
        // (2,0) is the only green pixel and zero; the global mean is empty
        assert_eq!(out.get(2, 0), 0);
    }

    #[test]
    fn median_clean_constant() {
        let s = spec();
        let raw = RawImage::from_fn(16, 16, |x, y| if s.is_event(x, y) { 0 } else { 300 });
        let (out, flags) = dpc_median_deviation(&raw, &s.event_mask(16, 16), &s, 64, 4).unwrap();
        assert_eq!(flags.count(), 0);
        assert_eq!(out, raw);
    }

    #[test]
    fn median_hot_pixel() {
        let s = spec();
        let mut raw = RawImage::from_fn(16, 16, |x, y| if s.is_event(x, y) { 0 } else { 100 });
        raw.set(6, 5, 1023);
        let (out, flags) = dpc_median_deviation(&raw, &s.event_mask(16, 16), &s, 64, 4).unwrap();
        assert_eq!(flags.count(), 1);
        assert!(flags.get(6, 5));
        assert_eq!(out.get(6, 5), 100);
    }

    #[test]
    fn median_recalls_stuck_high_defects() {
        let s = spec();
        for seed in 0..5 {
            let rgb = smooth_scene(64, 48, seed);
            let clean = mosaic(&rgb, &s);
            let events = s.event_mask(64, 48);
            let model = DefectModel::new(0.01, DefectMode::StuckHigh, seed).unwrap();
            let (raw, injected) = inject_defects(&clean, &events, &model).unwrap();
            let (_, flags) = dpc_median_deviation(&raw, &events, &s, 64, 4).unwrap();
            assert!(flags.contains(&injected), "seed {seed}");
        }
    }

    #[test]
    fn mask_dimension_checked() {
        let s = spec();
        let raw = RawImage::filled(8, 8, 1).unwrap();
        assert!(dpc_zero_mask(&raw, &s.event_mask(4, 8), &s, 4).is_err());
    }
}
