//! Decomposition of a raw frame into 16 quarter-resolution planes, one per
//! position of the 4×4 tile.

use crate::{
    pattern::{PatternSpec, TILE},
    raw_io::RawImage,
    util::reflect,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelStack {
    width: usize,
    height: usize,
    plane_width: usize,
    plane_height: usize,
    /// Plane `ty * 4 + tx` holds the samples at tile position (row ty, col tx).
    planes: Vec<Vec<u16>>,
}

impl ChannelStack {
    /// Width of the frame this stack was unpacked from.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn plane_width(&self) -> usize {
        self.plane_width
    }

    pub fn plane_height(&self) -> usize {
        self.plane_height
    }

    /// Plane for tile position (row `ty`, col `tx`).
    pub fn plane(&self, ty: usize, tx: usize) -> &[u16] {
        &self.planes[ty * TILE + tx]
    }

    pub fn planes(&self) -> &[Vec<u16>] {
        &self.planes
    }

    /// Indices of the 14 planes that carry color rather than events.
    pub fn color_plane_indices(spec: &PatternSpec) -> Vec<usize> {
        (0..TILE * TILE)
            .filter(|&i| !spec.is_event(i % TILE, i / TILE))
            .collect()
    }
}

/// Splits a frame into tile-position planes. Frames whose sides are not
/// multiples of 4 are reflect-padded first; [`pack`] crops the padding off.
pub fn unpack(raw: &RawImage) -> ChannelStack {
    let (w, h) = (raw.width(), raw.height());
    let pw = w.div_ceil(TILE);
    let ph = h.div_ceil(TILE);
    let mut planes: Vec<Vec<u16>> = (0..TILE * TILE)
        .map(|_| Vec::with_capacity(pw * ph))
        .collect();
    for (i, plane) in planes.iter_mut().enumerate() {
        let (ty, tx) = (i / TILE, i % TILE);
        for py in 0..ph {
            let y = reflect((py * TILE + ty) as isize, h);
            for px in 0..pw {
                let x = reflect((px * TILE + tx) as isize, w);
                plane.push(raw.get(x, y));
            }
        }
    }
    ChannelStack {
        width: w,
        height: h,
        plane_width: pw,
        plane_height: ph,
        planes,
    }
}

/// Inverse of [`unpack`].
pub fn pack(stack: &ChannelStack) -> RawImage {
    RawImage::from_fn(stack.width, stack.height, |x, y| {
        let plane = &stack.planes[(y % TILE) * TILE + x % TILE];
        plane[(y / TILE) * stack.plane_width + x / TILE]
    })
}
