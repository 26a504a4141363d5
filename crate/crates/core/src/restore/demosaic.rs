//! RGGB Bayer demosaicing.
//!
//! Two interpolators are available: per-channel bilinear and the 5×5
//! gradient-corrected linear filters of Malvar, He and Cutler. Borders are
//! reflect-padded, which keeps the Bayer phase of mirrored samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{
    raw_io::{raw_f64_to_u8, RawImage, RgbImage},
    util::reflect,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemosaicMode {
    Bilinear,
    #[default]
    #[serde(alias = "gradient-corrected-linear")]
    GradientCorrected,
}

impl std::str::FromStr for DemosaicMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "bilinear" => Ok(DemosaicMode::Bilinear),
            "gradient-corrected" | "gradient-corrected-linear" | "gcl" | "malvar" => {
                Ok(DemosaicMode::GradientCorrected)
            }
            other => Err(crate::Error::InvalidConfig(format!(
                "unknown demosaic mode '{other}'"
            ))),
        }
    }
}

/// Interpolated channels in 10-bit units, before clamping and quantisation.
#[derive(Clone, Debug, PartialEq)]
pub struct RgbPlanes {
    pub width: usize,
    pub height: usize,
    /// Interleaved `r, g, b` per pixel, row-major.
    pub data: Vec<f64>,
}

impl RgbPlanes {
    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Scales to 8 bits (round half away from zero) and clamps to [0, 255].
    pub fn to_rgb8(&self) -> RgbImage {
        RgbImage::new(
            self.width,
            self.height,
            self.data.iter().map(|&v| raw_f64_to_u8(v)).collect(),
        )
        .expect("dimensions preserved")
    }
}

struct Window<'a> {
    raw: &'a RawImage,
    x: isize,
    y: isize,
}

impl Window<'_> {
    #[inline]
    fn at(&self, dx: isize, dy: isize) -> f64 {
        let x = reflect(self.x + dx, self.raw.width());
        let y = reflect(self.y + dy, self.raw.height());
        self.raw.get(x, y) as f64
    }

    #[inline]
    fn cross(&self, d: isize) -> f64 {
        self.at(0, -d) + self.at(0, d) + self.at(-d, 0) + self.at(d, 0)
    }

    #[inline]
    fn horizontal(&self, d: isize) -> f64 {
        self.at(-d, 0) + self.at(d, 0)
    }

    #[inline]
    fn vertical(&self, d: isize) -> f64 {
        self.at(0, -d) + self.at(0, d)
    }

    #[inline]
    fn diagonal(&self) -> f64 {
        self.at(-1, -1) + self.at(1, -1) + self.at(-1, 1) + self.at(1, 1)
    }
}

fn bilinear_pixel(win: &Window<'_>, x: usize, y: usize) -> [f64; 3] {
    let c = win.at(0, 0);
    match (y % 2, x % 2) {
        (0, 0) => [c, win.cross(1) / 4.0, win.diagonal() / 4.0],
        (1, 1) => [win.diagonal() / 4.0, win.cross(1) / 4.0, c],
        (0, _) => [win.horizontal(1) / 2.0, c, win.vertical(1) / 2.0],
        _ => [win.vertical(1) / 2.0, c, win.horizontal(1) / 2.0],
    }
}

fn gradient_corrected_pixel(win: &Window<'_>, x: usize, y: usize) -> [f64; 3] {
    let c = win.at(0, 0);
    // green at a red or blue site
    let g_at_rb = || (4.0 * c + 2.0 * win.cross(1) - win.cross(2)) / 8.0;
    // red/blue at the opposite chroma site
    let rb_at_br = || (6.0 * c + 2.0 * win.diagonal() - 1.5 * win.cross(2)) / 8.0;
    // chroma at a green site whose same-chroma neighbors are left/right
    let along_row = || {
        (5.0 * c + 4.0 * win.horizontal(1) - win.diagonal() - win.horizontal(2)
            + 0.5 * win.vertical(2))
            / 8.0
    };
    // chroma at a green site whose same-chroma neighbors are above/below
    let along_col = || {
        (5.0 * c + 4.0 * win.vertical(1) - win.diagonal() - win.vertical(2)
            + 0.5 * win.horizontal(2))
            / 8.0
    };
    match (y % 2, x % 2) {
        (0, 0) => [c, g_at_rb(), rb_at_br()],
        (1, 1) => [rb_at_br(), g_at_rb(), c],
        (0, _) => [along_row(), c, along_col()],
        _ => [along_col(), c, along_row()],
    }
}

/// Interpolates all three channels at every pixel, unclamped.
pub fn demosaic_planes(raw: &RawImage, mode: DemosaicMode) -> RgbPlanes {
    let (w, h) = (raw.width(), raw.height());
    let mut data = vec![0.0f64; w * h * 3];
    data.par_chunks_mut(w * 3).enumerate().for_each(|(y, row)| {
        for x in 0..w {
            let win = Window {
                raw,
                x: x as isize,
                y: y as isize,
            };
            let px = match mode {
                DemosaicMode::Bilinear => bilinear_pixel(&win, x, y),
                DemosaicMode::GradientCorrected => gradient_corrected_pixel(&win, x, y),
            };
            row[x * 3..x * 3 + 3].copy_from_slice(&px);
        }
    });
    RgbPlanes {
        width: w,
        height: h,
        data,
    }
}

/// Demosaics an RGGB frame to 8-bit RGB.
pub fn demosaic_bayer(raw: &RawImage, mode: DemosaicMode) -> RgbImage {
    demosaic_planes(raw, mode).to_rgb8()
}
