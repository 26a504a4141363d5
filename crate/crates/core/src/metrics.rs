//! Fidelity metrics used for scoring.
//!
//! PSNR is computed over all pixels and channels jointly with an exact
//! integer error sum; a zero error reports [`PSNR_CAP`] instead of infinity.
//!
//! SSIM uses the reference parameterisation: 11×11 Gaussian window with
//! σ = 1.5, K1 = 0.01, K2 = 0.03, L = 255, evaluated at every window
//! position that fits entirely inside the image (no padding, no
//! downsampling), averaged over positions and then over the three channels.

use std::{
    collections::BTreeMap,
    io::Write,
    path::{Path, PathBuf},
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{
    error::{Error, Result},
    raw_io::{load_rgb, RgbImage},
    simulator::{file_stem, list_pngs},
};

/// PSNR reported for identical images.
pub const PSNR_CAP: f64 = 100.0;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
pub const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

fn check_same_dims(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// Sum of squared differences over every channel value.
pub fn squared_error(a: &RgbImage, b: &RgbImage) -> Result<u64> {
    check_same_dims(a, b)?;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(&p, &q)| {
            let d = p.abs_diff(q) as u64;
            d * d
        })
        .sum())
}

pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    let sse = squared_error(a, b)?;
    if sse == 0 {
        return Ok(PSNR_CAP);
    }
    let mse = sse as f64 / a.data().len() as f64;
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

/// Normalised 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut taps = [0.0; SSIM_WINDOW];
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - half;
        *t = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Valid-mode separable filtering of a `w`×`h` plane.
fn filter_valid(plane: &[f64], w: usize, h: usize, taps: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            horiz[y * ow + x] = taps.iter().zip(&row[x..]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * horiz[(y + k) * ow + x])
                .sum();
        }
    }
    out
}

fn ssim_channel(a: &RgbImage, b: &RgbImage, c: usize, taps: &[f64; SSIM_WINDOW]) -> f64 {
    let (w, h) = (a.width(), a.height());
    let x: Vec<f64> = a
        .data()
        .iter()
        .skip(c)
        .step_by(3)
        .map(|&v| v as f64)
        .collect();
    let y: Vec<f64> = b
        .data()
        .iter()
        .skip(c)
        .step_by(3)
        .map(|&v| v as f64)
        .collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();

    let mu_x = filter_valid(&x, w, h, taps);
    let mu_y = filter_valid(&y, w, h, taps);
    let e_xx = filter_valid(&xx, w, h, taps);
    let e_yy = filter_valid(&yy, w, h, taps);
    let e_xy = filter_valid(&xy, w, h, taps);

    let n = mu_x.len();
    let mut sum = 0.0;
    for i in 0..n {
        sum += ssim_from_moments(mu_x[i], mu_y[i], e_xx[i], e_yy[i], e_xy[i]);
    }
    sum / n as f64
}

#[inline]
fn ssim_from_moments(mx: f64, my: f64, exx: f64, eyy: f64, exy: f64) -> f64 {
    let vx = exx - mx * mx;
    let vy = eyy - my * my;
    let cov = exy - mx * my;
    ((2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2))
}

pub fn ssim(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_same_dims(a, b)?;
    if a.width() < SSIM_WINDOW || a.height() < SSIM_WINDOW {
        return Err(Error::TooSmall {
            width: a.width(),
            height: a.height(),
            window: SSIM_WINDOW,
        });
    }
    let taps = gaussian_taps();
    let total: f64 = (0..3).map(|c| ssim_channel(a, b, c, &taps)).sum();
    Ok(total / 3.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub name: String,
    pub psnr: f64,
    pub ssim: f64,
}

/// Per-image scores plus their arithmetic means.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub psnr: f64,
    pub ssim: f64,
    pub images: Vec<ImageScore>,
}

impl MetricReport {
    /// Aggregates scores in the order given.
    pub fn from_images(images: Vec<ImageScore>) -> Self {
        let n = images.len().max(1) as f64;
        let psnr = images.iter().map(|s| s.psnr).sum::<f64>() / n;
        let ssim = images.iter().map(|s| s.ssim).sum::<f64>() / n;
        Self { psnr, ssim, images }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// One row per image followed by a `mean` row.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "name,psnr,ssim")?;
        for s in &self.images {
            writeln!(out, "{},{:.6},{:.6}", csv_field(&s.name), s.psnr, s.ssim)?;
        }
        writeln!(out, "mean,{:.6},{:.6}", self.psnr, self.ssim)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn score_images(name: &str, result: &RgbImage, label: &RgbImage) -> Result<ImageScore> {
    Ok(ImageScore {
        name: name.to_owned(),
        psnr: psnr(result, label)?,
        ssim: ssim(result, label)?,
    })
}

pub fn score_pair(result: &Path, label: &Path) -> Result<MetricReport> {
    let r = load_rgb(result)?;
    let l = load_rgb(label)?;
    let score = score_images(&file_stem(label), &r, &l).map_err(|e| e.in_file(result))?;
    Ok(MetricReport::from_images(vec![score]))
}

/// Scores every label PNG against the result PNG with the same file stem.
/// A label without a result, or a result without a label, is an error.
pub fn score_set(results_dir: &Path, labels_dir: &Path) -> Result<MetricReport> {
    let by_stem = |dir: &Path| -> Result<BTreeMap<String, PathBuf>> {
        Ok(list_pngs(dir)?
            .into_iter()
            .map(|p| (file_stem(&p), p))
            .collect())
    };
    let results = by_stem(results_dir)?;
    let labels = by_stem(labels_dir)?;
    if let Some(stem) = labels.keys().find(|k| !results.contains_key(*k)) {
        return Err(Error::MissingResult(stem.clone()));
    }
    if let Some(stem) = results.keys().find(|k| !labels.contains_key(*k)) {
        return Err(Error::ExtraResult(stem.clone()));
    }
    let pairs: Vec<(&String, &PathBuf)> = labels.iter().collect();
    let images = pairs
        .par_iter()
        .map(|(stem, label)| {
            let result = &results[*stem];
            let r = load_rgb(result)?;
            let l = load_rgb(label)?;
            score_images(stem, &r, &l).map_err(|e| e.in_file(result))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricReport::from_images(images))
}
