//! Synthesis of HybridEVS raw inputs from RGB ground truth.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with a `u64`, so a seed
//! fully determines every output across runs and platforms.

use std::{
    fs,
    path::{Path, PathBuf},
};

use rand::{seq::index, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{
    error::{Error, Result},
    pattern::PatternSpec,
    raw_io::{self, Manifest, ManifestEntry, MaskImage, RawImage, RgbImage},
    RAW_MAX,
};

/// How a defective pixel reads out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectMode {
    /// Dead pixel, reads 0.
    StuckLow,
    /// Hot pixel, reads 1023.
    StuckHigh,
    /// Reads a uniformly random 10-bit value.
    UniformRandom,
}

impl std::str::FromStr for DefectMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stuck-low" | "low" => Ok(DefectMode::StuckLow),
            "stuck-high" | "high" => Ok(DefectMode::StuckHigh),
            "uniform-random" | "uniform" | "random" => Ok(DefectMode::UniformRandom),
            other => Err(Error::InvalidConfig(format!(
                "unknown defect mode '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectModel {
    /// Fraction of non-event pixels that are defective.
    pub density: f64,
    pub mode: DefectMode,
    pub seed: u64,
}

impl Default for DefectModel {
    fn default() -> Self {
        Self {
            density: 0.001,
            mode: DefectMode::UniformRandom,
            seed: 0,
        }
    }
}

impl DefectModel {
    pub fn new(density: f64, mode: DefectMode, seed: u64) -> Result<Self> {
        let model = Self {
            density,
            mode,
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::InvalidConfig(format!(
                "defect density {} outside [0, 1]",
                self.density
            )));
        }
        Ok(())
    }

    /// Number of defects injected among `candidates` non-event pixels.
    pub fn defect_count(&self, candidates: usize) -> usize {
        (self.density * candidates as f64).round() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulatedPair {
    pub input: RawImage,
    pub label: RgbImage,
    pub defects: MaskImage,
    pub events: MaskImage,
}

/// Samples an RGB image through the HybridEVS filter: every color pixel
/// keeps the channel of its cell (scaled to 10 bits), event pixels read 0.
pub fn mosaic(rgb: &RgbImage, spec: &PatternSpec) -> RawImage {
    RawImage::from_fn(rgb.width(), rgb.height(), |x, y| {
        match spec.classify(x, y).channel() {
            Some(c) => raw_io::u8_to_raw(rgb.pixel(x, y)[c]),
            None => 0,
        }
    })
}

/// Overwrites `round(density * n)` non-event pixels, drawn uniformly without
/// replacement, and returns the altered frame with a mask of the altered
/// positions.
pub fn inject_defects(
    raw: &RawImage,
    events: &MaskImage,
    model: &DefectModel,
) -> Result<(RawImage, MaskImage)> {
    model.validate()?;
    let (w, h) = (raw.width(), raw.height());
    if !events.same_dims(w, h) {
        return Err(Error::DimensionMismatch(format!(
            "event mask {}x{} vs frame {w}x{h}",
            events.width(),
            events.height()
        )));
    }
    let candidates: Vec<usize> = events
        .bits()
        .iter()
        .enumerate()
        .filter_map(|(i, &e)| (!e).then_some(i))
        .collect();
    let count = model.defect_count(candidates.len());

    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut chosen: Vec<usize> = index::sample(&mut rng, candidates.len(), count)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    chosen.sort_unstable();

    let mut samples = raw.samples().to_vec();
    let mut mask = vec![false; w * h];
    for i in chosen {
        samples[i] = match model.mode {
            DefectMode::StuckLow => 0,
            DefectMode::StuckHigh => RAW_MAX,
            DefectMode::UniformRandom => rng.gen_range(0..=RAW_MAX),
        };
        mask[i] = true;
    }
    Ok((
        RawImage::new(w, h, samples)?,
        MaskImage::from_bits(w, h, mask)?,
    ))
}

/// Geometric transform drawn by [`augment`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Augmentation {
    /// Clockwise quarter turns, 0..4.
    pub quarter_turns: u8,
    /// Horizontal flip applied after the rotation.
    pub flip: bool,
}

impl Augmentation {
    pub fn draw(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            quarter_turns: rng.gen_range(0..4),
            flip: rng.gen_bool(0.5),
        }
    }

    pub fn apply(&self, img: &RgbImage) -> RgbImage {
        let rotated = img.rotate90(self.quarter_turns);
        if self.flip {
            rotated.flip_horizontal()
        } else {
            rotated
        }
    }

    pub fn is_identity(&self) -> bool {
        self.quarter_turns == 0 && !self.flip
    }
}

/// Mosaics a label and injects defects without any geometric transform.
pub fn simulate(
    label: &RgbImage,
    spec: &PatternSpec,
    model: &DefectModel,
) -> Result<SimulatedPair> {
    let clean = mosaic(label, spec);
    let events = spec.event_mask(label.width(), label.height());
    let (input, defects) = inject_defects(&clean, &events, model)?;
    Ok(SimulatedPair {
        input,
        label: label.clone(),
        defects,
        events,
    })
}

/// Random rotation and flip of the label (drawn from `seed`), then mosaic
/// and defect injection (drawn from `model.seed`). The returned label is the
/// transformed image, aligned with the input.
pub fn augment(
    label: &RgbImage,
    spec: &PatternSpec,
    model: &DefectModel,
    seed: u64,
) -> Result<SimulatedPair> {
    let transformed = Augmentation::draw(seed).apply(label);
    simulate(&transformed, spec, model)
}

#[derive(Clone, Debug)]
pub struct DatasetOptions {
    pub spec: PatternSpec,
    pub model: DefectModel,
    pub augment: bool,
}

const AUGMENT_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Per-scene seeds: `seed ^ index` for defects, salted for the transform.
pub fn scene_seeds(seed: u64, index: usize) -> (u64, u64) {
    let base = seed ^ index as u64;
    (base, base ^ AUGMENT_SALT)
}

/// Simulates every `*.png` in `labels_dir` (sorted by file name) into
/// `out_dir`, writing `inputs/*.bin`, `labels/*.png`, `masks/*_defects.png`,
/// `masks/*_events.png` and `manifest.json`.
///
/// Scenes are processed in parallel; each uses seeds derived from its index
/// in the sorted listing, so the output does not depend on thread count.
pub fn generate_dataset(
    labels_dir: &Path,
    out_dir: &Path,
    opts: &DatasetOptions,
) -> Result<Manifest> {
    opts.model.validate()?;
    let labels = list_pngs(labels_dir)?;
    for sub in ["inputs", "labels", "masks"] {
        let d = out_dir.join(sub);
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }

    let scenes = labels
        .par_iter()
        .enumerate()
        .map(|(i, path)| -> Result<ManifestEntry> {
            let name = file_stem(path);
            let label = raw_io::load_rgb(path)?;
            let (defect_seed, aug_seed) = scene_seeds(opts.model.seed, i);
            let model = DefectModel {
                seed: defect_seed,
                ..opts.model
            };
            let pair = if opts.augment {
                augment(&label, &opts.spec, &model, aug_seed)?
            } else {
                simulate(&label, &opts.spec, &model)?
            };
            let entry = ManifestEntry {
                raw: PathBuf::from("inputs").join(format!("{name}.bin")),
                label: PathBuf::from("labels").join(format!("{name}.png")),
                defects: Some(PathBuf::from("masks").join(format!("{name}_defects.png"))),
                events: Some(PathBuf::from("masks").join(format!("{name}_events.png"))),
                width: pair.input.width(),
                height: pair.input.height(),
                name,
            };
            raw_io::save_raw(out_dir.join(&entry.raw), &pair.input)?;
            raw_io::save_rgb(out_dir.join(&entry.label), &pair.label)?;
            raw_io::save_mask(out_dir.join(entry.defects.as_ref().unwrap()), &pair.defects)?;
            raw_io::save_mask(out_dir.join(entry.events.as_ref().unwrap()), &pair.events)?;
            Ok(entry)
        })
        .collect::<Result<Vec<_>>>()?;

    let manifest = Manifest {
        pattern: Some(opts.spec.to_string()),
        seed: Some(opts.model.seed),
        scenes,
    };
    manifest.save(out_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Sorted list of `*.png` files directly inside `dir`.
pub fn list_pngs(dir: &Path) -> Result<Vec<PathBuf>> {
    list_with_extension(dir, "png")
}

pub(crate) fn list_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let matches = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case(ext));
        if path.is_file() && matches {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub(crate) fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Smooth synthetic RGB scene drawn from `seed`: a low-frequency luminance
/// field of gradients and waves shared by all channels, with a per-channel
/// gain, offset and slow chroma ramp. Used for self-contained experiments
/// and benchmarks.
pub fn smooth_scene(width: usize, height: usize, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut luma = [0.0f64; 6];
    for p in luma.iter_mut() {
        *p = rng.gen::<f64>();
    }
    let mut chroma = [[0.0f64; 4]; 3];
    for ch in chroma.iter_mut() {
        for p in ch.iter_mut() {
            *p = rng.gen::<f64>();
        }
    }
    let (fw, fh) = (width.max(2) as f64 - 1.0, height.max(2) as f64 - 1.0);
    let pi = std::f64::consts::PI;
    RgbImage::from_fn(width, height, |x, y| {
        let u = x as f64 / fw;
        let v = y as f64 / fh;
        let l = 0.35 * luma[0] * u
            + 0.35 * luma[1] * v
            + 0.15
                * (pi * (1.0 + 2.0 * luma[2]) * u + 6.0 * luma[3]).sin()
                * (pi * (1.0 + 2.0 * luma[4]) * v + 6.0 * luma[5]).cos();
        let mut px = [0u8; 3];
        for (c, p) in chroma.iter().enumerate() {
            let gain = 0.8 + 0.4 * p[0];
            let value =
                0.2 + 0.15 * p[1] + gain * l + 0.08 * (p[2] - 0.5) * u + 0.08 * (p[3] - 0.5) * v;
            px[c] = (value.clamp(0.0, 1.0) * 255.0).round() as u8;
        }
        px
    })
}
