//! Classical reconstruction of a HybridEVS raw frame into RGB.
//!
//! The pipeline runs, in order:
//!
//! 1. defect pixel correction ([`dpc`]): median-deviation detector, then
//!    the zero mask,
//! 2. event pixel inpainting ([`inpaint`]),
//! 3. Quad Bayer to RGGB Bayer remosaic ([`remosaic`]),
//! 4. Bayer demosaic ([`demosaic`]) and 10-bit to 8-bit scaling.
//!
//! Event positions come from the [`PatternSpec`], never from sample values.
//! Every stage parallelises over rows and produces the same bits as a
//! sequential run.

pub mod channels;
pub mod demosaic;
pub mod dpc;
pub mod inpaint;
mod neighborhood;
pub mod remosaic;

use serde::{Deserialize, Serialize};

pub use self::{
    channels::{pack, unpack, ChannelStack},
    demosaic::{demosaic_bayer, demosaic_planes, DemosaicMode, RgbPlanes},
    dpc::{dpc_median_deviation, dpc_zero_mask},
    inpaint::inpaint_events,
    remosaic::{remosaic_quad_to_bayer, RemosaicTable},
};
use crate::{
    error::{Error, Result},
    pattern::PatternSpec,
    raw_io::{MaskImage, RawImage, RgbImage},
    RAW_MAX,
};

/// Which defect detectors run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DpcMode {
    None,
    ZeroMask,
    MedianDeviation,
    /// Median deviation followed by the zero mask.
    #[default]
    Both,
}

impl DpcMode {
    fn median(self) -> bool {
        matches!(self, DpcMode::MedianDeviation | DpcMode::Both)
    }

    fn zero_mask(self) -> bool {
        matches!(self, DpcMode::ZeroMask | DpcMode::Both)
    }
}

impl std::str::FromStr for DpcMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "off" => Ok(DpcMode::None),
            "zero-mask" | "zero" => Ok(DpcMode::ZeroMask),
            "median-deviation" | "median" => Ok(DpcMode::MedianDeviation),
            "both" => Ok(DpcMode::Both),
            other => Err(Error::InvalidConfig(format!("unknown dpc mode '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct RestoreConfig {
    pub spec: PatternSpec,
    pub dpc: DpcMode,
    /// Median-deviation threshold in 10-bit units.
    pub threshold: u16,
    pub demosaic: DemosaicMode,
    /// Chebyshev radius of the same-color neighborhoods used by DPC and
    /// inpainting.
    pub radius: usize,
    /// Event inpainting on or off.
    pub inpaint: bool,
}

pub const DEFAULT_THRESHOLD: u16 = 64;
pub const DEFAULT_RADIUS: usize = 4;
pub const MAX_RADIUS: usize = 32;

impl Default for RestoreConfig {
    fn default() -> Self {
        Self {
            spec: PatternSpec::default(),
            dpc: DpcMode::Both,
            threshold: DEFAULT_THRESHOLD,
            demosaic: DemosaicMode::GradientCorrected,
            radius: DEFAULT_RADIUS,
            inpaint: true,
        }
    }
}

impl RestoreConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threshold == 0 || self.threshold > RAW_MAX {
            return Err(Error::InvalidConfig(format!(
                "threshold {} outside (0, {RAW_MAX}]",
                self.threshold
            )));
        }
        if self.radius == 0 || self.radius > MAX_RADIUS {
            return Err(Error::InvalidConfig(format!(
                "radius {} outside [1, {MAX_RADIUS}]",
                self.radius
            )));
        }
        Ok(())
    }

    /// Largest distance over which one input pixel can influence the output.
    pub fn influence_radius(&self) -> usize {
        let dpc = self.radius * (self.dpc.median() as usize + self.dpc.zero_mask() as usize);
        let inpaint = if self.inpaint { self.radius } else { 0 };
        // remosaic moves samples inside a tile, the demosaic kernel reaches 2
        dpc + inpaint + 3 + 2
    }
}

pub(crate) fn check_mask(raw: &RawImage, mask: &MaskImage) -> Result<()> {
    if !mask.same_dims(raw.width(), raw.height()) {
        return Err(Error::DimensionMismatch(format!(
            "mask {}x{} vs frame {}x{}",
            mask.width(),
            mask.height(),
            raw.width(),
            raw.height()
        )));
    }
    Ok(())
}

/// Intermediate results of one pipeline run.
#[derive(Clone, Debug)]
pub struct Stages {
    pub corrected: RawImage,
    /// Pixels flagged by the median detector.
    pub flagged: MaskImage,
    pub inpainted: RawImage,
    pub bayer: RawImage,
    pub rgb: RgbImage,
}

/// Runs the pipeline and keeps every intermediate frame.
pub fn restore_stages(raw: &RawImage, config: &RestoreConfig) -> Result<Stages> {
    config.validate()?;
    let spec = &config.spec;
    let events = spec.event_mask(raw.width(), raw.height());

    let (mut corrected, flagged) = if config.dpc.median() {
        dpc_median_deviation(raw, &events, spec, config.threshold, config.radius)?
    } else {
        (raw.clone(), MaskImage::new(raw.width(), raw.height()))
    };
    if config.dpc.zero_mask() {
        corrected = dpc_zero_mask(&corrected, &events, spec, config.radius)?;
    }
    let inpainted = if config.inpaint {
        inpaint_events(&corrected, &events, spec, config.radius)?
    } else {
        corrected.clone()
    };
    let bayer = remosaic_quad_to_bayer(&inpainted, spec);
    let rgb = demosaic_bayer(&bayer, config.demosaic);
    Ok(Stages {
        corrected,
        flagged,
        inpainted,
        bayer,
        rgb,
    })
}

/// Full reconstruction of a raw frame to RGB of the same resolution.
pub fn restore(raw: &RawImage, config: &RestoreConfig) -> Result<RgbImage> {
    restore_stages(raw, config).map(|s| s.rgb)
}
