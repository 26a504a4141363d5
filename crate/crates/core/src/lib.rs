//! Simulation, classical restoration and scoring for HybridEVS raw frames.
//!
//! A HybridEVS sensor is a Quad Bayer color filter array (2×2 cells of
//! identical filters, repeating every 4×4 pixels) in which two pixels of
//! every 4×4 tile are event pixels that carry no color information.
//!
//! The crate is organised around the data flow:
//!
//! * [`pattern`] describes the tile geometry,
//! * [`raw_io`] reads and writes the on-disk formats (headerless 10-bit
//!   `.bin` frames, 8-bit PNGs, mask PNGs and the dataset manifest),
//! * [`simulator`] turns RGB ground truth into raw inputs with event pixels
//!   and injected defects,
//! * [`restore`] maps a raw frame back to full-resolution RGB
//!   (defect correction, event inpainting, Quad to Bayer remosaic, demosaic),
//! * [`metrics`] implements PSNR and SSIM scoring,
//! * [`harness`] ties everything into timed, ranked experiments.

pub mod error;
pub mod harness;
pub mod metrics;
pub mod pattern;
pub mod raw_io;
pub mod restore;
pub mod simulator;

mod util;

pub use crate::{
    error::{Error, Result},
    metrics::{psnr, ssim, MetricReport},
    pattern::{PatternSpec, PixelClass},
    raw_io::{MaskImage, RawImage, RgbImage},
    restore::{restore, DemosaicMode, DpcMode, RestoreConfig},
    simulator::{DefectMode, DefectModel, SimulatedPair},
};

/// Largest value a 10-bit sample can take.
pub const RAW_MAX: u16 = 1023;
