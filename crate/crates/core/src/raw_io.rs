//! Image containers and the on-disk formats.
//!
//! Raw frames (`.bin`) are headerless: `width * height` little-endian `u16`
//! words in row-major order from the top-left pixel, each holding a 10-bit
//! value. Dimensions travel out of band, either on the command line or in
//! the dataset [`Manifest`].
//!
//! RGB images are 8-bit, 3-channel PNGs. Masks are 8-bit grayscale PNGs
//! with 0 for clear and 255 for set.

use std::{
    fs,
    io::Cursor,
    path::{Path, PathBuf},
};

use serde::{Deserialize, Serialize};

use crate::{
    error::{Error, Result},
    util::round_to_raw,
    RAW_MAX,
};

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    Ok(())
}

/// Single-channel 10-bit frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RawImage {
    width: usize,
    height: usize,
    samples: Vec<u16>,
}

impl RawImage {
    pub fn new(width: usize, height: usize, samples: Vec<u16>) -> Result<Self> {
        check_dims(width, height)?;
        if samples.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a {width}x{height} frame",
                samples.len()
            )));
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, &v)| v > RAW_MAX) {
            return Err(Error::RangeError {
                index,
                value: value as u32,
            });
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, value: u16) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds a frame from a per-pixel function of (x, y). Values are clamped
    /// into the 10-bit range.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u16) -> Self {
        assert!(width > 0 && height > 0, "empty frame");
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y).min(RAW_MAX));
            }
        }
        Self {
            width,
            height,
            samples,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u16> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.samples[y * self.width + x]
    }

    /// Sets a sample, clamping into the 10-bit range.
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u16) {
        self.samples[y * self.width + x] = value.min(RAW_MAX);
    }

    pub fn row(&self, y: usize) -> &[u16] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }
}

/// Interleaved 8-bit RGB image.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height * 3 {
            return Err(Error::DimensionMismatch(format!(
                "{} bytes for a {width}x{height} RGB image",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(width, height, rgb.repeat(width * height))
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Self {
        assert!(width > 0 && height > 0, "empty image");
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Interleaved `r, g, b` bytes, row-major.
    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Rotates clockwise by `quarter_turns` × 90°.
    pub fn rotate90(&self, quarter_turns: u8) -> RgbImage {
        match quarter_turns % 4 {
            0 => self.clone(),
            1 => RgbImage::from_fn(self.height, self.width, |x, y| {
                self.pixel(y, self.height - 1 - x)
            }),
            2 => RgbImage::from_fn(self.width, self.height, |x, y| {
                self.pixel(self.width - 1 - x, self.height - 1 - y)
            }),
            _ => RgbImage::from_fn(self.height, self.width, |x, y| {
                self.pixel(self.width - 1 - y, x)
            }),
        }
    }

    pub fn flip_horizontal(&self) -> RgbImage {
        RgbImage::from_fn(self.width, self.height, |x, y| {
            self.pixel(self.width - 1 - x, y)
        })
    }
}

/// Boolean per-pixel annotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MaskImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl MaskImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} mask bits for {width}x{height}",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn same_dims(&self, width: usize, height: usize) -> bool {
        self.width == width && self.height == height
    }

    /// True when every bit set in `other` is also set here.
    pub fn contains(&self, other: &MaskImage) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| a || !b)
    }
}

// ---------------------------------------------------------------------------
// .bin frames

/// Decodes a headerless little-endian `u16` frame.
pub fn read_raw(bytes: &[u8], width: usize, height: usize) -> Result<RawImage> {
    check_dims(width, height)?;
    let expected = 2 * width * height;
    if bytes.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: bytes.len(),
        });
    }
    let samples: Vec<u16> = bytes
        .chunks_exact(2)
        .map(|w| u16::from_le_bytes([w[0], w[1]]))
        .collect();
    RawImage::new(width, height, samples)
}

pub fn write_raw(img: &RawImage) -> Vec<u8> {
    img.samples.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn load_raw(path: impl AsRef<Path>, width: usize, height: usize) -> Result<RawImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_raw(&bytes, width, height).map_err(|e| e.in_file(path))
}

pub fn save_raw(path: impl AsRef<Path>, img: &RawImage) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_raw(img)).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// sample scaling

#[inline]
pub fn raw_to_unit(v: u16) -> f64 {
    v as f64 / RAW_MAX as f64
}

#[inline]
pub fn unit_to_raw(u: f64) -> u16 {
    round_to_raw(u * RAW_MAX as f64)
}

/// 10-bit to 8-bit, linear with round half away from zero.
#[inline]
pub fn raw_to_u8(v: u16) -> u8 {
    (v as f64 * 255.0 / RAW_MAX as f64)
        .round()
        .clamp(0.0, 255.0) as u8
}

/// Same as [`raw_to_u8`] for an unquantised 10-bit value.
#[inline]
pub fn raw_f64_to_u8(v: f64) -> u8 {
    (v * 255.0 / RAW_MAX as f64).round().clamp(0.0, 255.0) as u8
}

/// 8-bit to 10-bit, linear with round half away from zero.
#[inline]
pub fn u8_to_raw(v: u8) -> u16 {
    round_to_raw(v as f64 * RAW_MAX as f64 / 255.0)
}

// ---------------------------------------------------------------------------
// PNG

fn decode_png(bytes: &[u8]) -> Result<(png::OutputInfo, Vec<u8>)> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Decode(e.to_string()))?;
    let depth = reader.info().bit_depth;
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedBitDepth(depth as u8));
    }
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Decode(e.to_string()))?;
    buf.truncate(info.buffer_size());
    Ok((info, buf))
}

fn encode_png(width: usize, height: usize, color: png::ColorType, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(color);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::Encode(e.to_string()))?;
        writer
            .write_image_data(data)
            .map_err(|e| Error::Encode(e.to_string()))?;
    }
    Ok(out)
}

/// Decodes an 8-bit RGB (or RGBA, alpha dropped) PNG.
pub fn read_rgb(bytes: &[u8]) -> Result<RgbImage> {
    let (info, buf) = decode_png(bytes)?;
    let (w, h) = (info.width as usize, info.height as usize);
    let data = match info.color_type {
        png::ColorType::Rgb => buf,
        png::ColorType::Rgba => buf
            .chunks_exact(4)
            .flat_map(|p| [p[0], p[1], p[2]])
            .collect(),
        other => return Err(Error::UnsupportedColorType(format!("{other:?}"))),
    };
    RgbImage::new(w, h, data)
}

pub fn write_rgb(img: &RgbImage) -> Result<Vec<u8>> {
    encode_png(img.width, img.height, png::ColorType::Rgb, &img.data)
}

pub fn load_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_rgb(&bytes).map_err(|e| e.in_file(path))
}

pub fn save_rgb(path: impl AsRef<Path>, img: &RgbImage) -> Result<()> {
    let path = path.as_ref();
    let bytes = write_rgb(img).map_err(|e| e.in_file(path))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Decodes an 8-bit grayscale mask; any non-zero value counts as set.
pub fn read_mask(bytes: &[u8]) -> Result<MaskImage> {
    let (info, buf) = decode_png(bytes)?;
    if info.color_type != png::ColorType::Grayscale {
        return Err(Error::UnsupportedColorType(format!(
            "{:?}",
            info.color_type
        )));
    }
    MaskImage::from_bits(
        info.width as usize,
        info.height as usize,
        buf.into_iter().map(|v| v != 0).collect(),
    )
}

pub fn write_mask(mask: &MaskImage) -> Result<Vec<u8>> {
    check_dims(mask.width, mask.height)?;
    let data: Vec<u8> = mask.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
    encode_png(mask.width, mask.height, png::ColorType::Grayscale, &data)
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<MaskImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_mask(&bytes).map_err(|e| e.in_file(path))
}

pub fn save_mask(path: impl AsRef<Path>, mask: &MaskImage) -> Result<()> {
    let path = path.as_ref();
    let bytes = write_mask(mask).map_err(|e| e.in_file(path))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// manifest

/// One scene of a paired dataset. Paths are relative to the manifest file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub raw: PathBuf,
    pub label: PathBuf,
    pub width: usize,
    pub height: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defects: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub scenes: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
