//! HybridEVS color filter geometry.
//!
//! The sensor repeats a 4×4 tile. The tile splits into four 2×2 cells of
//! identical color filters (one red, two green, one blue) and two of its
//! sixteen positions are event pixels that occlude the color of their cell.
//!
//! A pattern can be loaded from a four-line text file, one character per
//! position: `R`, `G`, `B` or `E` (event).

use std::{fmt, path::Path, str::FromStr};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tile period in both axes.
pub const TILE: usize = 4;

/// Number of event pixels in every tile.
pub const EVENTS_PER_TILE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PixelClass {
    Red,
    Green,
    Blue,
    Event,
}

impl PixelClass {
    pub fn code(self) -> char {
        match self {
            PixelClass::Red => 'R',
            PixelClass::Green => 'G',
            PixelClass::Blue => 'B',
            PixelClass::Event => 'E',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'R' => Some(PixelClass::Red),
            'G' => Some(PixelClass::Green),
            'B' => Some(PixelClass::Blue),
            'E' => Some(PixelClass::Event),
            _ => None,
        }
    }

    /// RGB channel index for a color class, `None` for events.
    pub fn channel(self) -> Option<usize> {
        match self {
            PixelClass::Red => Some(0),
            PixelClass::Green => Some(1),
            PixelClass::Blue => Some(2),
            PixelClass::Event => None,
        }
    }
}

/// A validated 4×4 HybridEVS tile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PatternSpec {
    tile: [[PixelClass; TILE]; TILE],
    /// Color carried by each 2×2 cell, indexed `[row / 2][col / 2]`.
    cells: [[PixelClass; 2]; 2],
    event_positions: [(usize, usize); EVENTS_PER_TILE],
}

impl Default for PatternSpec {
    /// Quad Bayer with the red cell top-left (`RRGG / RRGG / GGBB / GGBB`),
    /// event pixels at (row 1, col 1) in the red cell and (row 2, col 2) in
    /// the blue cell.
    fn default() -> Self {
        Self::with_events(
            [
                [PixelClass::Red, PixelClass::Green],
                [PixelClass::Green, PixelClass::Blue],
            ],
            [(1, 1), (2, 2)],
        )
        .expect("default pattern is valid")
    }
}

impl PatternSpec {
    /// Builds a tile from a full 4×4 class grid, checking the invariants.
    pub fn new(tile: [[PixelClass; TILE]; TILE]) -> Result<Self> {
        let mut events = Vec::new();
        let mut cells = [[None::<PixelClass>; 2]; 2];
        for (y, row) in tile.iter().enumerate() {
            for (x, &class) in row.iter().enumerate() {
                if class == PixelClass::Event {
                    events.push((y, x));
                    continue;
                }
                let cell = &mut cells[y / 2][x / 2];
                match *cell {
                    None => *cell = Some(class),
                    Some(c) if c == class => {}
                    Some(c) => {
                        return Err(Error::InvalidPattern(format!(
                            "2x2 cell at ({}, {}) mixes {:?} and {:?}",
                            y / 2 * 2,
                            x / 2 * 2,
                            c,
                            class
                        )))
                    }
                }
            }
        }
        if events.len() != EVENTS_PER_TILE {
            return Err(Error::InvalidPattern(format!(
                "expected {EVENTS_PER_TILE} event pixels per tile, found {}",
                events.len()
            )));
        }
        let mut resolved = [[PixelClass::Event; 2]; 2];
        let (mut r, mut g, mut b) = (0, 0, 0);
        for cy in 0..2 {
            for cx in 0..2 {
                let color = cells[cy][cx].ok_or_else(|| {
                    Error::InvalidPattern(format!(
                        "2x2 cell at ({}, {}) has no color pixel",
                        cy * 2,
                        cx * 2
                    ))
                })?;
                match color {
                    PixelClass::Red => r += 1,
                    PixelClass::Green => g += 1,
                    PixelClass::Blue => b += 1,
                    PixelClass::Event => unreachable!(),
                }
                resolved[cy][cx] = color;
            }
        }
        if (r, g, b) != (1, 2, 1) {
            return Err(Error::InvalidPattern(format!(
                "cells must be one red, two green, one blue; got R{r} G{g} B{b}"
            )));
        }
        Ok(Self {
            tile,
            cells: resolved,
            event_positions: [events[0], events[1]],
        })
    }

    /// Builds a tile from the four cell colors and the event positions.
    pub fn with_events(
        cells: [[PixelClass; 2]; 2],
        events: [(usize, usize); EVENTS_PER_TILE],
    ) -> Result<Self> {
        let mut tile = [[PixelClass::Event; TILE]; TILE];
        for (y, row) in tile.iter_mut().enumerate() {
            for (x, class) in row.iter_mut().enumerate() {
                *class = cells[y / 2][x / 2];
            }
        }
        for &(y, x) in &events {
            if y >= TILE || x >= TILE {
                return Err(Error::InvalidPattern(format!(
                    "event position ({y}, {x}) outside the tile"
                )));
            }
            tile[y][x] = PixelClass::Event;
        }
        Self::new(tile)
    }

    /// Reads a pattern configuration file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse().map_err(|e: Error| e.in_file(path))
    }

    pub fn tile(&self) -> &[[PixelClass; TILE]; TILE] {
        &self.tile
    }

    /// Event positions as (row, col) within the tile.
    pub fn event_positions(&self) -> [(usize, usize); EVENTS_PER_TILE] {
        self.event_positions
    }

    /// Class of the pixel at column `x`, row `y`.
    #[inline]
    pub fn classify(&self, x: usize, y: usize) -> PixelClass {
        self.tile[y % TILE][x % TILE]
    }

    #[inline]
    pub fn is_event(&self, x: usize, y: usize) -> bool {
        self.classify(x, y) == PixelClass::Event
    }

    /// The color of the 2×2 cell containing (`x`, `y`); equals `classify`
    /// away from event pixels.
    #[inline]
    pub fn underlying_color(&self, x: usize, y: usize) -> PixelClass {
        self.cells[(y % TILE) / 2][(x % TILE) / 2]
    }

    /// Boolean event mask for a `width`×`height` frame, row-major.
    pub fn event_mask(&self, width: usize, height: usize) -> crate::raw_io::MaskImage {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            bits.extend((0..width).map(|x| self.is_event(x, y)));
        }
        crate::raw_io::MaskImage::from_bits(width, height, bits)
            .expect("mask length matches dimensions")
    }
}

impl FromStr for PatternSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if rows.len() != TILE {
            return Err(Error::InvalidPattern(format!(
                "expected {TILE} rows, found {}",
                rows.len()
            )));
        }
        let mut tile = [[PixelClass::Event; TILE]; TILE];
        for (y, line) in rows.iter().enumerate() {
            let codes: Vec<char> = line.chars().filter(|c| !c.is_whitespace()).collect();
            if codes.len() != TILE {
                return Err(Error::InvalidPattern(format!(
                    "row {y} has {} codes, expected {TILE}",
                    codes.len()
                )));
            }
            for (x, &c) in codes.iter().enumerate() {
                tile[y][x] = PixelClass::from_code(c).ok_or_else(|| {
                    Error::InvalidPattern(format!("unknown code '{c}' at row {y}, col {x}"))
                })?;
            }
        }
        Self::new(tile)
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.tile {
            for class in row {
                write!(f, "{}", class.code())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl TryFrom<String> for PatternSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PatternSpec> for String {
    fn from(p: PatternSpec) -> String {
        p.to_string()
    }
}
