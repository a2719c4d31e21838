use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pixel adjacency used for foreground components.
///
/// Background reachability always uses the complementary adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn complement(self) -> Self {
        match self {
            Connectivity::Four => Connectivity::Eight,
            Connectivity::Eight => Connectivity::Four,
        }
    }

    /// Neighbor offsets `(dx, dy)`.
    pub fn offsets(self) -> &'static [(i32, i32)] {
        const FOUR: [(i32, i32); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
        const EIGHT: [(i32, i32); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

impl From<Connectivity> for u8 {
    fn from(c: Connectivity) -> u8 {
        match c {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

impl TryFrom<u8> for Connectivity {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::InvalidParams(format!(
                "connectivity must be 4 or 8, got {other}"
            ))),
        }
    }
}

/// Tunables of the single-image pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationParams {
    /// Lower end of the blue hue band, degrees.
    pub hue_lo: f64,
    /// Upper end of the blue hue band, degrees.
    pub hue_hi: f64,
    /// Minimum B - R difference for a pixel to count as blue background.
    pub min_b_minus_r: u8,
    /// Components smaller than this fraction of the largest are noise.
    pub noise_ratio: f64,
    pub connectivity: Connectivity,
    /// Crop to the edge-detected content before classification.
    pub auto_crop: bool,
    /// Raw Sobel magnitude at or above which a pixel counts as content.
    pub edge_threshold: u16,
    pub crop_margin: u32,
    pub dpi: f64,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            hue_lo: 170.0,
            hue_hi: 260.0,
            min_b_minus_r: 20,
            noise_ratio: 1.0 / 3.0,
            connectivity: Connectivity::Eight,
            auto_crop: true,
            edge_threshold: 120,
            crop_margin: 10,
            dpi: 400.0,
        }
    }
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.hue_lo && self.hue_lo < self.hue_hi && self.hue_hi <= 360.0) {
            return Err(Error::InvalidParams(format!(
                "hue band must satisfy 0 <= lo < hi <= 360, got [{}, {}]",
                self.hue_lo, self.hue_hi
            )));
        }
        if !(self.noise_ratio > 0.0 && self.noise_ratio < 1.0) {
            return Err(Error::InvalidParams(format!(
                "noise ratio must lie in (0, 1), got {}",
                self.noise_ratio
            )));
        }
        if !(self.dpi > 0.0 && self.dpi.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "dpi must be positive, got {}",
                self.dpi
            )));
        }
        Ok(())
    }
}
