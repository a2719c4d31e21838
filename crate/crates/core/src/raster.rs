//! Raster value types: RGB scans, 16-bit gray maps and binary masks.
//!
//! All three store pixels row-major with `index = y * width + x`. They are
//! plain values; every operation in the crate takes them by reference and
//! returns a new value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An 8-bit RGB triple.
pub type Rgb = [u8; 3];

fn check_dims(width: u32, height: u32, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions {
            width,
            height,
            reason: "width and height must be at least 1",
        });
    }
    if (width as usize) * (height as usize) != len {
        return Err(Error::InvalidDimensions {
            width,
            height,
            reason: "pixel count does not equal width x height",
        });
    }
    Ok(())
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    /// The rectangle covering a whole `width` x `height` image.
    pub const fn full(width: u32, height: u32) -> Self {
        Self::new(0, 0, width, height)
    }

    /// True if the rectangle is non-empty and lies inside a `width` x `height` image.
    pub fn fits_in(&self, width: u32, height: u32) -> bool {
        self.w >= 1
            && self.h >= 1
            && u64::from(self.x) + u64::from(self.w) <= u64::from(width)
            && u64::from(self.y) + u64::from(self.h) <= u64::from(height)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= f64::from(self.x)
            && y >= f64::from(self.y)
            && x <= f64::from(self.x + self.w - 1)
            && y <= f64::from(self.y + self.h - 1)
    }
}

/// An 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Uniform image of a single color.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        Self {
            width,
            height,
            pixels: vec![color; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    /// Builder-style pixel write, used by the scene generator and tests.
    pub fn set(&mut self, x: u32, y: u32, color: Rgb) {
        let w = self.width as usize;
        self.pixels[y as usize * w + x as usize] = color;
    }

    pub fn into_pixels(self) -> Vec<Rgb> {
        self.pixels
    }
}

/// Row-major 16-bit intensity map.
///
/// Luminance images hold 8-bit content; Sobel magnitudes use the wider range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    values: Vec<u16>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, values: Vec<u16>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: u32, height: u32, value: u16) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        Self {
            width,
            height,
            values: vec![value; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: u16) {
        let w = self.width as usize;
        self.values[y as usize * w + x as usize] = value;
    }
}

/// Row-major foreground/background flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height, bits.len())?;
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    /// All-background mask.
    pub fn empty(width: u32, height: u32) -> Self {
        Self::filled(width, height, false)
    }

    pub fn filled(width: u32, height: u32, value: bool) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be >= 1");
        Self {
            width,
            height,
            bits: vec![value; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = value;
    }

    pub fn count_foreground(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// True if every foreground pixel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dimensions() == other.dimensions()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Places this mask at `rect` inside an otherwise empty `width` x `height` mask.
    pub fn embed(&self, rect: Rect, width: u32, height: u32) -> Result<BinaryMask> {
        if rect.w != self.width || rect.h != self.height || !rect.fits_in(width, height) {
            return Err(Error::RectOutOfBounds {
                rect,
                width,
                height,
            });
        }
        let mut out = BinaryMask::empty(width, height);
        for y in 0..self.height {
            let src = &self.bits[(y * self.width) as usize..((y + 1) * self.width) as usize];
            let start = ((rect.y + y) * width + rect.x) as usize;
            out.bits[start..start + self.width as usize].copy_from_slice(src);
        }
        Ok(out)
    }

    /// Foreground pixels that have a background or off-image 4-neighbor.
    pub fn boundary(&self) -> BinaryMask {
        let (w, h) = (self.width as usize, self.height as usize);
        let mut out = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if !self.bits[i] {
                    continue;
                }
                out[i] = x == 0
                    || y == 0
                    || x + 1 == w
                    || y + 1 == h
                    || !self.bits[i - 1]
                    || !self.bits[i + 1]
                    || !self.bits[i - w]
                    || !self.bits[i + w];
            }
        }
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: out,
        }
    }
}

/// Outline color used by [`overlay`].
pub const OVERLAY_COLOR: Rgb = [255, 0, 255];

/// Recolors the boundary pixels of every foreground component in magenta.
pub fn overlay(img: &RgbImage, mask: &BinaryMask) -> Result<RgbImage> {
    if img.dimensions() != mask.dimensions() {
        return Err(Error::DimensionMismatch {
            left: img.dimensions(),
            right: mask.dimensions(),
        });
    }
    let edge = mask.boundary();
    let pixels = img
        .pixels
        .iter()
        .zip(edge.bits())
        .map(|(&p, &on)| if on { OVERLAY_COLOR } else { p })
        .collect();
    Ok(RgbImage {
        width: img.width,
        height: img.height,
        pixels,
    })
}
