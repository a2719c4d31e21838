//! Image file I/O. Scans are read from JPEG, PNG or TIFF; masks and
//! overlays are always written as 8-bit PNG.

use std::path::Path;

use image::{ImageError, ImageFormat, ImageReader};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RgbImage};

/// Extensions accepted by [`load_image`], lower case.
pub const SUPPORTED_EXTENSIONS: &[&str] = &["jpg", "jpeg", "png", "tif", "tiff"];

/// True if the path carries one of the supported extensions (any case).
pub fn is_supported_image(path: &Path) -> bool {
    format_for(path).is_some()
}

fn format_for(path: &Path) -> Option<ImageFormat> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    match ext.as_str() {
        "jpg" | "jpeg" => Some(ImageFormat::Jpeg),
        "png" => Some(ImageFormat::Png),
        "tif" | "tiff" => Some(ImageFormat::Tiff),
        _ => None,
    }
}

fn decode_error(path: &Path, err: ImageError) -> Error {
    match err {
        ImageError::IoError(source) => Error::io(path, source),
        other => Error::CorruptImage {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    }
}

fn encode_error(path: &Path, err: ImageError) -> Error {
    match err {
        ImageError::IoError(source) => Error::io(path, source),
        other => Error::OutputIo {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    }
}

/// Decodes a scan into RGB. Gray, alpha and palette sources are promoted to
/// RGB and any alpha channel is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let format = format_for(path).ok_or_else(|| Error::UnsupportedFormat(path.to_path_buf()))?;
    let mut reader = ImageReader::open(path).map_err(|e| Error::io(path, e))?;
    reader.set_format(format);
    let decoded = reader.decode().map_err(|e| decode_error(path, e))?;
    let rgb = decoded.into_rgb8();
    let (w, h) = rgb.dimensions();
    let pixels = rgb.pixels().map(|p| p.0).collect();
    RgbImage::new(w, h, pixels)
}

/// Writes a mask as a lossless single-channel PNG, foreground 255 and background 0.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let raw = mask
        .bits()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    let buf = image::GrayImage::from_raw(mask.width(), mask.height(), raw)
        .expect("mask buffer length matches its dimensions");
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| encode_error(path, e))
}

/// Reads a mask written by [`save_mask`] (any value above 127 is foreground).
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let decoded = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| decode_error(path, e))?
        .into_luma8();
    let (w, h) = decoded.dimensions();
    BinaryMask::new(w, h, decoded.pixels().map(|p| p.0[0] > 127).collect())
}

/// Writes an RGB image as 8-bit PNG.
pub fn save_rgb(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let raw = img.pixels().iter().flatten().copied().collect();
    let buf = image::RgbImage::from_raw(img.width(), img.height(), raw)
        .expect("pixel buffer length matches its dimensions");
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| encode_error(path, e))
}

/// Writes an RGB image as baseline JPEG at the given quality (1-100).
pub fn save_jpeg(img: &RgbImage, path: impl AsRef<Path>, quality: u8) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    let raw: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    image::codecs::jpeg::JpegEncoder::new_with_quality(&mut writer, quality)
        .encode(
            &raw,
            img.width(),
            img.height(),
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|e| encode_error(path, e))
}
