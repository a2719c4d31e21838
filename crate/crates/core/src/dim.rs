//! Double-image baseline: a white-background and a black-background scan of
//! the same seeds are differenced and binarised with Otsu's threshold.
//!
//! This is a reconstruction of the legacy workflow. It exists to compare
//! against the single-image pipeline and to reproduce its failure when the
//! seeds move between the two scans.

use std::cmp::Ordering;
use std::time::Instant;

use crate::color::to_grayscale;
use crate::error::{Error, Result};
use crate::params::SegmentationParams;
use crate::raster::{BinaryMask, GrayImage, RgbImage};
use crate::segment::{fill_holes, remove_noise};

#[derive(Debug, Clone, PartialEq)]
pub struct DimResult {
    pub mask: BinaryMask,
    /// Otsu threshold applied to the difference image.
    pub threshold: u8,
    /// IoU of the two single-scan masks, in `[0, 1]`.
    pub overlap_score: f64,
    /// Wall time, seconds.
    pub elapsed: f64,
}

/// 256-bin histogram; values above 255 land in the last bin.
pub fn histogram(gray: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in gray.values() {
        hist[usize::from(v.min(255))] += 1;
    }
    hist
}

/// Otsu's threshold for an image. See [`otsu_from_histogram`].
pub fn otsu_threshold(gray: &GrayImage) -> Result<u8> {
    otsu_from_histogram(&histogram(gray))
}

/// Threshold `t` maximising the between-class variance, where class 0 holds
/// the values `<= t`. Ties go to the smallest `t`.
///
/// The variance of split `t` is `(S0*N - S*n0)^2 / (N^2 * n0 * n1)`; the
/// common `N^2` is dropped and candidates are compared as exact fractions.
pub fn otsu_from_histogram(hist: &[u64; 256]) -> Result<u8> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    let occupied: Vec<usize> = (0..256).filter(|&i| hist[i] > 0).collect();
    if occupied.len() == 1 {
        return Err(Error::DegenerateHistogram {
            value: occupied[0] as u8,
        });
    }

    let n = i128::from(total);
    let sum: i128 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as i128 * i128::from(c))
        .sum();

    let mut best: Option<(u8, u128, u128)> = None;
    let (mut n0, mut s0) = (0i128, 0i128);
    for t in 0..255usize {
        n0 += i128::from(hist[t]);
        s0 += t as i128 * i128::from(hist[t]);
        let n1 = n - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let a = (s0 * n - sum * n0).unsigned_abs();
        let num = a * a;
        let den = (n0 * n1) as u128;
        let better = match best {
            None => true,
            Some((_, bn, bd)) => cmp_fraction(num, den, bn, bd) == Ordering::Greater,
        };
        if better {
            best = Some((t as u8, num, den));
        }
    }
    Ok(best
        .map(|(t, _, _)| t)
        .expect("two occupied bins give a valid split"))
}

fn cmp_fraction(n1: u128, d1: u128, n2: u128, d2: u128) -> Ordering {
    match (n1.checked_mul(d2), n2.checked_mul(d1)) {
        (Some(l), Some(r)) => l.cmp(&r),
        _ => (n1 as f64 / d1 as f64)
            .partial_cmp(&(n2 as f64 / d2 as f64))
            .unwrap_or(Ordering::Equal),
    }
}

/// Otsu threshold, or the single occupied value of a degenerate histogram.
fn threshold_or_value(gray: &GrayImage) -> u8 {
    match otsu_threshold(gray) {
        Ok(t) => t,
        Err(Error::DegenerateHistogram { value }) => value,
        Err(_) => 0,
    }
}

/// Intersection over union; two empty masks count as identical.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let (mut inter, mut union) = (0u64, 0u64);
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        inter += u64::from(x && y);
        union += u64::from(x || y);
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn segment_dim(
    white_img: &RgbImage,
    black_img: &RgbImage,
    params: &SegmentationParams,
) -> Result<DimResult> {
    if white_img.dimensions() != black_img.dimensions() {
        return Err(Error::DimensionMismatch {
            left: white_img.dimensions(),
            right: black_img.dimensions(),
        });
    }
    params.validate()?;
    let start = Instant::now();
    let (w, h) = white_img.dimensions();
    let white = to_grayscale(white_img);
    let black = to_grayscale(black_img);

    let diff_values = white
        .values()
        .iter()
        .zip(black.values())
        .map(|(&a, &b)| a.abs_diff(b))
        .collect();
    let diff = GrayImage::new(w, h, diff_values)?;
    let threshold = match otsu_threshold(&diff) {
        Ok(t) => t,
        Err(Error::DegenerateHistogram { .. }) => return Err(Error::NoForeground),
        Err(e) => return Err(e),
    };
    let raw = BinaryMask::new(
        w,
        h,
        diff.values()
            .iter()
            .map(|&d| d <= u16::from(threshold))
            .collect(),
    )?;
    let mask = remove_noise(&fill_holes(&raw, params.connectivity), params);

    // dark seeds on white fall in Otsu's lower class, bright seeds on black in the upper
    let tw = u16::from(threshold_or_value(&white));
    let tb = u16::from(threshold_or_value(&black));
    let white_fg = BinaryMask::new(w, h, white.values().iter().map(|&v| v <= tw).collect())?;
    let black_fg = BinaryMask::new(w, h, black.values().iter().map(|&v| v > tb).collect())?;

    Ok(DimResult {
        mask,
        threshold,
        overlap_score: iou(&white_fg, &black_fg),
        elapsed: start.elapsed().as_secs_f64(),
    })
}
