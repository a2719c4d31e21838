//! Single-image segmentation: blue background removal, region filling and
//! area-ratio noise removal.

use std::collections::VecDeque;
use std::time::Instant;

use crate::color::{content_bbox, crop, hue, sobel_edges, to_grayscale};
use crate::error::Result;
use crate::params::{Connectivity, SegmentationParams};
use crate::raster::{BinaryMask, Rect, RgbImage};
use crate::regions::label_components;

/// Output of [`segment`]. The mask covers `crop_rect` only.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    pub mask: BinaryMask,
    pub crop_rect: Rect,
    /// Wall time of the whole call, seconds.
    pub elapsed: f64,
}

/// A pixel is background when blue is the dominant channel, exceeds red by
/// at least `min_b_minus_r`, and its hue lies in `[hue_lo, hue_hi]`.
#[inline]
pub fn is_blue_background(r: u8, g: u8, b: u8, params: &SegmentationParams) -> bool {
    if b < r || b < g {
        return false;
    }
    if b - r < params.min_b_minus_r {
        return false;
    }
    let h = hue(r, g, b);
    h >= params.hue_lo && h <= params.hue_hi
}

/// Foreground wherever the pixel is not blue background.
pub fn blue_mask(img: &RgbImage, params: &SegmentationParams) -> BinaryMask {
    let bits = img
        .pixels()
        .iter()
        .map(|&[r, g, b]| !is_blue_background(r, g, b, params))
        .collect();
    BinaryMask::new(img.width(), img.height(), bits).expect("same dimensions as source")
}

/// Fills every background region that cannot reach the image border.
///
/// Background reachability uses the complement of `connectivity`, so 8-connected
/// foreground encloses 4-connected holes and vice versa.
pub fn fill_holes(mask: &BinaryMask, connectivity: Connectivity) -> BinaryMask {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let bits = mask.bits();
    let mut outside = vec![false; w * h];
    let mut queue = VecDeque::new();

    let seed = |i: usize, outside: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
        if !bits[i] && !outside[i] {
            outside[i] = true;
            queue.push_back(i);
        }
    };
    for x in 0..w {
        seed(x, &mut outside, &mut queue);
        seed((h - 1) * w + x, &mut outside, &mut queue);
    }
    for y in 0..h {
        seed(y * w, &mut outside, &mut queue);
        seed(y * w + w - 1, &mut outside, &mut queue);
    }

    let offsets = connectivity.complement().offsets();
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for &(dx, dy) in offsets {
            let (nx, ny) = (x + i64::from(dx), y + i64::from(dy));
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let j = ny as usize * w + nx as usize;
            if !bits[j] && !outside[j] {
                outside[j] = true;
                queue.push_back(j);
            }
        }
    }

    let filled = outside.into_iter().map(|o| !o).collect();
    BinaryMask::new(mask.width(), mask.height(), filled).expect("same dimensions")
}

/// Deletes every component whose area is strictly less than
/// `noise_ratio` times the largest component's area.
pub fn remove_noise(mask: &BinaryMask, params: &SegmentationParams) -> BinaryMask {
    let labels = label_components(mask, params.connectivity);
    if labels.count() == 0 {
        return mask.clone();
    }
    let areas = labels.areas();
    let largest = areas[1..].iter().copied().max().unwrap_or(0) as f64;
    let cutoff = params.noise_ratio * largest;
    let keep: Vec<bool> = areas
        .iter()
        .enumerate()
        .map(|(id, &a)| id != 0 && (a as f64) >= cutoff)
        .collect();
    labels.select(&keep)
}

/// Edge-driven crop rectangle for an image (full image when crop is off).
pub fn crop_rect_for(img: &RgbImage, params: &SegmentationParams) -> Rect {
    if !params.auto_crop {
        return Rect::full(img.width(), img.height());
    }
    let edges = sobel_edges(&to_grayscale(img));
    content_bbox(&edges, params.edge_threshold, params.crop_margin)
}

/// Full pipeline: optional crop, blue removal, region filling, noise removal.
pub fn segment(img: &RgbImage, params: &SegmentationParams) -> Result<SegmentationResult> {
    params.validate()?;
    let start = Instant::now();
    let crop_rect = crop_rect_for(img, params);
    let mask = if crop_rect == Rect::full(img.width(), img.height()) {
        blue_mask(img, params)
    } else {
        blue_mask(&crop(img, crop_rect)?, params)
    };
    let filled = fill_holes(&mask, params.connectivity);
    let mask = remove_noise(&filled, params);
    Ok(SegmentationResult {
        mask,
        crop_rect,
        elapsed: start.elapsed().as_secs_f64(),
    })
}
