//! Connected components, per-seed features and the count comparison metric.

use serde::{Deserialize, Serialize};

use crate::color::{rgb_to_hsb, HsbColor};
use crate::error::{Error, Result};
use crate::params::Connectivity;
use crate::raster::{BinaryMask, Rect, RgbImage};

/// Component ids per pixel: 0 is background, foreground components are
/// numbered `1..=count` in raster order of their first pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: u32,
    height: u32,
    labels: Vec<u32>,
    count: u32,
}

impl LabelMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    /// Number of foreground components.
    pub fn count(&self) -> u32 {
        self.count
    }

    /// Pixel count of every component; index 0 holds the background.
    pub fn areas(&self) -> Vec<u64> {
        let mut areas = vec![0u64; self.count as usize + 1];
        for &l in &self.labels {
            areas[l as usize] += 1;
        }
        areas
    }

    /// Mask of the components for which `keep[id]` is true.
    pub fn select(&self, keep: &[bool]) -> BinaryMask {
        let bits = self
            .labels
            .iter()
            .map(|&l| l != 0 && keep[l as usize])
            .collect();
        BinaryMask::new(self.width, self.height, bits).expect("same dimensions")
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        // slot 0 is reserved for background
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller provisional id as root
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Two-pass labeling with union-find equivalence resolution.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> LabelMap {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let bits = mask.bits();
    let mut provisional = vec![0u32; w * h];
    let mut sets = DisjointSet::new();
    let eight = connectivity == Connectivity::Eight;

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !bits[i] {
                continue;
            }
            let mut label = 0u32;
            let mut join = |n: u32| {
                if n != 0 {
                    label = if label == 0 { n } else { sets.union(label, n) };
                }
            };
            if x > 0 {
                join(provisional[i - 1]);
            }
            if y > 0 {
                join(provisional[i - w]);
                if eight {
                    if x > 0 {
                        join(provisional[i - w - 1]);
                    }
                    if x + 1 < w {
                        join(provisional[i - w + 1]);
                    }
                }
            }
            provisional[i] = if label == 0 { sets.make() } else { label };
        }
    }

    let mut dense = vec![0u32; sets.parent.len()];
    let mut count = 0u32;
    for l in provisional.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = sets.find(*l) as usize;
        if dense[root] == 0 {
            count += 1;
            dense[root] = count;
        }
        *l = dense[root];
    }

    LabelMap {
        width: mask.width(),
        height: mask.height(),
        labels: provisional,
        count,
    }
}

pub fn count_seeds(labels: &LabelMap) -> usize {
    labels.count() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Geometry and color features of one segmented seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed_id: u32,
    pub area_px: u64,
    pub area_mm2: f64,
    /// Number of pixels with a background or off-image 4-neighbor.
    pub perimeter_px: u64,
    pub centroid: Point,
    pub bbox: Rect,
    pub mean_rgb: [f64; 3],
    /// Hue is a saturation-weighted circular mean.
    pub mean_hsb: HsbColor,
}

impl SeedRecord {
    /// Moves the record's coordinates by `(dx, dy)`, e.g. from crop to scan space.
    pub fn translate(&mut self, dx: u32, dy: u32) {
        self.centroid.x += f64::from(dx);
        self.centroid.y += f64::from(dy);
        self.bbox.x += dx;
        self.bbox.y += dy;
    }
}

/// Square millimetres covered by one pixel at `dpi`.
pub fn mm2_per_pixel(dpi: f64) -> f64 {
    let side = 25.4 / dpi;
    side * side
}

#[derive(Clone)]
struct Accumulator {
    area: u64,
    perimeter: u64,
    sum_x: f64,
    sum_y: f64,
    min_x: u32,
    min_y: u32,
    max_x: u32,
    max_y: u32,
    sum_rgb: [u64; 3],
    sum_sin: f64,
    sum_cos: f64,
    sum_s: f64,
    sum_b: f64,
}

impl Default for Accumulator {
    fn default() -> Self {
        Self {
            area: 0,
            perimeter: 0,
            sum_x: 0.0,
            sum_y: 0.0,
            min_x: u32::MAX,
            min_y: u32::MAX,
            max_x: 0,
            max_y: 0,
            sum_rgb: [0; 3],
            sum_sin: 0.0,
            sum_cos: 0.0,
            sum_s: 0.0,
            sum_b: 0.0,
        }
    }
}

pub fn component_stats(labels: &LabelMap, img: &RgbImage, dpi: f64) -> Result<Vec<SeedRecord>> {
    if labels.dimensions() != img.dimensions() {
        return Err(Error::DimensionMismatch {
            left: labels.dimensions(),
            right: img.dimensions(),
        });
    }
    if dpi.is_nan() || dpi <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "dpi must be positive, got {dpi}"
        )));
    }
    let (w, h) = (labels.width as usize, labels.height as usize);
    let ids = &labels.labels;
    let mut acc = vec![Accumulator::default(); labels.count as usize + 1];

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let id = ids[i];
            if id == 0 {
                continue;
            }
            let a = &mut acc[id as usize];
            let (xu, yu) = (x as u32, y as u32);
            a.area += 1;
            a.sum_x += x as f64;
            a.sum_y += y as f64;
            a.min_x = a.min_x.min(xu);
            a.min_y = a.min_y.min(yu);
            a.max_x = a.max_x.max(xu);
            a.max_y = a.max_y.max(yu);
            let on_edge = x == 0
                || y == 0
                || x + 1 == w
                || y + 1 == h
                || ids[i - 1] != id
                || ids[i + 1] != id
                || ids[i - w] != id
                || ids[i + w] != id;
            if on_edge {
                a.perimeter += 1;
            }
            let [r, g, b] = img.pixels()[i];
            a.sum_rgb[0] += u64::from(r);
            a.sum_rgb[1] += u64::from(g);
            a.sum_rgb[2] += u64::from(b);
            let hsb = rgb_to_hsb(r, g, b);
            let rad = hsb.h.to_radians();
            a.sum_sin += hsb.s * rad.sin();
            a.sum_cos += hsb.s * rad.cos();
            a.sum_s += hsb.s;
            a.sum_b += hsb.b;
        }
    }

    let px_mm2 = mm2_per_pixel(dpi);
    let records = acc
        .iter()
        .enumerate()
        .skip(1)
        .map(|(id, a)| {
            let n = a.area as f64;
            let mean_h = if a.sum_sin.abs() < 1e-9 && a.sum_cos.abs() < 1e-9 {
                0.0
            } else {
                let deg = a.sum_sin.atan2(a.sum_cos).to_degrees().rem_euclid(360.0);
                if deg >= 360.0 {
                    0.0
                } else {
                    deg
                }
            };
            SeedRecord {
                seed_id: id as u32,
                area_px: a.area,
                area_mm2: n * px_mm2,
                perimeter_px: a.perimeter,
                centroid: Point {
                    x: a.sum_x / n,
                    y: a.sum_y / n,
                },
                bbox: Rect::new(
                    a.min_x,
                    a.min_y,
                    a.max_x - a.min_x + 1,
                    a.max_y - a.min_y + 1,
                ),
                mean_rgb: a.sum_rgb.map(|s| s as f64 / n),
                mean_hsb: HsbColor {
                    h: mean_h,
                    s: a.sum_s / n,
                    b: a.sum_b / n,
                },
            }
        })
        .collect();
    Ok(records)
}

/// Agreement between automatic and reference seed counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountComparison {
    pub n_images: usize,
    pub n_success: usize,
    pub n_error: usize,
    pub success_pct: f64,
    pub error_pct: f64,
    pub mismatched_indices: Vec<usize>,
}

pub fn compare_counts(auto: &[usize], truth: &[usize]) -> Result<CountComparison> {
    if auto.len() != truth.len() {
        return Err(Error::LengthMismatch {
            auto: auto.len(),
            truth: truth.len(),
        });
    }
    if auto.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mismatched_indices: Vec<usize> = auto
        .iter()
        .zip(truth)
        .enumerate()
        .filter(|(_, (a, t))| a != t)
        .map(|(i, _)| i)
        .collect();
    let n_images = auto.len();
    let n_error = mismatched_indices.len();
    let n_success = n_images - n_error;
    Ok(CountComparison {
        n_images,
        n_success,
        n_error,
        success_pct: 100.0 * n_success as f64 / n_images as f64,
        error_pct: 100.0 * n_error as f64 / n_images as f64,
        mismatched_indices,
    })
}
