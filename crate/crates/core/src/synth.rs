//! Deterministic synthetic seed scenes with exact ground truth.
//!
//! Seeds are filled rotated ellipses in flat palette colors, placed by
//! rejection sampling so that no two objects come closer than `min_gap`.
//! Some seeds get an interior disc painted in the background color, and
//! small dust specks are scattered between them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SegmentationParams;
use crate::raster::{Rgb, RgbImage};
use crate::segment::is_blue_background;

/// Background triples of the four blue scanner trays, lightest first.
pub const LIGHT_BLUE: Rgb = [140, 220, 250];
pub const MEDIUM_LIGHT_BLUE: Rgb = [25, 130, 210];
pub const MEDIUM_DARK_BLUE: Rgb = [20, 60, 150];
pub const DARK_BLUE: Rgb = [30, 60, 100];

pub const BLUE_BACKGROUNDS: [(&str, Rgb); 4] = [
    ("light", LIGHT_BLUE),
    ("mediumlight", MEDIUM_LIGHT_BLUE),
    ("mediumdark", MEDIUM_DARK_BLUE),
    ("dark", DARK_BLUE),
];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

/// Tans and near-blacks. Every entry differs in luma by at least 34 levels
/// from all four blue backgrounds, so seed outlines clear the default edge
/// threshold of the content crop.
pub const DEFAULT_PALETTE: [Rgb; 6] = [
    [200, 150, 90],
    [190, 140, 60],
    [185, 150, 110],
    [175, 135, 95],
    [25, 20, 15],
    [30, 20, 12],
];

/// Attempts allowed per object before placement gives up.
const ATTEMPTS_PER_OBJECT: usize = 5_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: u32,
    pub height: u32,
    pub n_seeds: usize,
    /// Semi-axis range in pixels, `(min, max)`.
    pub axis_range: (f64, f64),
    /// Minimum distance in pixels between any two objects.
    pub min_gap: u32,
    pub palette: Vec<Rgb>,
    pub n_dust: usize,
    /// Probability that a seed gets a background-colored interior hole.
    pub hole_prob: f64,
    pub rng_seed: u64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            width: 800,
            height: 600,
            n_seeds: 13,
            axis_range: (10.0, 16.0),
            min_gap: 5,
            palette: DEFAULT_PALETTE.to_vec(),
            n_dust: 13,
            hole_prob: 0.3,
            rng_seed: 0,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.width == 0 || self.height == 0 {
            return bad("scene dimensions must be >= 1".into());
        }
        let (lo, hi) = self.axis_range;
        if !(lo >= 3.0 && hi >= lo && hi.is_finite()) {
            return bad(format!(
                "axis range must satisfy 3 <= min <= max, got {lo}..{hi}"
            ));
        }
        // keeps every seed above a third of the largest seed's area
        if (hi / lo).powi(2) > 2.7 {
            return bad(format!(
                "axis range {lo}..{hi} is too wide: (max/min)^2 must be <= 2.7"
            ));
        }
        if self.min_gap < 2 {
            return bad("min_gap must be >= 2 so objects never touch diagonally".into());
        }
        if !(0.0..=1.0).contains(&self.hole_prob) {
            return bad(format!(
                "hole_prob must lie in [0, 1], got {}",
                self.hole_prob
            ));
        }
        if self.palette.is_empty() {
            return bad("palette must not be empty".into());
        }
        let params = SegmentationParams::default();
        if let Some(c) = self
            .palette
            .iter()
            .find(|&&[r, g, b]| is_blue_background(r, g, b, &params))
        {
            return bad(format!("palette color {c:?} classifies as blue background"));
        }
        Ok(())
    }

    fn dust_radius(&self) -> f64 {
        (0.3 * self.axis_range.0).max(1.0)
    }
}

/// One rasterised seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedTruth {
    pub center: (f64, f64),
    /// Semi-axes `(a, b)` in pixels.
    pub axes: (f64, f64),
    /// Rotation of the `a` axis, radians.
    pub rotation: f64,
    pub color: Rgb,
    /// Pixels covered by the filled ellipse, hole included.
    pub area_px: u64,
    pub hole_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub count: usize,
    pub per_seed: Vec<SeedTruth>,
}

#[derive(Debug, Clone, PartialEq)]
struct Dust {
    center: (f64, f64),
    radius: f64,
    color: Rgb,
}

/// Object placement of a scene, independent of the background it is drawn on.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneLayout {
    width: u32,
    height: u32,
    seeds: Vec<SeedTruth>,
    dust: Vec<Dust>,
}

fn ellipse_contains(s: &SeedTruth, dx: f64, dy: f64) -> bool {
    let (sin, cos) = s.rotation.sin_cos();
    let u = (dx * cos + dy * sin) / s.axes.0;
    let v = (-dx * sin + dy * cos) / s.axes.1;
    u * u + v * v <= 1.0
}

/// Pixel bounds `[x0, x1] x [y0, y1]` of a circle, clipped to the frame.
fn circle_bounds(c: (f64, f64), r: f64, w: u32, h: u32) -> Option<(u32, u32, u32, u32)> {
    let x0 = (c.0 - r).floor().max(0.0);
    let y0 = (c.1 - r).floor().max(0.0);
    let x1 = (c.0 + r).ceil().min(f64::from(w) - 1.0);
    let y1 = (c.1 + r).ceil().min(f64::from(h) - 1.0);
    (x0 <= x1 && y0 <= y1).then_some((x0 as u32, y0 as u32, x1 as u32, y1 as u32))
}

impl SceneLayout {
    pub fn truth(&self) -> GroundTruth {
        GroundTruth {
            count: self.seeds.len(),
            per_seed: self.seeds.clone(),
        }
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Rasterised pixel count of every dust speck.
    pub fn dust_areas(&self) -> Vec<u64> {
        self.dust
            .iter()
            .map(|d| {
                let mut n = 0;
                self.for_each_disc_pixel(d.center, d.radius, |_, _| n += 1);
                n
            })
            .collect()
    }

    fn for_each_disc_pixel(&self, c: (f64, f64), r: f64, mut f: impl FnMut(u32, u32)) {
        if let Some((x0, y0, x1, y1)) = circle_bounds(c, r, self.width, self.height) {
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let (dx, dy) = (f64::from(x) - c.0, f64::from(y) - c.1);
                    if dx * dx + dy * dy <= r * r {
                        f(x, y);
                    }
                }
            }
        }
    }

    fn for_each_seed_pixel(&self, s: &SeedTruth, mut f: impl FnMut(u32, u32)) {
        let r = s.axes.0.max(s.axes.1);
        if let Some((x0, y0, x1, y1)) = circle_bounds(s.center, r, self.width, self.height) {
            for y in y0..=y1 {
                for x in x0..=x1 {
                    if ellipse_contains(s, f64::from(x) - s.center.0, f64::from(y) - s.center.1) {
                        f(x, y);
                    }
                }
            }
        }
    }

    /// The same objects translated by `(dx, dy)`; fails if any would leave the frame.
    pub fn shifted(&self, (dx, dy): (i32, i32)) -> Result<SceneLayout> {
        if (dx, dy) == (0, 0) {
            return Ok(self.clone());
        }
        let (fdx, fdy) = (f64::from(dx), f64::from(dy));
        let (w, h) = (f64::from(self.width) - 1.0, f64::from(self.height) - 1.0);
        let fits = |c: (f64, f64), r: f64| {
            c.0 + fdx - r >= 0.0 && c.1 + fdy - r >= 0.0 && c.0 + fdx + r <= w && c.1 + fdy + r <= h
        };
        let seeds_fit = self
            .seeds
            .iter()
            .all(|s| fits(s.center, s.axes.0.max(s.axes.1)));
        let dust_fit = self.dust.iter().all(|d| fits(d.center, d.radius));
        if !(seeds_fit && dust_fit) {
            return Err(Error::ShiftOutOfFrame { dx, dy });
        }
        let mut out = self.clone();
        for s in &mut out.seeds {
            s.center = (s.center.0 + fdx, s.center.1 + fdy);
        }
        for d in &mut out.dust {
            d.center = (d.center.0 + fdx, d.center.1 + fdy);
        }
        Ok(out)
    }

    /// Draws the layout on a uniform background.
    pub fn render(&self, background: Rgb) -> RgbImage {
        let mut img = RgbImage::filled(self.width, self.height, background);
        for s in &self.seeds {
            self.for_each_seed_pixel(s, |x, y| img.set(x, y, s.color));
            if let Some(r) = s.hole_radius {
                self.for_each_disc_pixel(s.center, r, |x, y| img.set(x, y, background));
            }
        }
        for d in &self.dust {
            self.for_each_disc_pixel(d.center, d.radius, |x, y| img.set(x, y, d.color));
        }
        img
    }
}

struct Placed {
    center: (f64, f64),
    radius: f64,
}

fn try_place(
    rng: &mut ChaCha8Rng,
    spec: &SceneSpec,
    placed: &[Placed],
    radius: f64,
    shift: (i32, i32),
) -> Option<(f64, f64)> {
    let border = f64::from(spec.min_gap);
    let gap = f64::from(spec.min_gap);
    // leave room so the object also stays in frame after `shift`
    let (dx, dy) = (f64::from(shift.0), f64::from(shift.1));
    let lo_x = border + radius + (-dx).max(0.0);
    let hi_x = f64::from(spec.width) - 1.0 - border - radius - dx.max(0.0);
    let lo_y = border + radius + (-dy).max(0.0);
    let hi_y = f64::from(spec.height) - 1.0 - border - radius - dy.max(0.0);
    if lo_x > hi_x || lo_y > hi_y {
        return None;
    }
    for _ in 0..ATTEMPTS_PER_OBJECT {
        let c = (rng.random_range(lo_x..=hi_x), rng.random_range(lo_y..=hi_y));
        let clear = placed.iter().all(|p| {
            let (dx, dy) = (p.center.0 - c.0, p.center.1 - c.1);
            let min = p.radius + radius + gap;
            dx * dx + dy * dy >= min * min
        });
        if clear {
            return Some(c);
        }
    }
    None
}

/// Places seeds and dust for `spec`. Deterministic in `spec.rng_seed`.
pub fn generate_layout(spec: &SceneSpec) -> Result<SceneLayout> {
    pair_layout(spec, (0, 0))
}

/// Layout used by [`generate_pair`]: like [`generate_layout`], but objects keep
/// enough distance from the frame to stay inside it after `shift`.
pub fn pair_layout(spec: &SceneSpec, shift: (i32, i32)) -> Result<SceneLayout> {
    spec.validate()?;
    // the largest possible seed must fit between the borders once shifted
    let room = |extent: u32, d: i32| {
        f64::from(extent) - 1.0 - 2.0 * f64::from(spec.min_gap) - f64::from(d.unsigned_abs())
            >= 2.0 * spec.axis_range.1
    };
    if shift != (0, 0) && !(room(spec.width, shift.0) && room(spec.height, shift.1)) {
        return Err(Error::ShiftOutOfFrame {
            dx: shift.0,
            dy: shift.1,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut placed: Vec<Placed> = Vec::new();
    let mut layout = SceneLayout {
        width: spec.width,
        height: spec.height,
        seeds: Vec::with_capacity(spec.n_seeds),
        dust: Vec::new(),
    };
    let (lo, hi) = spec.axis_range;

    for i in 0..spec.n_seeds {
        let axes = (rng.random_range(lo..=hi), rng.random_range(lo..=hi));
        let rotation = rng.random_range(0.0..std::f64::consts::PI);
        let color = spec.palette[rng.random_range(0..spec.palette.len())];
        let has_hole = rng.random_bool(spec.hole_prob);
        let radius = axes.0.max(axes.1);
        let center =
            try_place(&mut rng, spec, &placed, radius, shift).ok_or(Error::PlacementFailure {
                placed: i,
                requested: spec.n_seeds,
            })?;
        placed.push(Placed { center, radius });
        let hole_radius = has_hole.then(|| (0.35 * axes.0.min(axes.1)).floor().max(1.0));
        let mut seed = SeedTruth {
            center,
            axes,
            rotation,
            color,
            area_px: 0,
            hole_radius,
        };
        let mut area = 0;
        layout.for_each_seed_pixel(&seed, |_, _| area += 1);
        seed.area_px = area;
        layout.seeds.push(seed);
    }

    // dust only makes sense next to real seeds; with none it would be the largest object
    if spec.n_seeds > 0 {
        let radius = spec.dust_radius();
        for i in 0..spec.n_dust {
            let color = spec.palette[rng.random_range(0..spec.palette.len())];
            let center = try_place(&mut rng, spec, &placed, radius, shift).ok_or(
                Error::PlacementFailure {
                    placed: spec.n_seeds + i,
                    requested: spec.n_seeds + spec.n_dust,
                },
            )?;
            placed.push(Placed { center, radius });
            layout.dust.push(Dust {
                center,
                radius,
                color,
            });
        }
    }
    Ok(layout)
}

pub fn generate_scene(spec: &SceneSpec, background: Rgb) -> Result<(RgbImage, GroundTruth)> {
    let layout = generate_layout(spec)?;
    Ok((layout.render(background), layout.truth()))
}

/// Renders the same layout on white and, translated by `shift`, on black.
/// Objects are placed so that both renderings keep them fully in frame.
pub fn generate_pair(
    spec: &SceneSpec,
    shift: (i32, i32),
) -> Result<(RgbImage, RgbImage, GroundTruth)> {
    let layout = pair_layout(spec, shift)?;
    let moved = layout.shifted(shift)?;
    Ok((layout.render(WHITE), moved.render(BLACK), layout.truth()))
}

/// Parses a named tray color or an `R,G,B` triple.
pub fn parse_background(s: &str) -> Result<Rgb> {
    let lower = s.trim().to_ascii_lowercase();
    if let Some((_, c)) = BLUE_BACKGROUNDS.iter().find(|(n, _)| *n == lower) {
        return Ok(*c);
    }
    let parts: Vec<&str> = lower.split(',').map(str::trim).collect();
    if parts.len() == 3 {
        let mut c = [0u8; 3];
        for (slot, p) in c.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidParams(format!("bad color component {p:?} in {s:?}")))?;
        }
        return Ok(c);
    }
    Err(Error::InvalidParams(format!(
        "background must be light|mediumlight|mediumdark|dark|R,G,B, got {s:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::luma;

    #[test]
    fn no_seeds_gives_uniform_background() {
        let spec = SceneSpec {
            n_seeds: 0,
            ..Default::default()
        };
        let (img, truth) = generate_scene(&spec, LIGHT_BLUE).unwrap();
        assert_eq!(truth.count, 0);
        assert!(img.pixels().iter().all(|&p| p == LIGHT_BLUE));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let spec = SceneSpec {
            rng_seed: 42,
            ..Default::default()
        };
        let a = generate_scene(&spec, DARK_BLUE).unwrap();
        let b = generate_scene(&spec, DARK_BLUE).unwrap();
        assert_eq!(a, b);
        let other = SceneSpec {
            rng_seed: 43,
            ..Default::default()
        };
        assert_ne!(generate_scene(&other, DARK_BLUE).unwrap().0, a.0);
    }

    #[test]
    fn layout_is_background_independent() {
        let spec = SceneSpec::default();
        let (_, t1) = generate_scene(&spec, LIGHT_BLUE).unwrap();
        let (_, t2) = generate_scene(&spec, DARK_BLUE).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn palette_contrasts_with_every_tray() {
        let threshold = f64::from(SegmentationParams::default().edge_threshold);
        for c in DEFAULT_PALETTE {
            for (name, bg) in BLUE_BACKGROUNDS {
                let step = f64::from(luma(c).abs_diff(luma(bg)));
                assert!(
                    4.0 * step >= threshold + 16.0,
                    "{c:?} on {name}: step {step}"
                );
            }
        }
    }

    #[test]
    fn rejects_blue_palette_and_bad_specs() {
        let blue = SceneSpec {
            palette: vec![[30, 60, 100]],
            ..Default::default()
        };
        assert!(blue.validate().is_err());
        let wide = SceneSpec {
            axis_range: (4.0, 10.0),
            ..Default::default()
        };
        assert!(wide.validate().is_err());
        let tight = SceneSpec {
            min_gap: 1,
            ..Default::default()
        };
        assert!(tight.validate().is_err());
    }

    #[test]
    fn overcrowded_scene_fails_placement() {
        let spec = SceneSpec {
            width: 60,
            height: 60,
            n_seeds: 50,
            ..Default::default()
        };
        assert!(matches!(
            generate_scene(&spec, LIGHT_BLUE),
            Err(Error::PlacementFailure { .. })
        ));
    }

    #[test]
    fn pair_without_shift_differs_only_on_background() {
        let spec = SceneSpec {
            hole_prob: 0.0,
            ..Default::default()
        };
        let (white, black, _) = generate_pair(&spec, (0, 0)).unwrap();
        for (w, b) in white.pixels().iter().zip(black.pixels()) {
            if w != b {
                assert_eq!((*w, *b), (WHITE, BLACK));
            }
        }
    }

    #[test]
    fn shift_out_of_frame() {
        let spec = SceneSpec {
            width: 100,
            height: 100,
            n_seeds: 4,
            n_dust: 0,
            ..Default::default()
        };
        assert!(matches!(
            generate_pair(&spec, (90, 0)),
            Err(Error::ShiftOutOfFrame { dx: 90, dy: 0 })
        ));
    }

    #[test]
    fn backgrounds_parse() {
        assert_eq!(parse_background("light").unwrap(), LIGHT_BLUE);
        assert_eq!(parse_background("MediumDark").unwrap(), MEDIUM_DARK_BLUE);
        assert_eq!(parse_background("1, 2,3").unwrap(), [1, 2, 3]);
        assert!(parse_background("teal").is_err());
        assert!(parse_background("1,2,300").is_err());
    }
}
