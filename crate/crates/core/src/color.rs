//! Color conversions and the pre-processing stage: luminance, Sobel edges
//! and the edge-driven content crop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{GrayImage, Rect, Rgb, RgbImage};

/// Hue/saturation/brightness triple. Hue in degrees `[0, 360)`, the other
/// two as fractions in `[0, 1]`. Achromatic colors have `h = 0`, `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsbColor {
    pub h: f64,
    pub s: f64,
    pub b: f64,
}

/// BT.601 luma, rounded half up, computed in integer arithmetic so that
/// exact `.5` sums round consistently.
#[inline]
pub fn luma(px: Rgb) -> u8 {
    let sum = 299 * u32::from(px[0]) + 587 * u32::from(px[1]) + 114 * u32::from(px[2]);
    ((sum + 500) / 1000) as u8
}

pub fn to_grayscale(img: &RgbImage) -> GrayImage {
    let values = img.pixels().iter().map(|&p| u16::from(luma(p))).collect();
    GrayImage::new(img.width(), img.height(), values).expect("same dimensions as source")
}

/// Hue in degrees for an 8-bit triple, from the hexcone sector formula.
#[inline]
pub fn hue(r: u8, g: u8, b: u8) -> f64 {
    let (rf, gf, bf) = (f64::from(r), f64::from(g), f64::from(b));
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    if max == min {
        return 0.0;
    }
    let delta = f64::from(max - min);
    let h = if max == r {
        60.0 * ((gf - bf) / delta)
    } else if max == g {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    wrap_degrees(h)
}

fn wrap_degrees(h: f64) -> f64 {
    let w = h.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

pub fn rgb_to_hsb(r: u8, g: u8, b: u8) -> HsbColor {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let s = if max == 0 {
        0.0
    } else {
        f64::from(max - min) / f64::from(max)
    };
    HsbColor {
        h: hue(r, g, b),
        s,
        b: f64::from(max) / 255.0,
    }
}

/// Inverse hexcone conversion, rounding each channel to the nearest level.
pub fn hsb_to_rgb(c: HsbColor) -> Rgb {
    let v = c.b.clamp(0.0, 1.0);
    let s = c.s.clamp(0.0, 1.0);
    let chroma = v * s;
    let sector = wrap_degrees(c.h) / 60.0;
    let x = chroma * (1.0 - ((sector % 2.0) - 1.0).abs());
    let (r1, g1, b1) = match sector as u32 {
        0 => (chroma, x, 0.0),
        1 => (x, chroma, 0.0),
        2 => (0.0, chroma, x),
        3 => (0.0, x, chroma),
        4 => (x, 0.0, chroma),
        _ => (chroma, 0.0, x),
    };
    let m = v - chroma;
    let to8 = |f: f64| ((f + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [to8(r1), to8(g1), to8(b1)]
}

/// 3x3 Sobel gradient magnitude, `round(sqrt(gx^2 + gy^2))`. Border pixels
/// are 0, and images narrower or shorter than 3 pixels are all 0.
pub fn sobel_edges(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let src = img.values();
    let mut out = vec![0u16; w * h];
    if w >= 3 && h >= 3 {
        for y in 1..h - 1 {
            let up = &src[(y - 1) * w..y * w];
            let mid = &src[y * w..(y + 1) * w];
            let down = &src[(y + 1) * w..(y + 2) * w];
            let row = &mut out[y * w..(y + 1) * w];
            for x in 1..w - 1 {
                let p = |r: &[u16], i: usize| i32::from(r[i]);
                let gx = (p(up, x + 1) + 2 * p(mid, x + 1) + p(down, x + 1))
                    - (p(up, x - 1) + 2 * p(mid, x - 1) + p(down, x - 1));
                let gy = (p(down, x - 1) + 2 * p(down, x) + p(down, x + 1))
                    - (p(up, x - 1) + 2 * p(up, x) + p(up, x + 1));
                if gx == 0 && gy == 0 {
                    continue;
                }
                let mag = (f64::from(gx * gx + gy * gy)).sqrt().round();
                row[x] = mag.min(f64::from(u16::MAX)) as u16;
            }
        }
    }
    GrayImage::new(img.width(), img.height(), out).expect("same dimensions as source")
}

/// Tightest box around every pixel with magnitude `>= threshold`, grown by
/// `margin` on each side and clamped to the image. Falls back to the full
/// image when nothing reaches the threshold.
pub fn content_bbox(edges: &GrayImage, threshold: u16, margin: u32) -> Rect {
    let (w, h) = edges.dimensions();
    let mut bounds: Option<(u32, u32, u32, u32)> = None;
    for (y, row) in edges.values().chunks(w as usize).enumerate() {
        let first = row.iter().position(|&v| v >= threshold);
        let Some(first) = first else { continue };
        let last = row.iter().rposition(|&v| v >= threshold).unwrap_or(first);
        let (y, first, last) = (y as u32, first as u32, last as u32);
        bounds = Some(match bounds {
            None => (first, y, last, y),
            Some((x0, y0, x1, _)) => (x0.min(first), y0, x1.max(last), y),
        });
    }
    match bounds {
        None => Rect::full(w, h),
        Some((x0, y0, x1, y1)) => {
            let x0 = x0.saturating_sub(margin);
            let y0 = y0.saturating_sub(margin);
            let x1 = x1.saturating_add(margin).min(w - 1);
            let y1 = y1.saturating_add(margin).min(h - 1);
            Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1)
        }
    }
}

pub fn crop(img: &RgbImage, rect: Rect) -> Result<RgbImage> {
    let (w, h) = img.dimensions();
    if !rect.fits_in(w, h) {
        return Err(Error::RectOutOfBounds {
            rect,
            width: w,
            height: h,
        });
    }
    let mut pixels = Vec::with_capacity(rect.w as usize * rect.h as usize);
    for y in rect.y..rect.y + rect.h {
        let start = (y * w + rect.x) as usize;
        pixels.extend_from_slice(&img.pixels()[start..start + rect.w as usize]);
    }
    RgbImage::new(rect.w, rect.h, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grayscale_values() {
        let img = RgbImage::new(
            4,
            1,
            vec![[0, 0, 0], [255, 255, 255], [140, 220, 250], [100, 100, 100]],
        )
        .unwrap();
        assert_eq!(to_grayscale(&img).values(), &[0, 255, 200, 100]);
    }

    #[test]
    fn hsb_examples() {
        let blue = rgb_to_hsb(0, 0, 255);
        assert_eq!((blue.h, blue.s, blue.b), (240.0, 1.0, 1.0));

        let light = rgb_to_hsb(140, 220, 250);
        assert!((light.h - 196.363_636).abs() < 1e-5);
        assert!((light.s - 0.44).abs() < 1e-12);
        assert!((light.b - 250.0 / 255.0).abs() < 1e-12);

        let dark = rgb_to_hsb(30, 60, 100);
        assert!((dark.h - 214.285_714).abs() < 1e-5);
        assert!((dark.s - 0.70).abs() < 1e-12);
        assert!((dark.b - 0.392_157).abs() < 1e-6);

        let gray = rgb_to_hsb(77, 77, 77);
        assert_eq!((gray.h, gray.s), (0.0, 0.0));
        assert_eq!(rgb_to_hsb(0, 0, 0).s, 0.0);
        // red sector wraps negative hues
        assert!((rgb_to_hsb(255, 0, 51).h - 348.0).abs() < 1e-9);
    }

    fn step_image(w: u32, h: u32, col: u32) -> GrayImage {
        let values = (0..h)
            .flat_map(|_| (0..w).map(move |x| if x <= col { 0 } else { 255 }))
            .collect();
        GrayImage::new(w, h, values).unwrap()
    }

    #[test]
    fn sobel_constant_is_zero() {
        let e = sobel_edges(&GrayImage::filled(6, 5, 123));
        assert!(e.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn sobel_vertical_step() {
        let e = sobel_edges(&step_image(8, 6, 3));
        for y in 1..5 {
            for x in 0..8 {
                let want = if x == 3 || x == 4 { 1020 } else { 0 };
                assert_eq!(e.get(x, y), want, "({x},{y})");
            }
        }
        assert!((0..8).all(|x| e.get(x, 0) == 0 && e.get(x, 5) == 0));
    }

    #[test]
    fn center_only_change_is_invisible() {
        // neither kernel weights the center tap, so this non-constant image has no edges
        let mut img = GrayImage::filled(3, 3, 0);
        img.set(1, 1, 255);
        assert!(sobel_edges(&img).values().iter().all(|&v| v == 0));
    }

    #[test]
    fn sobel_tiny_images_are_zero() {
        let img = GrayImage::new(2, 5, vec![0, 255, 255, 0, 0, 255, 255, 0, 0, 255]).unwrap();
        assert!(sobel_edges(&img).values().iter().all(|&v| v == 0));
    }

    #[test]
    fn sobel_peak_fits_u16() {
        let mut img = GrayImage::filled(3, 3, 0);
        for (x, y) in [(2, 0), (2, 1), (1, 0), (2, 2), (0, 0)] {
            img.set(x, y, 255);
        }
        assert!(sobel_edges(&img).get(1, 1) <= 1442);
    }

    fn transpose(img: &GrayImage) -> GrayImage {
        let (w, h) = img.dimensions();
        let mut out = GrayImage::filled(h, w, 0);
        for y in 0..h {
            for x in 0..w {
                out.set(y, x, img.get(x, y));
            }
        }
        out
    }

    proptest! {
        #[test]
        fn sobel_commutes_with_transpose(w in 3u32..9, h in 3u32..9, seed in any::<u64>()) {
            let mut state = seed;
            let values = (0..w * h)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 56) as u16
                })
                .collect();
            let img = GrayImage::new(w, h, values).unwrap();
            prop_assert_eq!(sobel_edges(&transpose(&img)), transpose(&sobel_edges(&img)));
        }

        #[test]
        fn constant_images_have_no_edges(w in 1u32..9, h in 1u32..9, v in any::<u16>()) {
            let zero = sobel_edges(&GrayImage::filled(w, h, v)).values().iter().all(|&m| m == 0);
            prop_assert!(zero);
        }

        #[test]
        fn any_step_between_columns_is_detected(w in 3u32..12, h in 3u32..12, col in 0u32..10, lift in 1u16..300) {
            let col = col % (w - 1);
            let values = (0..h)
                .flat_map(|_| (0..w).map(move |x| if x <= col { 0 } else { lift }))
                .collect();
            let img = GrayImage::new(w, h, values).unwrap();
            prop_assert!(sobel_edges(&img).values().iter().any(|&m| m > 0));
        }

        #[test]
        fn gray_pixels_are_fixed_points(v in any::<u8>()) {
            prop_assert_eq!(luma([v, v, v]), v);
        }

        #[test]
        fn bbox_contains_hot_pixels_and_shrinks_with_margin(
            hot in proptest::collection::vec((0u32..40, 0u32..30), 1..6),
            margin in 0u32..12,
        ) {
            let mut edges = GrayImage::filled(40, 30, 0);
            for &(x, y) in &hot {
                edges.set(x, y, 200);
            }
            let r = content_bbox(&edges, 150, margin);
            prop_assert!(r.fits_in(40, 30));
            for &(x, y) in &hot {
                prop_assert!(r.contains(f64::from(x), f64::from(y)));
            }
            if margin > 0 {
                let smaller = content_bbox(&edges, 150, margin - 1);
                prop_assert!(smaller.w <= r.w && smaller.h <= r.h);
                prop_assert!(smaller.x >= r.x && smaller.y >= r.y);
            }
        }
    }

    #[test]
    fn bbox_examples() {
        let mut edges = GrayImage::filled(300, 300, 0);
        edges.set(20, 10, 500);
        edges.set(200, 100, 500);
        assert_eq!(content_bbox(&edges, 1, 10), Rect::new(10, 0, 201, 111));

        assert_eq!(
            content_bbox(&GrayImage::filled(30, 20, 0), 1, 10),
            Rect::full(30, 20)
        );

        let mut hot = GrayImage::filled(12, 12, 0);
        hot.set(5, 5, 300);
        assert_eq!(content_bbox(&hot, 120, 0), Rect::new(5, 5, 1, 1));
        // below threshold counts as nothing
        assert_eq!(content_bbox(&hot, 301, 0), Rect::full(12, 12));
    }

    #[test]
    fn crop_examples() {
        let fixture = RgbImage::new(
            2,
            2,
            vec![[0, 0, 0], [255, 255, 255], [140, 220, 250], [120, 80, 40]],
        )
        .unwrap();
        assert_eq!(crop(&fixture, Rect::full(2, 2)).unwrap(), fixture);
        assert_eq!(
            crop(&fixture, Rect::new(0, 0, 1, 1)).unwrap().pixels(),
            &[[0, 0, 0]]
        );
        assert_eq!(
            crop(&fixture, Rect::new(1, 1, 1, 1)).unwrap().pixels(),
            &[[120, 80, 40]]
        );
        assert!(matches!(
            crop(&fixture, Rect::new(1, 0, 2, 2)),
            Err(Error::RectOutOfBounds { .. })
        ));
    }
}
