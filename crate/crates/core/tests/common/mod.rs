//! Reference implementations used to cross-check the library. Each one
//! takes a deliberately different route from the production code.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seedseg_core::{BinaryMask, Connectivity};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut ChaCha8Rng, w: u32, h: u32, density: f64) -> BinaryMask {
    let bits = (0..w * h).map(|_| rng.random_bool(density)).collect();
    BinaryMask::new(w, h, bits).unwrap()
}

fn neighbors(c: Connectivity) -> &'static [(i32, i32)] {
    match c {
        Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
        Connectivity::Eight => &[
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ],
    }
}

/// Hole filling by fixed-point relaxation: background reachability grows one
/// sweep at a time from the border until nothing changes.
pub fn fill_holes_oracle(mask: &BinaryMask, fg: Connectivity) -> BinaryMask {
    let (w, h) = (mask.width() as i32, mask.height() as i32);
    let bg_conn = match fg {
        Connectivity::Four => Connectivity::Eight,
        Connectivity::Eight => Connectivity::Four,
    };
    let at = |x: i32, y: i32| (y * w + x) as usize;
    let mut reach = vec![false; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            reach[at(x, y)] = border && !mask.get(x as u32, y as u32);
        }
    }
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                if reach[at(x, y)] || mask.get(x as u32, y as u32) {
                    continue;
                }
                let touches = neighbors(bg_conn).iter().any(|&(dx, dy)| {
                    let (nx, ny) = (x + dx, y + dy);
                    nx >= 0 && ny >= 0 && nx < w && ny < h && reach[at(nx, ny)]
                });
                if touches {
                    reach[at(x, y)] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    BinaryMask::new(w as u32, h as u32, reach.into_iter().map(|r| !r).collect()).unwrap()
}

/// Depth-first flood labeling, ids in raster order of the first pixel.
pub fn label_oracle(mask: &BinaryMask, conn: Connectivity) -> (Vec<u32>, u32) {
    let (w, h) = (mask.width() as i32, mask.height() as i32);
    let mut labels = vec![0u32; (w * h) as usize];
    let mut next = 0;
    for y0 in 0..h {
        for x0 in 0..w {
            if !mask.get(x0 as u32, y0 as u32) || labels[(y0 * w + x0) as usize] != 0 {
                continue;
            }
            next += 1;
            let mut stack = vec![(x0, y0)];
            labels[(y0 * w + x0) as usize] = next;
            while let Some((x, y)) = stack.pop() {
                for &(dx, dy) in neighbors(conn) {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let i = (ny * w + nx) as usize;
                    if mask.get(nx as u32, ny as u32) && labels[i] == 0 {
                        labels[i] = next;
                        stack.push((nx, ny));
                    }
                }
            }
        }
    }
    (labels, next)
}

/// Exhaustive Otsu search in exact rational arithmetic, straight from the
/// class weights and means: `w0 * w1 * (mu0 - mu1)^2`, strict `>` so the
/// first maximiser wins.
pub fn otsu_oracle(hist: &[u64; 256]) -> Option<u8> {
    let total: u64 = hist.iter().sum();
    if total == 0 || hist.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let big = |v: u64| BigRational::from_integer(BigInt::from(v));
    let n = big(total);
    let mut best: Option<(u8, BigRational)> = None;
    for t in 0..255usize {
        let n0: u64 = hist[..=t].iter().sum();
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let s0: u64 = (0..=t).map(|v| v as u64 * hist[v]).sum();
        let s1: u64 = (t + 1..256).map(|v| v as u64 * hist[v]).sum();
        let w0 = big(n0) / &n;
        let w1 = big(n1) / &n;
        let mu0 = big(s0) / big(n0);
        let mu1 = big(s1) / big(n1);
        let d = mu0 - mu1;
        let var = w0 * w1 * (&d * &d);
        let better = match &best {
            None => true,
            Some((_, b)) => var > *b,
        };
        if better {
            best = Some((t as u8, var));
        }
    }
    best.map(|(t, _)| t)
}

/// Textbook HSV -> RGB using the `p, q, t` sector table.
pub fn hsv_to_rgb_oracle(h: f64, s: f64, v: f64) -> [u8; 3] {
    let to8 = |f: f64| (f * 255.0).round() as u8;
    if s == 0.0 {
        return [to8(v); 3];
    }
    let hh = if h >= 360.0 { 0.0 } else { h } / 60.0;
    let i = hh.floor() as i32;
    let f = hh - f64::from(i);
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [to8(r), to8(g), to8(b)]
}

/// Component areas of a mask under `conn`, via the flood oracle.
pub fn oracle_areas(mask: &BinaryMask, conn: Connectivity) -> Vec<u64> {
    let (labels, n) = label_oracle(mask, conn);
    let mut areas = vec![0u64; n as usize + 1];
    for l in labels {
        areas[l as usize] += 1;
    }
    areas.remove(0);
    areas
}
