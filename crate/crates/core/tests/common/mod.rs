//! Brute-force reference implementations shared by the integration tests.
//! Written from the textbook definitions, without reusing library internals.

#![allow(dead_code, clippy::needless_range_loop)]

use hybridevs::{PatternSpec, RawImage, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rgb(rng: &mut impl Rng, w: usize, h: usize) -> RgbImage {
    let data = (0..w * h * 3).map(|_| rng.gen()).collect();
    RgbImage::new(w, h, data).unwrap()
}

pub fn random_raw(rng: &mut impl Rng, w: usize, h: usize) -> RawImage {
    let data = (0..w * h).map(|_| rng.gen_range(0..=1023)).collect();
    RawImage::new(w, h, data).unwrap()
}

/// `b` = `a` plus small noise, so SSIM lands well inside (0, 1).
pub fn perturbed(rng: &mut impl Rng, a: &RgbImage, amplitude: i16) -> RgbImage {
    let data = a
        .data()
        .iter()
        .map(|&v| (v as i16 + rng.gen_range(-amplitude..=amplitude)).clamp(0, 255) as u8)
        .collect();
    RgbImage::new(a.width(), a.height(), data).unwrap()
}

pub fn naive_psnr(a: &RgbImage, b: &RgbImage) -> f64 {
    let mut sum = 0.0f64;
    for (p, q) in a.data().iter().zip(b.data()) {
        let d = *p as f64 - *q as f64;
        sum += d * d;
    }
    if sum == 0.0 {
        return 100.0;
    }
    let mse = sum / a.data().len() as f64;
    20.0 * 255.0f64.log10() - 10.0 * mse.log10()
}

/// Direct windowed SSIM: 2-D Gaussian weights, moments around the mean.
pub fn naive_ssim(a: &RgbImage, b: &RgbImage) -> f64 {
    const N: usize = 11;
    let sigma = 1.5f64;
    let mut weights = [[0.0f64; N]; N];
    let mut total = 0.0;
    for (i, row) in weights.iter_mut().enumerate() {
        for (j, w) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *w = (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp();
            total += *w;
        }
    }
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let (w, h) = (a.width(), a.height());
    let mut sum = 0.0;
    let mut count = 0usize;
    for c in 0..3 {
        for y0 in 0..=h - N {
            for x0 in 0..=w - N {
                let at = |img: &RgbImage, i: usize, j: usize| img.pixel(x0 + j, y0 + i)[c] as f64;
                let (mut mx, mut my) = (0.0, 0.0);
                for i in 0..N {
                    for j in 0..N {
                        let wt = weights[i][j] / total;
                        mx += wt * at(a, i, j);
                        my += wt * at(b, i, j);
                    }
                }
                let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
                for i in 0..N {
                    for j in 0..N {
                        let wt = weights[i][j] / total;
                        let (dx, dy) = (at(a, i, j) - mx, at(b, i, j) - my);
                        vx += wt * dx * dx;
                        vy += wt * dy * dy;
                        cov += wt * dx * dy;
                    }
                }
                sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                    / ((mx * mx + my * my + c1) * (vx + vy + c2));
                count += 1;
            }
        }
    }
    sum / count as f64
}

/// RGGB channel index at (x, y).
pub fn bayer_channel(x: usize, y: usize) -> usize {
    match (y % 2, x % 2) {
        (0, 0) => 0,
        (1, 1) => 2,
        _ => 1,
    }
}

/// Bilinear demosaic as a convolution of each sparse channel plane.
/// Only valid two pixels away from the border. Values in 10-bit units.
pub fn bilinear_oracle(raw: &RawImage, x: usize, y: usize) -> [f64; 3] {
    const G: [[i64; 3]; 3] = [[0, 1, 0], [1, 4, 1], [0, 1, 0]];
    const RB: [[i64; 3]; 3] = [[1, 2, 1], [2, 4, 2], [1, 2, 1]];
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let k = if c == 1 { &G } else { &RB };
        let mut acc = 0i64;
        for (i, row) in k.iter().enumerate() {
            for (j, &wt) in row.iter().enumerate() {
                let (sx, sy) = (x + j - 1, y + i - 1);
                if bayer_channel(sx, sy) == c {
                    acc += wt * raw.get(sx, sy) as i64;
                }
            }
        }
        *o = acc as f64 / 4.0;
    }
    out
}

/// Gradient-corrected 5×5 kernels, weights ×8, indexed `[dy + 2][dx + 2]`.
pub const K_G_AT_RB: [[f64; 5]; 5] = [
    [0.0, 0.0, -1.0, 0.0, 0.0],
    [0.0, 0.0, 2.0, 0.0, 0.0],
    [-1.0, 2.0, 4.0, 2.0, -1.0],
    [0.0, 0.0, 2.0, 0.0, 0.0],
    [0.0, 0.0, -1.0, 0.0, 0.0],
];
pub const K_ROW: [[f64; 5]; 5] = [
    [0.0, 0.0, 0.5, 0.0, 0.0],
    [0.0, -1.0, 0.0, -1.0, 0.0],
    [-1.0, 4.0, 5.0, 4.0, -1.0],
    [0.0, -1.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.5, 0.0, 0.0],
];
pub const K_COL: [[f64; 5]; 5] = [
    [0.0, 0.0, -1.0, 0.0, 0.0],
    [0.0, -1.0, 4.0, -1.0, 0.0],
    [0.5, 0.0, 5.0, 0.0, 0.5],
    [0.0, -1.0, 4.0, -1.0, 0.0],
    [0.0, 0.0, -1.0, 0.0, 0.0],
];
pub const K_RB_AT_BR: [[f64; 5]; 5] = [
    [0.0, 0.0, -1.5, 0.0, 0.0],
    [0.0, 2.0, 0.0, 2.0, 0.0],
    [-1.5, 0.0, 6.0, 0.0, -1.5],
    [0.0, 2.0, 0.0, 2.0, 0.0],
    [0.0, 0.0, -1.5, 0.0, 0.0],
];
pub const K_IDENTITY: [[f64; 5]; 5] = [
    [0.0; 5],
    [0.0; 5],
    [0.0, 0.0, 8.0, 0.0, 0.0],
    [0.0; 5],
    [0.0; 5],
];

/// Kernel producing channel `c` at a pixel with Bayer parity (x, y).
pub fn gradient_kernel(x: usize, y: usize, c: usize) -> &'static [[f64; 5]; 5] {
    let site = bayer_channel(x, y);
    if site == c {
        return &K_IDENTITY;
    }
    match (site, c) {
        (0, 1) | (2, 1) => &K_G_AT_RB,
        (0, 2) | (2, 0) => &K_RB_AT_BR,
        // green site: red row carries red horizontally
        (1, 0) if y.is_multiple_of(2) => &K_ROW,
        (1, 0) => &K_COL,
        (1, 2) if y.is_multiple_of(2) => &K_COL,
        _ => &K_ROW,
    }
}

/// Remosaic by brute force: for each color, try every assignment of the
/// tile's source positions to that color's Bayer targets and keep the first
/// with the smallest summed squared displacement. Returns `source[target]`.
pub fn brute_force_table(spec: &PatternSpec) -> [usize; 16] {
    fn search(
        targets: &[usize],
        sources: &[usize],
        used: &mut Vec<bool>,
        current: &mut Vec<usize>,
        best: &mut Option<(usize, Vec<usize>)>,
    ) {
        let k = current.len();
        if k == targets.len() {
            let cost = targets
                .iter()
                .zip(current.iter())
                .map(|(&t, &s)| {
                    let (ty, tx) = ((t / 4) as i64, (t % 4) as i64);
                    let (sy, sx) = ((s / 4) as i64, (s % 4) as i64);
                    ((ty - sy).pow(2) + (tx - sx).pow(2)) as usize
                })
                .sum();
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                *best = Some((cost, current.clone()));
            }
            return;
        }
        for i in 0..sources.len() {
            if !used[i] {
                used[i] = true;
                current.push(sources[i]);
                search(targets, sources, used, current, best);
                current.pop();
                used[i] = false;
            }
        }
    }

    let mut table = [usize::MAX; 16];
    for c in 0..3 {
        let targets: Vec<usize> = (0..16)
            .filter(|&t| bayer_channel(t % 4, t / 4) == c)
            .collect();
        let sources: Vec<usize> = (0..16)
            .filter(|&s| spec.underlying_color(s % 4, s / 4).channel() == Some(c))
            .collect();
        let mut best = None;
        search(
            &targets,
            &sources,
            &mut vec![false; sources.len()],
            &mut Vec::new(),
            &mut best,
        );
        for (t, s) in targets.iter().zip(best.unwrap().1) {
            table[*t] = s;
        }
    }
    table
}
