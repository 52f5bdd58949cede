//! Independent reference implementations used as test oracles.
//! None of these call into the library's algorithms.

#![allow(dead_code, clippy::too_many_arguments)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> Vec<Vec<bool>> {
    (0..n).map(|_| (0..m).map(|_| rng.gen_bool(density)).collect()).collect()
}

/// Fraction of rows with a true entry in any of `cols`.
pub fn oracle_upper_bound(rows: &[Vec<bool>], cols: &[usize]) -> f64 {
    let hit = rows.iter().filter(|r| cols.iter().any(|&c| r[c])).count();
    hit as f64 / rows.len() as f64
}

/// Smallest number of columns whose union equals the union of all columns.
/// Enumerates every subset; `m` must stay small.
pub fn oracle_min_cover(rows: &[Vec<bool>]) -> usize {
    let m = rows.first().map_or(0, |r| r.len());
    assert!(m <= 20);
    let col_mask = |j: usize| -> u64 {
        rows.iter().enumerate().filter(|(_, r)| r[j]).fold(0u64, |acc, (i, _)| acc | (1 << i))
    };
    let masks: Vec<u64> = (0..m).map(col_mask).collect();
    let target = masks.iter().fold(0, |a, b| a | b);
    let mut best = m;
    for subset in 0u32..(1 << m) {
        let size = subset.count_ones() as usize;
        if size >= best {
            continue;
        }
        let cover = (0..m).filter(|j| subset >> j & 1 == 1).fold(0u64, |a, j| a | masks[j]);
        if cover == target {
            best = size;
        }
    }
    best
}

pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Keep rule written directly from the annotation protocol text.
pub fn oracle_keep(a_accepts: usize, b_votes: usize, b_accepts: usize) -> bool {
    let all_a = a_accepts == 3;
    let two_a_and_b = a_accepts == 2 && b_votes >= 1 && b_accepts == b_votes;
    all_a || two_a_and_b
}

/// Softmax in f64, max-shifted.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// Marginal entropy of a linear softmax model with weights `C x D`
/// (row-major) followed by `C` biases.
pub fn oracle_linear_marginal_entropy(params: &[f64], inputs: &[Vec<f64>], c: usize) -> f64 {
    let d = inputs[0].len();
    let mut mean = vec![0.0; c];
    for x in inputs {
        let z: Vec<f64> = (0..c)
            .map(|k| (0..d).map(|i| params[k * d + i] * x[i]).sum::<f64>() + params[c * d + k])
            .collect();
        for (m, p) in mean.iter_mut().zip(softmax(&z)) {
            *m += p / inputs.len() as f64;
        }
    }
    -mean.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

/// Pixel `(r, c, ch)` of a zero-padded window into an interleaved buffer.
pub fn window_pixel(data: &[f32], w: usize, h: usize, ch: usize, top: i64, left: i64, r: usize, c: usize, k: usize) -> f32 {
    let (y, x) = (top + r as i64, left + c as i64);
    if y < 0 || x < 0 || y >= h as i64 || x >= w as i64 {
        0.0
    } else {
        data[(y as usize * w + x as usize) * ch + k]
    }
}

/// `(src_w, src_h, scale, resized (w, h), origins (top, left) for anchors
/// (0,0) (1,1) (2,2) (0,2), center-zoom origin)`, traced by hand from the
/// floor-division anchor formulas and half-away-from-zero edge rounding.
pub type GeometryCase = (usize, usize, u32, (usize, usize), [(i64, i64); 4], (i64, i64));

pub const GEOMETRY_ANCHORS: [(u8, u8); 4] = [(0, 0), (1, 1), (2, 2), (0, 2)];

pub const GEOMETRY_CASES: [GeometryCase; 13] = [
    (640, 480, 224, (299, 224), [(-75, -63), (-1, 36), (73, 135), (-75, 135)], (0, 37)),
    (480, 640, 224, (224, 299), [(-63, -75), (36, -1), (135, 73), (-63, 73)], (37, 0)),
    (100, 100, 100, (100, 100), [(-96, -96), (-63, -63), (-30, -30), (-96, -30)], (-62, -62)),
    (100, 90, 64, (71, 64), [(-102, -101), (-81, -78), (-60, -55), (-102, -55)], (-80, -77)),
    (50, 30, 10, (17, 10), [(-111, -110), (-108, -105), (-105, -100), (-111, -100)], (-107, -104)),
    (226, 226, 226, (226, 226), [(-75, -75), (0, 0), (75, 75), (-75, 75)], (1, 1)),
    (300, 200, 448, (672, 448), [(-38, 0), (111, 224), (260, 448), (-38, 448)], (112, 224)),
    (333, 500, 256, (256, 384), [(-48, -70), (80, 15), (208, 100), (-48, 100)], (80, 16)),
    (1000, 750, 1024, (1365, 1024), [(58, 115), (399, 570), (740, 1025), (58, 1025)], (400, 570)),
    (7, 5, 16, (22, 16), [(-110, -109), (-105, -102), (-100, -95), (-110, -95)], (-104, -101)),
    (224, 224, 224, (224, 224), [(-75, -75), (-1, -1), (73, 73), (-75, 73)], (0, 0)),
    (2, 3, 3, (3, 5), [(-112, -112), (-111, -111), (-110, -110), (-112, -110)], (-110, -111)),
    (640, 427, 122, (183, 122), [(-92, -82), (-52, -21), (-12, 40), (-92, 40)], (-51, -21)),
];

/// Deterministic non-constant test image.
pub fn pattern(w: usize, h: usize, ch: usize) -> zoomlens::ImageBuffer {
    zoomlens::ImageBuffer::from_fn(w, h, ch, |r, c, k| ((r * 7 + c * 13 + k * 5) % 17) as f32 / 16.0).unwrap()
}
