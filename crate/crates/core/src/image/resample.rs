//! Separable cubic-convolution resampling.
//!
//! Kernel: Keys cubic with `a = -0.75`. On upsampling the kernel is applied
//! at unit support (2 source pixels either side). On downsampling the support
//! is stretched by the downscale factor so every source pixel contributes
//! (antialiasing). Source indices outside the image clamp to the nearest
//! edge pixel. Weights are normalized per output sample, so constant images
//! stay constant.

use super::ImageBuffer;
use crate::error::{Error, Result};

pub const CUBIC_A: f64 = -0.75;

/// Keys cubic convolution kernel with `a = -0.75`.
pub fn cubic_kernel(x: f64) -> f64 {
    let a = CUBIC_A;
    let x = x.abs();
    if x < 1.0 {
        ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        (((x - 5.0) * x + 8.0) * x - 4.0) * a
    } else {
        0.0
    }
}

/// Output dimensions of a smaller-edge resize to `target`.
///
/// The smaller edge becomes `target`; the larger edge is
/// `round(target * larger / smaller)` with halves rounded away from zero,
/// and never less than 1.
pub fn scaled_dims(width: usize, height: usize, target: usize) -> (usize, usize) {
    let (small, large) = (width.min(height) as u128, width.max(height) as u128);
    let t = target as u128;
    let scaled = ((2 * t * large + small) / (2 * small)).max(1) as usize;
    if width <= height {
        (target, if width == height { target } else { scaled })
    } else {
        (scaled, target)
    }
}

/// Resizes so the smaller edge equals `target`, preserving aspect ratio.
pub fn resize_smaller_edge(img: &ImageBuffer, target: usize) -> Result<ImageBuffer> {
    if target == 0 {
        return Err(Error::InvalidArgument("resize target must be >= 1".into()));
    }
    let (w, h) = scaled_dims(img.width(), img.height(), target);
    resize_exact(img, w, h)
}

/// Resizes to exactly `width x height`.
pub fn resize_exact(img: &ImageBuffer, width: usize, height: usize) -> Result<ImageBuffer> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!("cannot resize to {width}x{height}")));
    }
    if let Some(pos) = img.data().iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidImage(format!("non-finite sample at index {pos}")));
    }
    if width == img.width() && height == img.height() {
        return Ok(img.clone());
    }
    let ch = img.channels();
    let src: Vec<f64> = img.data().iter().map(|&v| v as f64).collect();

    // Horizontal pass: (src_w x src_h) -> (width x src_h).
    let horiz = if width == img.width() {
        src
    } else {
        let taps = Taps::new(img.width(), width);
        let mut out = vec![0.0f64; width * img.height() * ch];
        for r in 0..img.height() {
            let row = &src[r * img.width() * ch..(r + 1) * img.width() * ch];
            let dst = &mut out[r * width * ch..(r + 1) * width * ch];
            for x in 0..width {
                let (first, weights) = taps.get(x);
                for c in 0..ch {
                    let mut acc = 0.0;
                    for (k, &wt) in weights.iter().enumerate() {
                        let sx = taps.clamp(first + k as i64);
                        acc += wt * row[sx * ch + c];
                    }
                    dst[x * ch + c] = acc;
                }
            }
        }
        out
    };

    // Vertical pass: (width x src_h) -> (width x height).
    let stride = width * ch;
    let vert = if height == img.height() {
        horiz
    } else {
        let taps = Taps::new(img.height(), height);
        let mut out = vec![0.0f64; stride * height];
        for y in 0..height {
            let (first, weights) = taps.get(y);
            let dst = &mut out[y * stride..(y + 1) * stride];
            for (k, &wt) in weights.iter().enumerate() {
                let sy = taps.clamp(first + k as i64);
                let src_row = &horiz[sy * stride..(sy + 1) * stride];
                for (d, &s) in dst.iter_mut().zip(src_row) {
                    *d += wt * s;
                }
            }
        }
        out
    };

    let data = vert.into_iter().map(|v| v.clamp(0.0, 1.0) as f32).collect();
    Ok(ImageBuffer::from_parts_unchecked(width, height, ch, data))
}

/// Precomputed normalized kernel weights for one axis.
struct Taps {
    in_len: usize,
    starts: Vec<i64>,
    window: usize,
    weights: Vec<f64>,
}

impl Taps {
    fn new(in_len: usize, out_len: usize) -> Self {
        let scale = in_len as f64 / out_len as f64;
        let filter_scale = scale.max(1.0);
        let support = 2.0 * filter_scale;
        let window = (support.ceil() as usize) * 2 + 1;
        let mut starts = Vec::with_capacity(out_len);
        let mut weights = vec![0.0; out_len * window];
        for i in 0..out_len {
            let center = (i as f64 + 0.5) * scale;
            let first = (center - support).floor() as i64;
            let row = &mut weights[i * window..(i + 1) * window];
            let mut total = 0.0;
            for (k, w) in row.iter_mut().enumerate() {
                let pos = (first + k as i64) as f64 + 0.5;
                *w = cubic_kernel((pos - center) / filter_scale);
                total += *w;
            }
            if total != 0.0 {
                row.iter_mut().for_each(|w| *w /= total);
            }
            starts.push(first);
        }
        Self { in_len, starts, window, weights }
    }

    fn get(&self, i: usize) -> (i64, &[f64]) {
        (self.starts[i], &self.weights[i * self.window..(i + 1) * self.window])
    }

    fn clamp(&self, idx: i64) -> usize {
        idx.clamp(0, self.in_len as i64 - 1) as usize
    }
}
