//! Floating-point image buffers and the pixel operations every transform is
//! built from: smaller-edge resize, zero-padded crop and horizontal flip.

mod io;
mod resample;

pub use io::{decode_file, decode_png, decode_ppm, encode_ppm, read_zib, write_ppm, write_zib, ZIB_MAGIC};
pub use resample::{cubic_kernel, resize_exact, resize_smaller_edge, scaled_dims, CUBIC_A};

use crate::error::{Error, Result};

/// Row-major, channel-interleaved image with samples in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("zero-sized image {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!("unsupported channel count {channels}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!("non-finite sample at index {pos}")));
        }
        Ok(Self { width, height, channels, data })
    }

    /// Image with every sample set to `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: f32) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Builds an image by evaluating `f(row, col, channel)` for every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for r in 0..height {
            for c in 0..width {
                for ch in 0..channels {
                    data.push(f(r, c, ch));
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    pub(crate) fn from_parts_unchecked(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        Self { width, height, channels, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, channel: usize) -> f32 {
        self.data[(row * self.width + col) * self.channels + channel]
    }

    pub fn smaller_edge(&self) -> usize {
        self.width.min(self.height)
    }

    /// Per-pixel channel mean, as a single-channel image.
    pub fn to_gray(&self) -> ImageBuffer {
        if self.channels == 1 {
            return self.clone();
        }
        let data = self
            .data
            .chunks_exact(self.channels)
            .map(|px| px.iter().sum::<f32>() / self.channels as f32)
            .collect();
        Self::from_parts_unchecked(self.width, self.height, 1, data)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum()
    }
}

/// Extracts a `size x size` window whose top-left corner sits at
/// `(top, left)` in source coordinates. Source pixels outside the image read
/// as zero.
pub fn crop_zero_pad(img: &ImageBuffer, top: i64, left: i64, size: usize) -> ImageBuffer {
    crop_rect_zero_pad(img, top, left, size, size)
}

pub(crate) fn crop_rect_zero_pad(img: &ImageBuffer, top: i64, left: i64, out_w: usize, out_h: usize) -> ImageBuffer {
    let ch = img.channels;
    let mut data = vec![0.0f32; out_w * out_h * ch];
    let (w, h) = (img.width as i64, img.height as i64);

    // Column range of the window that overlaps the source.
    let c0 = (-left).clamp(0, out_w as i64) as usize;
    let c1 = (w - left).clamp(0, out_w as i64) as usize;
    if c0 < c1 {
        for r in 0..out_h {
            let sr = top + r as i64;
            if sr < 0 || sr >= h {
                continue;
            }
            let src_start = ((sr * w + left + c0 as i64) as usize) * ch;
            let dst_start = (r * out_w + c0) * ch;
            let len = (c1 - c0) * ch;
            data[dst_start..dst_start + len].copy_from_slice(&img.data[src_start..src_start + len]);
        }
    }
    ImageBuffer::from_parts_unchecked(out_w, out_h, ch, data)
}

/// Rectangular crop that must lie fully inside the image.
pub fn crop_inside(img: &ImageBuffer, top: usize, left: usize, width: usize, height: usize) -> Result<ImageBuffer> {
    if width == 0 || height == 0 || top + height > img.height || left + width > img.width {
        return Err(Error::InvalidArgument(format!(
            "crop {width}x{height} at ({top},{left}) exceeds {}x{} image",
            img.width, img.height
        )));
    }
    Ok(crop_rect_zero_pad(img, top as i64, left as i64, width, height))
}

/// Mirrors each row left to right.
pub fn hflip(img: &ImageBuffer) -> ImageBuffer {
    let ch = img.channels;
    let mut data = Vec::with_capacity(img.data.len());
    for row in img.data.chunks_exact(img.width * ch) {
        for px in row.chunks_exact(ch).rev() {
            data.extend_from_slice(px);
        }
    }
    ImageBuffer::from_parts_unchecked(img.width, img.height, ch, data)
}
