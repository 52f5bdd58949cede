use std::fs;
use std::io::Write;
use std::path::Path;

use super::ImageBuffer;
use crate::error::{Error, Result};

/// Magic prefix of the raw float32 tensor format.
pub const ZIB_MAGIC: &[u8; 4] = b"ZIB1";

/// Decodes a file by extension: `.png`, `.ppm`, or `.zib`.
pub fn decode_file(path: &Path) -> Result<ImageBuffer> {
    let bytes = fs::read(path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "png" => decode_png(&bytes),
        "ppm" => decode_ppm(&bytes),
        "zib" => read_zib(&bytes),
        _ => Err(Error::format(format!("unsupported image extension for {}", path.display()))),
    }
}

/// Decodes PNG; grayscale inputs become 1-channel, everything else RGB.
/// Alpha is dropped.
pub fn decode_png(bytes: &[u8]) -> Result<ImageBuffer> {
    let dynamic = ::image::load_from_memory_with_format(bytes, ::image::ImageFormat::Png)
        .map_err(|e| Error::format(format!("png decode failed: {e}")))?;
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    if dynamic.color().has_color() {
        let rgb = dynamic.to_rgb8();
        ImageBuffer::new(w, h, 3, rgb.into_raw().into_iter().map(|v| v as f32 / 255.0).collect())
    } else {
        let luma = dynamic.to_luma8();
        ImageBuffer::new(w, h, 1, luma.into_raw().into_iter().map(|v| v as f32 / 255.0).collect())
    }
}

/// Decodes binary PPM (`P6`) with maxval up to 255.
pub fn decode_ppm(bytes: &[u8]) -> Result<ImageBuffer> {
    let mut pos = 0usize;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format("truncated PPM header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| Error::format("non-ascii PPM header"))?);
    }
    if fields[0] != "P6" {
        return Err(Error::format(format!("unsupported PPM magic {:?}", fields[0])));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::format(format!("bad PPM header field {s:?}")));
    let (w, h, maxval) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(Error::format(format!("unsupported PPM maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let need = w * h * 3;
    let raster = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::format("truncated PPM raster"))?;
    ImageBuffer::new(w, h, 3, raster.iter().map(|&v| v as f32 / maxval as f32).collect())
}

/// Encodes as 8-bit `P6`. Single-channel images are replicated to RGB.
pub fn encode_ppm(img: &ImageBuffer) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    let quant = |v: f32| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    for px in img.data().chunks_exact(img.channels()) {
        if img.channels() == 1 {
            out.extend_from_slice(&[quant(px[0]); 3]);
        } else {
            out.extend(px.iter().map(|&v| quant(v)));
        }
    }
    out
}

pub fn write_ppm(img: &ImageBuffer, path: &Path) -> Result<()> {
    fs::write(path, encode_ppm(img))?;
    Ok(())
}

/// Parses the raw tensor format: `ZIB1`, then little-endian u32 width,
/// height, channels, then `width * height * channels` little-endian f32.
pub fn read_zib(bytes: &[u8]) -> Result<ImageBuffer> {
    if bytes.len() < 16 || &bytes[..4] != ZIB_MAGIC {
        return Err(Error::format("missing ZIB1 header"));
    }
    let field = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let (w, h, ch) = (field(0), field(1), field(2));
    let body = &bytes[16..];
    if body.len() != w * h * ch * 4 {
        return Err(Error::format(format!(
            "ZIB1 body is {} bytes, expected {} for {w}x{h}x{ch}",
            body.len(),
            w * h * ch * 4
        )));
    }
    let data = body
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    ImageBuffer::new(w, h, ch, data)
}

pub fn write_zib(img: &ImageBuffer, mut out: impl Write) -> Result<()> {
    out.write_all(ZIB_MAGIC)?;
    for v in [img.width(), img.height(), img.channels()] {
        out.write_all(&(v as u32).to_le_bytes())?;
    }
    for v in img.data() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}
