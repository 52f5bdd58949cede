//! Zoom-transform grid and crop geometry.
//!
//! A zoom transform resizes the smaller image edge to `S` and then cuts a
//! `crop_size` square centered on one of nine anchor points: the centers of
//! the cells of a 3x3 tiling of the resized image. All divisions are floor
//! divisions so windows are reproducible to the pixel.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::image::{crop_inside, crop_zero_pad, hflip, resize_exact, resize_smaller_edge, scaled_dims, ImageBuffer};
use crate::mock::mix64;

pub const DEFAULT_CROP_SIZE: u32 = 224;

/// The 36 default zoom scales (smaller-edge target sizes, in pixels).
pub const DEFAULT_SCALES: [u32; 36] = [
    10, 16, 32, 48, 64, 96, 122, 128, 192, 224, 235, 240, 256, 288, 320, 348, 384, 448, 460, 512, 573, 576, 640, 664,
    672, 680, 686, 690, 700, 720, 768, 798, 832, 896, 911, 1024,
];

/// Scales of the center-zoom sweep: 128 to 448 in steps of 32.
pub const CENTER_SWEEP_SCALES: [u32; 11] = [128, 160, 192, 224, 256, 288, 320, 352, 384, 416, 448];

/// Base scale of the classic 5/10-crop recipe.
pub const DEFAULT_FIVE_CROP_BASE: u32 = 256;

pub const GRID_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZoomGroup {
    ZoomIn,
    ZoomOut,
    ZoomLess,
}

impl ZoomGroup {
    pub const ALL: [ZoomGroup; 3] = [ZoomGroup::ZoomIn, ZoomGroup::ZoomOut, ZoomGroup::ZoomLess];

    /// Group of a scale relative to the crop size.
    pub fn of_scale(scale: u32, crop_size: u32) -> Self {
        match scale.cmp(&crop_size) {
            std::cmp::Ordering::Less => ZoomGroup::ZoomOut,
            std::cmp::Ordering::Equal => ZoomGroup::ZoomLess,
            std::cmp::Ordering::Greater => ZoomGroup::ZoomIn,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ZoomGroup::ZoomIn => "zoom-in",
            ZoomGroup::ZoomOut => "zoom-out",
            ZoomGroup::ZoomLess => "zoom-less",
        }
    }
}

impl fmt::Display for ZoomGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One (scale, anchor) crop recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZoomTransform {
    pub scale: u32,
    pub anchor_row: u8,
    pub anchor_col: u8,
    pub crop_size: u32,
}

impl ZoomTransform {
    pub fn new(scale: u32, anchor_row: u8, anchor_col: u8, crop_size: u32) -> Result<Self> {
        if scale == 0 || crop_size == 0 {
            return Err(Error::InvalidArgument("scale and crop size must be >= 1".into()));
        }
        if anchor_row > 2 || anchor_col > 2 {
            return Err(Error::InvalidArgument(format!("anchor ({anchor_row},{anchor_col}) outside the 3x3 grid")));
        }
        Ok(Self { scale, anchor_row, anchor_col, crop_size })
    }

    pub fn group(&self) -> ZoomGroup {
        zoom_group_of(self)
    }

    /// Top-left corner of the crop window in the resized image.
    pub fn window_origin(&self, src_w: usize, src_h: usize) -> (i64, i64) {
        let (w, h) = scaled_dims(src_w, src_h, self.scale as usize);
        zoom_window_origin(w, h, self.anchor_row, self.anchor_col, self.crop_size)
    }
}

pub fn zoom_group_of(t: &ZoomTransform) -> ZoomGroup {
    ZoomGroup::of_scale(t.scale, t.crop_size)
}

/// Reference to a grid transform by its coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformRef {
    pub scale_index: u32,
    pub row: u8,
    pub col: u8,
}

/// The ordered scale x anchor grid. Transform ids are
/// `scale_index * 9 + anchor_row * 3 + anchor_col`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformGrid {
    crop_size: u32,
    scales: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    crop_size: u32,
    scales: Vec<u32>,
    anchors: String,
    version: u32,
}

impl Default for TransformGrid {
    fn default() -> Self {
        Self { crop_size: DEFAULT_CROP_SIZE, scales: DEFAULT_SCALES.to_vec() }
    }
}

impl TransformGrid {
    pub fn new(scales: Vec<u32>, crop_size: u32) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::empty("scale list"));
        }
        if crop_size == 0 || scales.contains(&0) {
            return Err(Error::InvalidArgument("scales and crop size must be >= 1".into()));
        }
        let mut seen = scales.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != scales.len() {
            return Err(Error::InvalidArgument("duplicate scale in grid".into()));
        }
        Ok(Self { crop_size, scales })
    }

    pub fn crop_size(&self) -> u32 {
        self.crop_size
    }

    pub fn scales(&self) -> &[u32] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len() * 9
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn id_of(&self, r: TransformRef) -> Result<u32> {
        if r.scale_index as usize >= self.scales.len() || r.row > 2 || r.col > 2 {
            return Err(Error::InvalidArgument(format!("transform reference {r:?} outside grid")));
        }
        Ok(r.scale_index * 9 + r.row as u32 * 3 + r.col as u32)
    }

    pub fn ref_of(&self, id: u32) -> Result<TransformRef> {
        if id as usize >= self.len() {
            return Err(Error::UnknownTransform(id));
        }
        Ok(TransformRef { scale_index: id / 9, row: ((id % 9) / 3) as u8, col: (id % 3) as u8 })
    }

    pub fn get(&self, id: u32) -> Result<ZoomTransform> {
        let r = self.ref_of(id)?;
        Ok(ZoomTransform {
            scale: self.scales[r.scale_index as usize],
            anchor_row: r.row,
            anchor_col: r.col,
            crop_size: self.crop_size,
        })
    }

    /// All `(id, transform)` pairs in id order (scale-major, then row-major anchors).
    pub fn transforms(&self) -> impl Iterator<Item = (u32, ZoomTransform)> + '_ {
        (0..self.len() as u32).map(move |id| (id, self.get(id).expect("id in range")))
    }

    pub fn ids_in_group(&self, group: ZoomGroup) -> Vec<u32> {
        self.transforms().filter(|(_, t)| t.group() == group).map(|(id, _)| id).collect()
    }

    pub fn ids_at_anchor(&self, row: u8, col: u8) -> Vec<u32> {
        self.transforms()
            .filter(|(_, t)| t.anchor_row == row && t.anchor_col == col)
            .map(|(id, _)| id)
            .collect()
    }

    /// Canonical JSON: `{crop_size, scales, anchors: "3x3", version}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GridDoc {
            crop_size: self.crop_size,
            scales: self.scales.clone(),
            anchors: "3x3".into(),
            version: GRID_FORMAT_VERSION,
        })
        .expect("grid serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GridDoc = serde_json::from_str(text)?;
        if doc.version != GRID_FORMAT_VERSION {
            return Err(Error::format(format!("unsupported grid version {}", doc.version)));
        }
        if doc.anchors != "3x3" {
            return Err(Error::format(format!("unsupported anchor layout {:?}", doc.anchors)));
        }
        Self::new(doc.scales, doc.crop_size)
    }

    /// Hex SHA-256 of the canonical JSON; ties matrices to the grid that made them.
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Center of grid cell `(row, col)` in a `width x height` image, as `(x, y)`.
///
/// Images narrower or shorter than 3 pixels have zero-sized tiles and every
/// anchor collapses to 0 along that axis.
pub fn anchor_center(width: usize, height: usize, row: u8, col: u8) -> (usize, usize) {
    let tile_w = width / 3;
    let tile_h = height / 3;
    (col as usize * tile_w + tile_w / 2, row as usize * tile_h + tile_h / 2)
}

/// `(top, left)` of the crop window for an anchor, in already-resized coordinates.
pub fn zoom_window_origin(width: usize, height: usize, row: u8, col: u8, crop_size: u32) -> (i64, i64) {
    let (x, y) = anchor_center(width, height, row, col);
    let half = (crop_size / 2) as i64;
    (y as i64 - half, x as i64 - half)
}

/// `(top, left)` of a crop window centered on the image center.
pub fn center_window_origin(width: usize, height: usize, crop_size: u32) -> (i64, i64) {
    let half = (crop_size / 2) as i64;
    ((height / 2) as i64 - half, (width / 2) as i64 - half)
}

pub fn apply_zoom(img: &ImageBuffer, t: &ZoomTransform) -> Result<ImageBuffer> {
    let resized = resize_smaller_edge(img, t.scale as usize)?;
    let (top, left) = zoom_window_origin(resized.width(), resized.height(), t.anchor_row, t.anchor_col, t.crop_size);
    Ok(crop_zero_pad(&resized, top, left, t.crop_size as usize))
}

/// Resize the smaller edge to `scale`, then crop around the image center.
pub fn center_zoom(img: &ImageBuffer, scale: u32, crop_size: u32) -> Result<ImageBuffer> {
    let resized = resize_smaller_edge(img, scale as usize)?;
    let (top, left) = center_window_origin(resized.width(), resized.height(), crop_size);
    Ok(crop_zero_pad(&resized, top, left, crop_size as usize))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CropPosition {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
    Center,
}

impl CropPosition {
    pub const FIVE: [CropPosition; 5] = [
        CropPosition::TopLeft,
        CropPosition::TopRight,
        CropPosition::BottomLeft,
        CropPosition::BottomRight,
        CropPosition::Center,
    ];

    /// `(top, left)` of this crop inside a `width x height` image.
    pub fn origin(self, width: usize, height: usize, crop: usize) -> (usize, usize) {
        match self {
            CropPosition::TopLeft => (0, 0),
            CropPosition::TopRight => (0, width - crop),
            CropPosition::BottomLeft => (height - crop, 0),
            CropPosition::BottomRight => (height - crop, width - crop),
            CropPosition::Center => ((height - crop) / 2, (width - crop) / 2),
        }
    }
}

/// One crop of the classic 5/10-crop recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicCrop {
    pub position: CropPosition,
    pub flipped: bool,
}

/// The ten classic crops: five positions, then their mirror images in the same order.
pub fn ten_crop_specs() -> [ClassicCrop; 10] {
    let mut out = [ClassicCrop { position: CropPosition::TopLeft, flipped: false }; 10];
    for (i, p) in CropPosition::FIVE.into_iter().enumerate() {
        out[i] = ClassicCrop { position: p, flipped: false };
        out[i + 5] = ClassicCrop { position: p, flipped: true };
    }
    out
}

pub fn apply_classic_crop(img: &ImageBuffer, spec: ClassicCrop, base_scale: u32, crop: u32) -> Result<ImageBuffer> {
    let resized = resize_smaller_edge(img, base_scale as usize)?;
    classic_crop_resized(&resized, spec, crop as usize)
}

fn classic_crop_resized(resized: &ImageBuffer, spec: ClassicCrop, crop: usize) -> Result<ImageBuffer> {
    if crop == 0 || crop > resized.width() || crop > resized.height() {
        return Err(Error::InvalidArgument(format!(
            "crop {crop} does not fit the {}x{} resized image",
            resized.width(),
            resized.height()
        )));
    }
    let (top, left) = spec.position.origin(resized.width(), resized.height(), crop);
    let out = crop_inside(resized, top, left, crop, crop)?;
    Ok(if spec.flipped { hflip(&out) } else { out })
}

/// Four corner crops and the center crop after a smaller-edge resize to `base_scale`.
pub fn five_crop(img: &ImageBuffer, base_scale: u32, crop: u32) -> Result<Vec<ImageBuffer>> {
    let resized = resize_smaller_edge(img, base_scale as usize)?;
    ten_crop_specs()[..5]
        .iter()
        .map(|&s| classic_crop_resized(&resized, s, crop as usize))
        .collect()
}

/// [`five_crop`] followed by the horizontal flip of each crop.
pub fn ten_crop(img: &ImageBuffer, base_scale: u32, crop: u32) -> Result<Vec<ImageBuffer>> {
    let mut crops = five_crop(img, base_scale, crop)?;
    let flipped: Vec<_> = crops.iter().map(hflip).collect();
    crops.extend(flipped);
    Ok(crops)
}

/// Random-resized-crop parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrcParams {
    /// Fraction of the source area, sampled uniformly.
    pub area: (f64, f64),
    /// Width/height ratio, sampled log-uniformly.
    pub aspect: (f64, f64),
    pub output_size: usize,
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for RrcParams {
    fn default() -> Self {
        Self { area: (0.08, 1.0), aspect: (3.0 / 4.0, 4.0 / 3.0), output_size: 224, seed: 0, max_attempts: 10 }
    }
}

impl RrcParams {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.area;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidArgument(format!("area range ({lo}, {hi}) must satisfy 0 < lo <= hi <= 1")));
        }
        let (alo, ahi) = self.aspect;
        if !(alo > 0.0 && alo <= ahi && ahi.is_finite()) {
            return Err(Error::InvalidArgument(format!("aspect range ({alo}, {ahi}) must be positive and ordered")));
        }
        if self.output_size == 0 {
            return Err(Error::InvalidArgument("output size must be >= 1".into()));
        }
        Ok(())
    }

    /// Independent generator for the `k`-th sample of a batch.
    pub fn sub_rng(&self, k: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix64(self.seed ^ mix64(k.wrapping_add(1))))
    }
}

/// Samples a crop window `(top, left, width, height)` fully inside the image.
pub fn rrc_window<R: Rng + ?Sized>(width: usize, height: usize, p: &RrcParams, rng: &mut R) -> (usize, usize, usize, usize) {
    let area = (width * height) as f64;
    let (log_lo, log_hi) = (p.aspect.0.ln(), p.aspect.1.ln());
    for _ in 0..p.max_attempts {
        let target = area * uniform(rng, p.area.0, p.area.1);
        let aspect = uniform(rng, log_lo, log_hi).exp();
        let cw = (target * aspect).sqrt().round() as usize;
        let ch = (target / aspect).sqrt().round() as usize;
        if cw > 0 && ch > 0 && cw <= width && ch <= height {
            let top = rng.gen_range(0..=height - ch);
            let left = rng.gen_range(0..=width - cw);
            return (top, left, cw, ch);
        }
    }
    let side = width.min(height);
    ((height - side) / 2, (width - side) / 2, side, side)
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Random crop (no padding) resized to `output_size x output_size`.
pub fn rrc_sample<R: Rng + ?Sized>(img: &ImageBuffer, p: &RrcParams, rng: &mut R) -> Result<ImageBuffer> {
    p.validate()?;
    let (top, left, cw, ch) = rrc_window(img.width(), img.height(), p, rng);
    let crop = crop_inside(img, top, left, cw, ch)?;
    resize_exact(&crop, p.output_size, p.output_size)
}

/// `k` samples, the `i`-th drawn from its own seeded stream.
pub fn rrc_batch(img: &ImageBuffer, p: &RrcParams, k: usize) -> Result<Vec<ImageBuffer>> {
    (0..k as u64).map(|i| rrc_sample(img, p, &mut p.sub_rng(i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_324_stable_ids() {
        let g = TransformGrid::default();
        assert_eq!(g.len(), 324);
        let all: Vec<_> = g.transforms().collect();
        assert_eq!(all.len(), 324);
        for (id, t) in &all {
            let r = g.ref_of(*id).unwrap();
            assert_eq!(g.id_of(r).unwrap(), *id);
            assert_eq!(t.scale, DEFAULT_SCALES[r.scale_index as usize]);
            assert_eq!((t.anchor_row, t.anchor_col), (r.row, r.col));
        }
        assert_eq!(g.get(9 * 9 + 4).unwrap(), ZoomTransform::new(224, 1, 1, 224).unwrap());
        assert!(matches!(g.get(324), Err(Error::UnknownTransform(324))));
    }

    #[test]
    fn exactly_nine_zoom_less() {
        let g = TransformGrid::default();
        let less = g.ids_in_group(ZoomGroup::ZoomLess);
        assert_eq!(less, (81..90).collect::<Vec<_>>());
        assert_eq!(g.ids_in_group(ZoomGroup::ZoomOut).len(), 81);
        assert_eq!(g.ids_in_group(ZoomGroup::ZoomIn).len(), 234);
    }

    #[test]
    fn group_boundaries() {
        assert_eq!(ZoomGroup::of_scale(10, 224), ZoomGroup::ZoomOut);
        assert_eq!(ZoomGroup::of_scale(224, 224), ZoomGroup::ZoomLess);
        assert_eq!(ZoomGroup::of_scale(1024, 224), ZoomGroup::ZoomIn);
    }

    #[test]
    fn grid_json_roundtrip_and_hash() {
        let g = TransformGrid::default();
        let json = g.to_json();
        assert!(json.starts_with("{\"crop_size\":224,\"scales\":[10,16,"));
        assert!(json.ends_with("\"anchors\":\"3x3\",\"version\":1}"));
        let back = TransformGrid::from_json(&json).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.sha256(), g.sha256());
        assert_eq!(g.sha256().len(), 64);
        let other = TransformGrid::new(vec![224, 256], 224).unwrap();
        assert_ne!(other.sha256(), g.sha256());
    }

    #[test]
    fn grid_json_rejects_bad_docs() {
        assert!(TransformGrid::from_json(r#"{"crop_size":224,"scales":[1],"anchors":"3x3","version":9}"#).is_err());
        assert!(TransformGrid::from_json(r#"{"crop_size":224,"scales":[1],"anchors":"4x4","version":1}"#).is_err());
        assert!(TransformGrid::from_json(r#"{"crop_size":224,"scales":[],"anchors":"3x3","version":1}"#).is_err());
        assert!(TransformGrid::new(vec![5, 5], 224).is_err());
    }

    #[test]
    fn anchor_center_hand_traces() {
        assert_eq!(anchor_center(300, 300, 1, 2), (250, 150));
        assert_eq!(anchor_center(100, 90, 0, 0), (16, 15));
        assert_eq!(anchor_center(3, 3, 1, 1), (1, 1));
        // degenerate tiles collapse to zero
        assert_eq!(anchor_center(2, 2, 2, 2), (0, 0));
    }

    #[test]
    fn zoom_of_large_constant_needs_no_padding() {
        let img = ImageBuffer::filled(448, 448, 3, 0.3).unwrap();
        let t = ZoomTransform::new(448, 1, 1, 224).unwrap();
        let out = apply_zoom(&img, &t).unwrap();
        assert_eq!((out.width(), out.height()), (224, 224));
        assert!(out.data().iter().all(|&v| (v - 0.3).abs() < 1e-6));
    }

    #[test]
    fn zoom_of_small_image_matches_manual_crop() {
        let img = ImageBuffer::filled(100, 100, 1, 1.0).unwrap();
        let t = ZoomTransform::new(100, 1, 1, 224).unwrap();
        // tile 33, center 33 + 16 = 49, 49 - 112
        assert_eq!(t.window_origin(100, 100), (-63, -63));
        assert_eq!(apply_zoom(&img, &t).unwrap(), crop_zero_pad(&img, -63, -63, 224));
    }

    #[test]
    fn center_zoom_differs_from_center_anchor_at_226() {
        assert_eq!(zoom_window_origin(226, 226, 1, 1, 224), (0, 0));
        assert_eq!(center_window_origin(226, 226, 224), (1, 1));
        let img = ImageBuffer::from_fn(226, 226, 1, |r, c, _| ((r * 3 + c) % 7) as f32 / 6.0).unwrap();
        let a = apply_zoom(&img, &ZoomTransform::new(226, 1, 1, 224).unwrap()).unwrap();
        let b = center_zoom(&img, 226, 224).unwrap();
        assert_ne!(a, b);
        assert_eq!(b, crop_zero_pad(&img, 1, 1, 224));
    }

    #[test]
    fn center_zoom_identity_at_crop_size() {
        let img = ImageBuffer::from_fn(224, 224, 1, |r, c, _| ((r + c) % 5) as f32 / 4.0).unwrap();
        assert_eq!(center_zoom(&img, 224, 224).unwrap(), img);
        assert_eq!(CENTER_SWEEP_SCALES.len(), 11);
    }

    #[test]
    fn five_crop_origins_on_256() {
        let origins: Vec<_> = CropPosition::FIVE.iter().map(|p| p.origin(256, 256, 224)).collect();
        assert_eq!(origins, vec![(0, 0), (0, 32), (32, 0), (32, 32), (16, 16)]);
    }

    #[test]
    fn ten_crop_of_constant() {
        let img = ImageBuffer::filled(300, 200, 3, 0.7).unwrap();
        let crops = ten_crop(&img, 256, 224).unwrap();
        assert_eq!(crops.len(), 10);
        for c in &crops {
            assert_eq!((c.width(), c.height()), (224, 224));
            assert!(c.data().iter().all(|&v| (v - 0.7).abs() < 1e-6));
        }
        assert!(five_crop(&img, 100, 224).is_err());
    }

    #[test]
    fn ten_crop_appends_flips_in_order() {
        let img = ImageBuffer::from_fn(256, 256, 1, |r, c, _| ((r * 5 + c * 11) % 13) as f32 / 12.0).unwrap();
        let crops = ten_crop(&img, 256, 224).unwrap();
        for i in 0..5 {
            assert_eq!(crops[i + 5], hflip(&crops[i]));
        }
        assert_eq!(crops[4], crop_zero_pad(&img, 16, 16, 224));
        let spec = ten_crop_specs()[6];
        assert_eq!(apply_classic_crop(&img, spec, 256, 224).unwrap(), crops[6]);
    }

    #[test]
    fn rrc_degenerate_is_plain_resize() {
        let img = ImageBuffer::from_fn(40, 40, 3, |r, c, ch| ((r + 2 * c + ch) % 9) as f32 / 8.0).unwrap();
        let p = RrcParams { area: (1.0, 1.0), aspect: (1.0, 1.0), output_size: 24, ..Default::default() };
        let out = rrc_sample(&img, &p, &mut p.sub_rng(0)).unwrap();
        assert_eq!(out, resize_exact(&img, 24, 24).unwrap());
    }

    #[test]
    fn rrc_is_deterministic_per_seed() {
        let img = ImageBuffer::from_fn(64, 48, 1, |r, c, _| ((r * c) % 17) as f32 / 16.0).unwrap();
        let p = RrcParams { output_size: 32, seed: 7, ..Default::default() };
        let a = rrc_batch(&img, &p, 16).unwrap();
        let b = rrc_batch(&img, &p, 16).unwrap();
        assert_eq!(a.len(), 16);
        assert_eq!(a, b);
        // sub-streams differ
        assert!(a.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn rrc_window_stays_inside() {
        let p = RrcParams::default();
        let mut rng = p.sub_rng(3);
        for (w, h) in [(10, 10), (3, 100), (500, 7), (1, 1)] {
            for _ in 0..200 {
                let (top, left, cw, ch) = rrc_window(w, h, &p, &mut rng);
                assert!(cw >= 1 && ch >= 1 && left + cw <= w && top + ch <= h);
            }
        }
    }

    #[test]
    fn rrc_falls_back_to_centered_square() {
        // an aspect range no 3x100 image can satisfy at full area
        let p = RrcParams { area: (1.0, 1.0), aspect: (50.0, 60.0), ..Default::default() };
        let mut rng = p.sub_rng(0);
        assert_eq!(rrc_window(3, 100, &p, &mut rng), (48, 0, 3, 3));
    }

    #[test]
    fn rrc_params_validation() {
        assert!(RrcParams { area: (0.0, 1.0), ..Default::default() }.validate().is_err());
        assert!(RrcParams { area: (0.5, 0.4), ..Default::default() }.validate().is_err());
        assert!(RrcParams { aspect: (-1.0, 1.0), ..Default::default() }.validate().is_err());
        assert!(RrcParams::default().validate().is_ok());
    }
}
