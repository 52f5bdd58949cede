//! Seeded stand-in classifier.
//!
//! Logits are a pure function of `(seed, image_id, column)`:
//!
//! ```text
//! base   = mix64(seed ^ mix64(fnv1a64(image_id)))
//! state  = mix64(base ^ column_key)
//! z[c]   = 2 * u53(mix64(state ^ (c + 1) * 0x9E3779B97F4A7C15)) - 1
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer, `u53(x) = (x >> 11) / 2^53`
//! and `column_key = kind_tag << 56 | id` (tag 0 grid, 1 center zoom,
//! 2 classic crop, 3 raw buffer hashed with FNV-1a). Planted rules then add
//! `+10` to the planted class where the rule's predicate holds and `-10`
//! where it does not, so the planted class is the top-1 prediction exactly
//! on the matching columns.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{TransformGrid, ZoomGroup, ZoomTransform, DEFAULT_CROP_SIZE};
use crate::image::ImageBuffer;
use crate::store::{ColumnKind, LabelSet, LabelTable, LogitMatrix, MatrixAxes};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const LABEL_SALT: u64 = 0x6C61_6265_6C73_2121;
pub const PLANTED_MARGIN: f32 = 10.0;

/// SplitMix64 finalizer.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3))
}

fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 53) as f64
}

/// A matrix column as seen by the scorer.
#[derive(Debug, Clone, Copy)]
pub enum Column<'a> {
    Grid { id: u32, transform: ZoomTransform },
    CenterZoom { scale: u32 },
    Crop { index: u32 },
    Buffer(&'a ImageBuffer),
}

impl Column<'_> {
    fn key(&self) -> u64 {
        match self {
            Column::Grid { id, .. } => *id as u64,
            Column::CenterZoom { scale } => 1 << 56 | *scale as u64,
            Column::Crop { index } => 2 << 56 | *index as u64,
            Column::Buffer(img) => {
                let bytes: Vec<u8> = img.data().iter().flat_map(|v| v.to_le_bytes()).collect();
                3 << 56 ^ fnv1a64(&bytes)
            }
        }
    }

    fn scale(&self) -> Option<(u32, u32)> {
        match self {
            Column::Grid { transform, .. } => Some((transform.scale, transform.crop_size)),
            Column::CenterZoom { scale } => Some((*scale, DEFAULT_CROP_SIZE)),
            _ => None,
        }
    }

    fn id(&self) -> Option<u32> {
        match self {
            Column::Grid { id, .. } => Some(*id),
            Column::CenterZoom { scale } => Some(*scale),
            Column::Crop { index } => Some(*index),
            Column::Buffer(_) => None,
        }
    }
}

/// Which columns a planted rule fires on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "when", rename_all = "kebab-case")]
pub enum Predicate {
    Always,
    Never,
    Group { group: ZoomGroup },
    Anchor { row: u8, col: u8 },
    Scale { scale: u32 },
    /// Column ids of the matrix's own column family.
    Ids { ids: Vec<u32> },
}

impl Predicate {
    pub fn matches(&self, column: &Column<'_>) -> bool {
        match self {
            Predicate::Always => true,
            Predicate::Never => false,
            Predicate::Group { group } => column.scale().is_some_and(|(s, c)| ZoomGroup::of_scale(s, c) == *group),
            Predicate::Anchor { row, col } => {
                matches!(column, Column::Grid { transform, .. } if transform.anchor_row == *row && transform.anchor_col == *col)
            }
            Predicate::Scale { scale } => column.scale().is_some_and(|(s, _)| s == *scale),
            Predicate::Ids { ids } => column.id().is_some_and(|id| ids.contains(&id)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedRule {
    #[serde(flatten)]
    pub predicate: Predicate,
    pub class: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockScorerConfig {
    pub seed: u64,
    pub n_classes: usize,
    #[serde(default)]
    pub planted: BTreeMap<String, Vec<PlantedRule>>,
}

impl MockScorerConfig {
    pub fn new(seed: u64, n_classes: usize) -> Self {
        Self { seed, n_classes, planted: BTreeMap::new() }
    }

    pub fn plant(mut self, image_id: impl Into<String>, predicate: Predicate, class: u32) -> Self {
        self.planted.entry(image_id.into()).or_default().push(PlantedRule { predicate, class });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_classes < 2 {
            return Err(Error::InvalidArgument("mock scorer needs >= 2 classes".into()));
        }
        for (id, rules) in &self.planted {
            if let Some(r) = rules.iter().find(|r| r.class as usize >= self.n_classes) {
                return Err(Error::inconsistent(format!("planted class {} for `{id}` out of range", r.class)));
            }
        }
        Ok(())
    }

    /// Ground truth consistent with the plants: the planted classes of an
    /// image, or one hashed class otherwise.
    pub fn labels_for(&self, image_id: &str) -> LabelSet {
        match self.planted.get(image_id) {
            Some(rules) if !rules.is_empty() => {
                LabelSet::new(image_id, rules.iter().map(|r| r.class)).expect("non-empty")
            }
            _ => {
                let h = mix64(self.seed ^ LABEL_SALT ^ mix64(fnv1a64(image_id.as_bytes())));
                LabelSet::new(image_id, [(h % self.n_classes as u64) as u32]).expect("non-empty")
            }
        }
    }

    pub fn label_table(&self, image_ids: &[String]) -> LabelTable {
        image_ids.iter().map(|id| self.labels_for(id)).collect()
    }
}

pub fn mock_score(cfg: &MockScorerConfig, image_id: &str, column: &Column<'_>) -> Vec<f32> {
    let base = mix64(cfg.seed ^ mix64(fnv1a64(image_id.as_bytes())));
    let state = mix64(base ^ column.key());
    let mut logits: Vec<f32> = (0..cfg.n_classes as u64)
        .map(|c| (2.0 * unit_interval(mix64(state ^ (c + 1).wrapping_mul(GOLDEN))) - 1.0) as f32)
        .collect();
    if let Some(rules) = cfg.planted.get(image_id) {
        for rule in rules {
            let delta = if rule.predicate.matches(column) { PLANTED_MARGIN } else { -PLANTED_MARGIN };
            logits[rule.class as usize] += delta;
        }
    }
    logits
}

fn build_matrix(cfg: &MockScorerConfig, image_ids: &[String], columns: &[Column<'_>], axes: MatrixAxes) -> Result<LogitMatrix> {
    cfg.validate()?;
    let values: Vec<f32> = image_ids
        .par_iter()
        .flat_map_iter(|id| columns.iter().flat_map(move |col| mock_score(cfg, id, col)))
        .collect();
    LogitMatrix::new(axes, cfg.n_classes, values)
}

/// Logits over every transform of `grid`, tagged with the grid hash.
pub fn mock_grid_matrix(cfg: &MockScorerConfig, image_ids: &[String], grid: &TransformGrid) -> Result<LogitMatrix> {
    let columns: Vec<Column> = grid.transforms().map(|(id, transform)| Column::Grid { id, transform }).collect();
    let axes = MatrixAxes::new(image_ids.to_vec(), grid.transforms().map(|(id, _)| id).collect(), ColumnKind::Grid)
        .with_grid_sha256(grid.sha256());
    build_matrix(cfg, image_ids, &columns, axes)
}

/// Logits over center-zoom columns; column ids are the scales.
pub fn mock_center_matrix(cfg: &MockScorerConfig, image_ids: &[String], scales: &[u32]) -> Result<LogitMatrix> {
    let columns: Vec<Column> = scales.iter().map(|&scale| Column::CenterZoom { scale }).collect();
    let axes = MatrixAxes::new(image_ids.to_vec(), scales.to_vec(), ColumnKind::CenterZoom);
    build_matrix(cfg, image_ids, &columns, axes)
}

/// Logits over the classic ten-crop list.
pub fn mock_crop_matrix(cfg: &MockScorerConfig, image_ids: &[String]) -> Result<LogitMatrix> {
    let columns: Vec<Column> = (0..10).map(|index| Column::Crop { index }).collect();
    let axes = MatrixAxes::new(image_ids.to_vec(), (0..10).collect(), ColumnKind::Crop);
    build_matrix(cfg, image_ids, &columns, axes)
}

/// `img000`, `img001`, ... (zero-padded to at least three digits).
pub fn image_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("img{i:03}")).collect()
}
