//! Fusing per-crop predictions into one decision.
//!
//! Crop logits are softmaxed first; fusion then takes the per-class mean or
//! max over crops.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::argmax;
use crate::error::{Error, Result};
use crate::geometry::{ten_crop_specs, ClassicCrop, TransformGrid, ZoomGroup, ZoomTransform};
use crate::store::{ColumnKind, LogitMatrix};

const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Numerically stable softmax in f64.
pub fn softmax(logits: &[f32]) -> Vec<f64> {
    let max = logits.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v as f64));
    let exps: Vec<f64> = logits.iter().map(|&v| (v as f64 - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// `K` probability vectors over the same `C` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct CropDistributions {
    dists: Vec<Vec<f64>>,
}

impl CropDistributions {
    pub fn new(dists: Vec<Vec<f64>>) -> Result<Self> {
        let c = match dists.first() {
            Some(d) if !d.is_empty() => d.len(),
            Some(_) => return Err(Error::empty("class vector")),
            None => return Err(Error::empty("crop distribution set")),
        };
        for (k, d) in dists.iter().enumerate() {
            if d.len() != c {
                return Err(Error::inconsistent(format!("crop {k} has {} classes, expected {c}", d.len())));
            }
            if d.iter().any(|&p| !p.is_finite() || p < 0.0) {
                return Err(Error::inconsistent(format!("crop {k} has a negative or non-finite probability")));
            }
            let total: f64 = d.iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::inconsistent(format!("crop {k} sums to {total}, not 1")));
            }
        }
        Ok(Self { dists })
    }

    pub fn from_logits<'a>(logits: impl IntoIterator<Item = &'a [f32]>) -> Result<Self> {
        Self::new(logits.into_iter().map(softmax).collect())
    }

    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.dists[0].len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregateMode {
    Mean,
    Max,
}

impl FromStr for AggregateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "max" => Ok(Self::Max),
            _ => Err(Error::InvalidArgument(format!("unknown aggregation mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregated {
    pub class: usize,
    pub fused: Vec<f64>,
}

impl Aggregated {
    pub fn confidence(&self) -> f64 {
        self.fused[self.class]
    }
}

pub fn aggregate(dists: &CropDistributions, mode: AggregateMode) -> Aggregated {
    let c = dists.n_classes();
    let fused: Vec<f64> = match mode {
        // summing in sorted order keeps the result independent of crop order
        AggregateMode::Mean => (0..c)
            .map(|j| {
                let mut col: Vec<f64> = dists.dists.iter().map(|d| d[j]).collect();
                col.sort_by(f64::total_cmp);
                col.iter().sum::<f64>() / dists.len() as f64
            })
            .collect(),
        AggregateMode::Max => (0..c)
            .map(|j| dists.dists.iter().map(|d| d[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect(),
    };
    Aggregated { class: argmax(&fused), fused }
}

/// Which crops to fuse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CropPolicy {
    ZoomIn,
    ZoomOut,
    ZoomLess,
    FiveCrop,
    TenCrop,
}

impl CropPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            CropPolicy::ZoomIn => "zoom-in",
            CropPolicy::ZoomOut => "zoom-out",
            CropPolicy::ZoomLess => "zoom-less",
            CropPolicy::FiveCrop => "5crop",
            CropPolicy::TenCrop => "10crop",
        }
    }
}

impl fmt::Display for CropPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CropPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zoom-in" => Ok(Self::ZoomIn),
            "zoom-out" => Ok(Self::ZoomOut),
            "zoom-less" => Ok(Self::ZoomLess),
            "5crop" | "five-crop" => Ok(Self::FiveCrop),
            "10crop" | "ten-crop" => Ok(Self::TenCrop),
            _ => Err(Error::InvalidArgument(format!("unknown crop policy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CropSpec {
    Zoom { id: u32, transform: ZoomTransform },
    /// Position `index` in the classic ten-crop list.
    Classic { index: u32, crop: ClassicCrop },
}

/// Crops for a policy. Zoom-group policies keep the members of `cover`
/// that fall in the group; 5/10-crop ignore the cover.
pub fn crop_set_for(policy: CropPolicy, grid: &TransformGrid, cover: &[u32]) -> Result<Vec<CropSpec>> {
    let group = match policy {
        CropPolicy::ZoomIn => ZoomGroup::ZoomIn,
        CropPolicy::ZoomOut => ZoomGroup::ZoomOut,
        CropPolicy::ZoomLess => ZoomGroup::ZoomLess,
        CropPolicy::FiveCrop | CropPolicy::TenCrop => {
            let k = if policy == CropPolicy::FiveCrop { 5 } else { 10 };
            return Ok(ten_crop_specs()[..k]
                .iter()
                .enumerate()
                .map(|(i, &crop)| CropSpec::Classic { index: i as u32, crop })
                .collect());
        }
    };
    let mut specs = Vec::new();
    for &id in cover {
        let transform = grid.get(id)?;
        if transform.group() == group {
            specs.push(CropSpec::Zoom { id, transform });
        }
    }
    if specs.is_empty() {
        return Err(Error::empty(format!("crop set for policy {policy}: cover has no {group} transforms")));
    }
    Ok(specs)
}

/// One fused prediction, serialized as a JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub image_id: String,
    pub class: usize,
    pub confidence: f64,
}

/// Fuses the columns of `lm` selected by `specs`, image by image.
pub fn aggregate_matrix(lm: &LogitMatrix, specs: &[CropSpec], mode: AggregateMode) -> Result<Vec<Prediction>> {
    let columns = specs
        .iter()
        .map(|spec| {
            let (kind, id) = match *spec {
                CropSpec::Zoom { id, .. } => (ColumnKind::Grid, id),
                CropSpec::Classic { index, .. } => (ColumnKind::Crop, index),
            };
            if lm.axes().column_kind != kind {
                return Err(Error::inconsistent(format!(
                    "crop spec needs {kind:?} columns, matrix has {:?}",
                    lm.axes().column_kind
                )));
            }
            lm.axes().column_index(id).ok_or(Error::UnknownTransform(id))
        })
        .collect::<Result<Vec<_>>>()?;
    if columns.is_empty() {
        return Err(Error::empty("crop set"));
    }
    lm.axes()
        .image_ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let dists = CropDistributions::from_logits(columns.iter().map(|&j| lm.logits(i, j)))?;
            let agg = aggregate(&dists, mode);
            Ok(Prediction { image_id: id.clone(), class: agg.class, confidence: agg.confidence() })
        })
        .collect()
}

pub fn predictions_to_jsonl(preds: &[Prediction]) -> Result<String> {
    let mut out = String::new();
    for p in preds {
        out.push_str(&serde_json::to_string(p)?);
        out.push('\n');
    }
    Ok(out)
}
