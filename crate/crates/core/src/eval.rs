//! Accuracy analytics over correctness matrices.
//!
//! Upper-bound accuracy over a transform subset is the fraction of images for
//! which at least one transform in the subset yields a correct top-1
//! prediction. Everything here is a boolean/count reduction, so results do
//! not depend on iteration order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{TransformGrid, ZoomGroup};
use crate::store::{ColumnKind, CorrectnessMatrix};

/// A single reported number plus what it was computed over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub n_images: usize,
    pub metric: String,
    pub value: f64,
    pub subset: String,
}

impl EvalReport {
    pub fn percent(&self) -> String {
        format!("{:.2}", self.value * 100.0)
    }
}

pub fn reports_to_csv(reports: &[EvalReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dataset", "n_images", "metric", "subset", "value", "percent"])?;
    for r in reports {
        w.write_record([
            r.dataset.clone(),
            r.n_images.to_string(),
            r.metric.clone(),
            r.subset.clone(),
            r.value.to_string(),
            r.percent(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn require_images(cm: &CorrectnessMatrix) -> Result<()> {
    if cm.n_images() == 0 {
        return Err(Error::empty("image set"));
    }
    Ok(())
}

/// Mean of one column.
pub fn top1_accuracy(cm: &CorrectnessMatrix, transform_id: u32) -> Result<f64> {
    require_images(cm)?;
    let col = cm.axes().column_index(transform_id).ok_or(Error::UnknownTransform(transform_id))?;
    let hits = (0..cm.n_images()).filter(|&i| cm.get(i, col)).count();
    Ok(hits as f64 / cm.n_images() as f64)
}

/// Per-image OR over `columns` (matrix column positions).
pub fn solved_mask(cm: &CorrectnessMatrix, columns: &[usize]) -> Vec<bool> {
    (0..cm.n_images())
        .map(|i| {
            let row = cm.row(i);
            columns.iter().any(|&c| row[c])
        })
        .collect()
}

fn fraction(mask: &[bool]) -> f64 {
    mask.iter().filter(|&&b| b).count() as f64 / mask.len() as f64
}

/// Fraction of images solved by at least one transform in `subset`.
pub fn upper_bound_accuracy(cm: &CorrectnessMatrix, subset: &[u32]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::empty("transform subset"));
    }
    require_images(cm)?;
    let cols = cm.columns_for(subset)?;
    Ok(fraction(&solved_mask(cm, &cols)))
}

/// Upper bound over every column of the matrix.
pub fn full_upper_bound(cm: &CorrectnessMatrix) -> Result<f64> {
    upper_bound_accuracy(cm, cm.transform_ids())
}

/// Expected accuracy of guessing `n_crops` distinct classes out of `n_classes`.
pub fn random_baseline(n_crops: usize, n_classes: usize) -> Result<f64> {
    if n_crops == 0 || n_classes == 0 {
        return Err(Error::InvalidArgument("crop and class counts must be >= 1".into()));
    }
    Ok((n_crops as f64 / n_classes as f64).min(1.0))
}

/// Upper bounds for each of the nine anchors, row-major, with the delta of
/// each cell against the center cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorHeatmap {
    /// `None` where the subset holds no transform at that anchor.
    pub cells: [[Option<f64>; 3]; 3],
    pub deltas: [[Option<f64>; 3]; 3],
}

impl AnchorHeatmap {
    /// Two 3x3 CSV blocks (values, then deltas) separated by a blank line.
    /// Absent cells are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (title, block) in [("upper_bound", &self.cells), ("delta_vs_center", &self.deltas)] {
            let _ = writeln!(out, "# {title}");
            for row in block {
                let fields: Vec<String> = row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()).collect();
                let _ = writeln!(out, "{}", fields.join(","));
            }
            out.push('\n');
        }
        out.pop();
        out
    }
}

pub fn per_anchor_upper_bound(cm: &CorrectnessMatrix, grid: &TransformGrid, subset: &[u32]) -> Result<AnchorHeatmap> {
    require_images(cm)?;
    let mut cells = [[None; 3]; 3];
    for (r, row) in cells.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let mut ids = Vec::new();
            for &id in subset {
                let t = grid.get(id)?;
                if t.anchor_row as usize == r && t.anchor_col as usize == c {
                    ids.push(id);
                }
            }
            if !ids.is_empty() {
                *cell = Some(upper_bound_accuracy(cm, &ids)?);
            }
        }
    }
    let center = cells[1][1];
    let deltas = cells.map(|row| row.map(|v| Some(v? - center?)));
    Ok(AnchorHeatmap { cells, deltas })
}

/// Solve and exclusive-solve rates per zoom group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupBreakdown {
    pub n_images: usize,
    /// Upper bound over the group's columns.
    pub solves: BTreeMap<ZoomGroup, f64>,
    /// Fraction solvable by this group and by neither of the others.
    pub only: BTreeMap<ZoomGroup, f64>,
}

pub fn zoom_group_breakdown(cm: &CorrectnessMatrix, grid: &TransformGrid) -> Result<GroupBreakdown> {
    require_images(cm)?;
    let mut masks = BTreeMap::new();
    for g in ZoomGroup::ALL {
        let cols: Vec<usize> = cm
            .transform_ids()
            .iter()
            .enumerate()
            .filter_map(|(j, &id)| match grid.get(id) {
                Ok(t) if t.group() == g => Some(Ok(j)),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<_>>()?;
        masks.insert(g, solved_mask(cm, &cols));
    }
    let n = cm.n_images();
    let mut solves = BTreeMap::new();
    let mut only = BTreeMap::new();
    for g in ZoomGroup::ALL {
        solves.insert(g, fraction(&masks[&g]));
        let exclusive = (0..n)
            .filter(|&i| masks[&g][i] && ZoomGroup::ALL.iter().all(|&o| o == g || !masks[&o][i]))
            .count();
        only.insert(g, exclusive as f64 / n as f64);
    }
    Ok(GroupBreakdown { n_images: n, solves, only })
}

/// Top-1 accuracy at each center-zoom scale, in the order requested.
pub fn center_zoom_sweep(cm: &CorrectnessMatrix, scales: &[u32]) -> Result<Vec<(u32, f64)>> {
    if cm.axes().column_kind != ColumnKind::CenterZoom {
        return Err(Error::inconsistent("sweep needs a center-zoom matrix"));
    }
    scales
        .iter()
        .map(|&s| {
            if cm.axes().column_index(s).is_none() {
                return Err(Error::inconsistent(format!("no column for sweep scale {s}")));
            }
            Ok((s, top1_accuracy(cm, s)?))
        })
        .collect()
}
