//! Deterministic end-to-end run on mock data.
//!
//! grid -> mock logits -> correctness -> evaluation -> greedy cover ->
//! aggregation -> hard-set manifest, plus one adaptation episode on a
//! synthetic image. Every artifact lands in one directory, and the same seed
//! always produces the same bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aggregate::{aggregate_matrix, crop_set_for, predictions_to_jsonl, AggregateMode, CropPolicy};
use crate::cover::{greedy_min_cover, CoverInstance};
use crate::error::Result;
use crate::eval::{
    center_zoom_sweep, full_upper_bound, per_anchor_upper_bound, reports_to_csv, top1_accuracy, zoom_group_breakdown,
    EvalReport,
};
use crate::geometry::{TransformGrid, TransformRef, ZoomGroup, CENTER_SWEEP_SCALES, DEFAULT_SCALES};
use crate::hardset::{
    build_manifest, unclassifiable_filter, AnnotationRecord, BuildOptions, SourceInput, Vote, DEFAULT_EXCLUDED_CLASSES,
};
use crate::image::ImageBuffer;
use crate::memo::{memo_adapt, MemoConfig, ToyLinearSoftmax};
use crate::mock::{image_ids, mix64, mock_center_matrix, mock_grid_matrix, MockScorerConfig, Predicate};
use crate::store::{correctness_from_logits, LabelSpace};

pub const DEMO_IMAGES: usize = 48;
pub const DEMO_CLASSES: usize = 100;

/// Class names for the demo label space. The first eight are the default
/// exclusion list so the exclusion stage has something to do.
pub fn demo_label_space() -> LabelSpace {
    let mut names: Vec<String> = DEFAULT_EXCLUDED_CLASSES.iter().map(|s| s.to_string()).collect();
    names.extend((names.len()..DEMO_CLASSES).map(|i| format!("class{i:03}")));
    LabelSpace::with_names(names).expect("distinct names")
}

/// Mock scorer with a mix of planted behaviours: images that only zoom-in,
/// zoom-out, one anchor or one scale can solve, images nothing solves, and
/// unplanted images whose outcome is left to the hash.
pub fn demo_scorer(seed: u64) -> MockScorerConfig {
    let mut cfg = MockScorerConfig::new(seed, DEMO_CLASSES);
    for (i, id) in image_ids(DEMO_IMAGES).into_iter().enumerate() {
        let class = (mix64(seed ^ i as u64) % DEMO_CLASSES as u64) as u32;
        let predicate = match i % 8 {
            0 | 5 => Predicate::Never,
            1 => Predicate::Group { group: ZoomGroup::ZoomIn },
            2 => Predicate::Group { group: ZoomGroup::ZoomOut },
            3 => Predicate::Anchor { row: 0, col: 0 },
            4 => Predicate::Scale { scale: 224 },
            6 => Predicate::Always,
            _ => continue,
        };
        // a few unsolvable images land in an excluded class
        let class = if i % 16 == 5 { (i / 16) as u32 % 8 } else { class };
        cfg = cfg.plant(id, predicate, class);
    }
    cfg
}

/// Synthetic annotation votes for the flagged images. Cycles through keep
/// and drop patterns.
pub fn demo_annotations(flagged: &[String]) -> BTreeMap<String, AnnotationRecord> {
    use Vote::*;
    let patterns: [([Vote; 3], Vec<Vote>); 4] = [
        ([Accept, Accept, Accept], vec![]),
        ([Accept, Accept, NotSure], vec![Accept]),
        ([Accept, Reject, Accept], vec![Accept, Reject]),
        ([Reject, NotSure, Accept], vec![Accept, Accept]),
    ];
    flagged
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let (a, b) = patterns[i % patterns.len()].clone();
            (id.clone(), AnnotationRecord::new(id.clone(), a, b))
        })
        .collect()
}

/// A smooth RGB test image with a bright blob whose position depends on the seed.
pub fn demo_image(seed: u64, width: usize, height: usize) -> ImageBuffer {
    let h = mix64(seed);
    let cx = (h % width as u64) as f32;
    let cy = ((h >> 32) % height as u64) as f32;
    let r2 = (width.min(height) as f32 / 6.0).powi(2);
    ImageBuffer::from_fn(width, height, 3, |r, c, ch| {
        let d2 = (c as f32 - cx).powi(2) + (r as f32 - cy).powi(2);
        let blob = (-d2 / r2).exp();
        let ramp = (r + c) as f32 / (width + height) as f32;
        (0.6 * blob + 0.3 * ramp + 0.1 * ch as f32 / 2.0).clamp(0.0, 1.0)
    })
    .expect("valid dimensions")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSummary {
    pub seed: u64,
    pub n_images: usize,
    pub upper_bound: f64,
    pub center_top1: f64,
    pub cover_size: usize,
    pub hard_set_size: usize,
    /// File name -> SHA-256 of its bytes.
    pub files: BTreeMap<String, String>,
}

struct Out {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl Out {
    fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        fs::write(self.dir.join(name), bytes.as_ref())?;
        self.track(name)
    }

    fn track(&mut self, name: &str) -> Result<()> {
        let digest = Sha256::digest(fs::read(self.dir.join(name))?);
        self.files.insert(name.to_string(), hex::encode(digest));
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

pub fn run_demo(seed: u64, out_dir: &Path) -> Result<DemoSummary> {
    fs::create_dir_all(out_dir)?;
    let mut out = Out { dir: out_dir.to_path_buf(), files: BTreeMap::new() };

    let grid = TransformGrid::default();
    out.write("grid.json", grid.to_json())?;

    let ids = image_ids(DEMO_IMAGES);
    let scorer = demo_scorer(seed);
    out.write("scorer.json", serde_json::to_string_pretty(&scorer)?)?;
    let labels = scorer.label_table(&ids);
    labels.save(&out.path("labels.jsonl"))?;
    out.track("labels.jsonl")?;

    let logits = mock_grid_matrix(&scorer, &ids, &grid)?;
    logits.save(&out.path("logits.zpm"))?;
    out.track("logits.zpm")?;
    let cm = correctness_from_logits(&logits, &labels)?;
    cm.save(&out.path("correctness.zpm"))?;
    out.track("correctness.zpm")?;

    let scale_224 = DEFAULT_SCALES.iter().position(|&s| s == 224).expect("224 in default scales") as u32;
    let center_id = grid.id_of(TransformRef { scale_index: scale_224, row: 1, col: 1 })?;
    let upper_bound = full_upper_bound(&cm)?;
    let center_top1 = top1_accuracy(&cm, center_id)?;
    let report = |metric: &str, subset: String, value: f64| EvalReport {
        dataset: "demo".into(),
        n_images: cm.n_images(),
        metric: metric.into(),
        value,
        subset,
    };
    let reports = vec![
        report("top1", format!("id={center_id}"), center_top1),
        report("upper_bound", "all".into(), upper_bound),
    ];
    out.write("eval.csv", reports_to_csv(&reports)?)?;

    let all_ids: Vec<u32> = (0..grid.len() as u32).collect();
    out.write("anchors.csv", per_anchor_upper_bound(&cm, &grid, &all_ids)?.to_csv())?;
    out.write("groups.json", serde_json::to_string_pretty(&zoom_group_breakdown(&cm, &grid)?)?)?;

    let sweep_logits = mock_center_matrix(&scorer, &ids, &CENTER_SWEEP_SCALES)?;
    let sweep = center_zoom_sweep(&correctness_from_logits(&sweep_logits, &labels)?, &CENTER_SWEEP_SCALES)?;
    let mut sweep_csv = String::from("scale,top1\n");
    for (s, v) in sweep {
        sweep_csv.push_str(&format!("{s},{v}\n"));
    }
    out.write("sweep.csv", sweep_csv)?;

    let cover = greedy_min_cover(&CoverInstance::from_matrix(&cm), None).with_group_split(&grid)?;
    out.write("cover.json", serde_json::to_string_pretty(&cover)?)?;

    // first zoom group the cover touches
    let policy = [CropPolicy::ZoomIn, CropPolicy::ZoomOut, CropPolicy::ZoomLess]
        .into_iter()
        .find(|&p| crop_set_for(p, &grid, &cover.chosen).is_ok());
    let predictions = match policy {
        Some(p) => aggregate_matrix(&logits, &crop_set_for(p, &grid, &cover.chosen)?, AggregateMode::Mean)?,
        None => Vec::new(),
    };
    out.write("predictions.jsonl", predictions_to_jsonl(&predictions)?)?;

    let space = demo_label_space();
    let unsolved: Vec<String> = unclassifiable_filter(&cm);
    let flagged: Vec<String> = unsolved.iter().step_by(2).cloned().collect();
    let annotations = demo_annotations(&flagged);
    let mut ann_csv = String::from("image_id,annotator_group,annotator_id,vote\n");
    for rec in annotations.values() {
        for (k, v) in rec.group_a.iter().enumerate() {
            ann_csv.push_str(&format!("{},A,a{k},{}\n", rec.image_id, vote_str(*v)));
        }
        for (k, v) in rec.group_b.iter().enumerate() {
            ann_csv.push_str(&format!("{},B,b{k},{}\n", rec.image_id, vote_str(*v)));
        }
    }
    out.write("annotations.csv", ann_csv)?;

    let opts = BuildOptions {
        flagged: flagged.iter().cloned().collect::<BTreeSet<_>>(),
        annotations,
        pre_excluded: unsolved.last().into_iter().cloned().collect(),
        grid: Some(grid.clone()),
        ..Default::default()
    }
    .with_default_exclusions();
    let source = SourceInput { name: "demo".into(), correctness: cm.clone(), labels: labels.clone() };
    let manifest = build_manifest(&[source], &space, &opts)?;
    out.write("hardset.jsonl", manifest.to_jsonl()?)?;

    let toy = ToyLinearSoftmax::new(10)?;
    let params = toy.init_params(seed, 0.05);
    let memo = memo_adapt(&toy, &params, &demo_image(seed, 320, 240), &MemoConfig { seed, lr: 0.5, ..Default::default() })?;
    out.write("memo.json", serde_json::to_string_pretty(&memo.report())?)?;

    let summary = DemoSummary {
        seed,
        n_images: cm.n_images(),
        upper_bound,
        center_top1,
        cover_size: cover.chosen.len(),
        hard_set_size: manifest.entries.len(),
        files: out.files.clone(),
    };
    fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

fn vote_str(v: Vote) -> &'static str {
    match v {
        Vote::Accept => "accept",
        Vote::Reject => "reject",
        Vote::NotSure => "not_sure",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_is_deterministic_and_nontrivial() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let sa = run_demo(7, a.path()).unwrap();
        let sb = run_demo(7, b.path()).unwrap();
        assert_eq!(sa, sb);
        assert!(sa.upper_bound < 1.0 && sa.upper_bound > sa.center_top1);
        assert!(sa.hard_set_size > 0);
        assert!(sa.cover_size > 0);
    }
}
