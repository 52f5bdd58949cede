mod common;

use std::collections::{BTreeMap, BTreeSet};

use zoomlens::hardset::{
    annotation_merge, build_manifest, load_annotations, AnnotationRecord, BuildOptions, HardSetManifest, MergeDecision,
    SourceInput, Vote, DEFAULT_EXCLUDED_CLASSES,
};
use zoomlens::mock::{image_ids, mock_grid_matrix, MockScorerConfig, Predicate};
use zoomlens::store::{correctness_from_logits, ColumnKind, LabelTable, MatrixAxes};
use zoomlens::{CorrectnessMatrix, LabelSet, LabelSpace, TransformGrid, ZoomGroup};

fn names_with_exclusions(extra: usize) -> LabelSpace {
    let mut names: Vec<String> = DEFAULT_EXCLUDED_CLASSES.iter().map(|s| s.to_string()).collect();
    names.extend((0..extra).map(|i| format!("n{i}")));
    LabelSpace::with_names(names).unwrap()
}

#[test]
fn stage_counts_at_benchmark_scale() {
    // 13,925 collected -> 295 ill-posed removed -> 2,280 of 3,133 flagged
    // dropped -> 370 in excluded classes removed -> 10,980
    let space = names_with_exclusions(992);
    let total = 13_925;
    let ids: Vec<String> = (0..total).map(|i| format!("h{i:05}")).collect();
    let sources = ["s0", "s1", "s2", "s3", "s4", "s5", "s6"];

    let mut per_source: BTreeMap<&str, (Vec<String>, LabelTable)> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        // the last 370 images carry an excluded label (alongside a normal one for some)
        let labels: Vec<u32> = if i >= total - 370 {
            if i % 2 == 0 { vec![(i % 8) as u32] } else { vec![(i % 8) as u32, 100] }
        } else {
            vec![8 + (i % 992) as u32]
        };
        let entry = per_source.entry(sources[i % sources.len()]).or_insert_with(|| (Vec::new(), LabelTable::new()));
        entry.0.push(id.clone());
        entry.1.insert(LabelSet::new(id.clone(), labels).unwrap());
    }
    let inputs: Vec<SourceInput> = per_source
        .into_iter()
        .map(|(name, (ids, labels))| {
            let n = ids.len();
            let axes = MatrixAxes::new(ids, vec![0], ColumnKind::Grid);
            SourceInput { name: name.into(), correctness: CorrectnessMatrix::new(axes, vec![false; n]).unwrap(), labels }
        })
        .collect();

    let pre_excluded: BTreeSet<String> = ids[..295].iter().cloned().collect();
    let flagged: Vec<String> = ids[295..295 + 3_133].to_vec();
    let annotations: BTreeMap<String, AnnotationRecord> = flagged
        .iter()
        .enumerate()
        .map(|(k, id)| {
            let rec = if k < 853 {
                AnnotationRecord::new(id.clone(), [Vote::Accept; 3], vec![])
            } else {
                AnnotationRecord::new(id.clone(), [Vote::Accept, Vote::Accept, Vote::Reject], vec![Vote::NotSure])
            };
            (id.clone(), rec)
        })
        .collect();
    let opts = BuildOptions {
        flagged: flagged.into_iter().collect(),
        annotations,
        pre_excluded,
        ..Default::default()
    }
    .with_default_exclusions();

    let m = build_manifest(&inputs, &space, &opts).unwrap();
    let sum = |f: fn(&zoomlens::hardset::SourceCounts) -> usize| m.header.sources.values().map(f).sum::<usize>();
    assert_eq!(sum(|c| c.unclassifiable), 13_925);
    assert_eq!(sum(|c| c.pre_excluded), 295);
    assert_eq!(sum(|c| c.merge_dropped), 2_280);
    assert_eq!(sum(|c| c.class_excluded), 370);
    assert_eq!(m.entries.len(), 10_980);
    assert_eq!(sum(|c| c.kept), 10_980);
    assert_eq!(m.header.total, 10_980);
    for c in m.header.sources.values() {
        assert_eq!(c.kept, c.unclassifiable - c.pre_excluded - c.merge_dropped - c.class_excluded);
    }
}

/// Twelve mock images with hand-chosen fates.
fn planted_fixture() -> (Vec<SourceInput>, BuildOptions, LabelSpace) {
    let grid = TransformGrid::default();
    let space = names_with_exclusions(40);
    let bathtub = space.index_of("bathtub").unwrap();
    let ids = image_ids(12);
    let mut cfg = MockScorerConfig::new(3, space.class_count());
    for (i, id) in ids.iter().enumerate() {
        let (p, class) = match i {
            // solvable, never reach the manifest
            0 => (Predicate::Always, 10),
            1 => (Predicate::Group { group: ZoomGroup::ZoomIn }, 11),
            2 => (Predicate::Anchor { row: 2, col: 0 }, 12),
            // unsolvable
            9 => (Predicate::Never, bathtub),
            _ => (Predicate::Never, 13 + i as u32),
        };
        cfg = cfg.plant(id.clone(), p, class);
    }
    let lm = mock_grid_matrix(&cfg, &ids, &grid).unwrap();
    let cm = correctness_from_logits(&lm, &cfg.label_table(&ids)).unwrap();
    let src = SourceInput { name: "mock".into(), correctness: cm, labels: cfg.label_table(&ids) };

    let rec = |id: &str, a: [Vote; 3], b: Vec<Vote>| (id.to_string(), AnnotationRecord::new(id, a, b));
    let opts = BuildOptions {
        pre_excluded: ["img004".to_string()].into(),
        flagged: ["img005", "img006", "img007"].iter().map(|s| s.to_string()).collect(),
        annotations: [
            rec("img005", [Vote::Accept; 3], vec![]),
            rec("img006", [Vote::Accept, Vote::Accept, Vote::NotSure], vec![]),
            rec("img007", [Vote::Accept, Vote::NotSure, Vote::Accept], vec![Vote::Accept]),
        ]
        .into_iter()
        .collect(),
        grid: Some(grid),
        ..Default::default()
    }
    .with_default_exclusions();
    (vec![src], opts, space)
}

#[test]
fn planted_pipeline_yields_the_expected_ids() {
    let (sources, opts, space) = planted_fixture();
    let m = build_manifest(&sources, &space, &opts).unwrap();
    let got: Vec<&str> = m.entries.iter().map(|e| e.image_id.as_str()).collect();
    assert_eq!(got, ["img003", "img005", "img007", "img008", "img010", "img011"]);
    let c = m.header.sources["mock"];
    assert_eq!((c.unclassifiable, c.pre_excluded, c.merge_dropped, c.class_excluded, c.kept), (9, 1, 1, 1, 6));
}

#[test]
fn rebuilding_is_byte_identical_and_round_trips() {
    let (sources, opts, space) = planted_fixture();
    let a = build_manifest(&sources, &space, &opts).unwrap().to_jsonl().unwrap();
    let b = build_manifest(&sources, &space, &opts).unwrap().to_jsonl().unwrap();
    assert_eq!(a, b);
    let parsed = HardSetManifest::from_jsonl(&a).unwrap();
    assert_eq!(parsed.to_jsonl().unwrap(), a);
    assert_eq!(a.lines().count(), 1 + parsed.entries.len());
}

#[test]
fn grid_mismatch_is_rejected() {
    let (sources, mut opts, space) = planted_fixture();
    opts.grid = Some(TransformGrid::new(vec![100, 224], 224).unwrap());
    assert!(build_manifest(&sources, &space, &opts).is_err());
}

#[test]
fn unknown_exclusion_name_is_rejected() {
    let (sources, mut opts, space) = planted_fixture();
    opts.excluded_classes.push("unicorn".into());
    assert!(build_manifest(&sources, &space, &opts).is_err());
}

#[test]
fn merge_rule_examples() {
    use Vote::*;
    let keep = |a, b| annotation_merge(&AnnotationRecord::new("x", a, b)) == MergeDecision::Keep;
    assert!(keep([Accept, Accept, Accept], vec![]));
    assert!(!keep([Accept, Accept, Reject], vec![]));
    assert!(keep([Accept, Accept, NotSure], vec![Accept, Accept]));
    assert!(!keep([Accept, Accept, NotSure], vec![Accept, Reject]));
    assert!(!keep([NotSure, NotSure, NotSure], vec![Accept]));
}

#[test]
fn annotations_file_loads() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ann.csv");
    std::fs::write(
        &p,
        "image_id,annotator_group,annotator_id,vote\n\
         q,A,1,accept\nq,A,2,accept\nq,A,3,not_sure\nq,B,9,accept\nq,B,10,accept\n",
    )
    .unwrap();
    let recs = load_annotations(&p).unwrap();
    assert_eq!(recs["q"].group_b.len(), 2);
    assert_eq!(annotation_merge(&recs["q"]), MergeDecision::Keep);
}
