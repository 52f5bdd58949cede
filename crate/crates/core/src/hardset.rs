//! Hard-benchmark construction.
//!
//! Pipeline, per source dataset:
//!
//! 1. keep images no zoom transform classifies correctly;
//! 2. drop ids on the optional pre-exclusion list (ill-posed images);
//! 3. for images flagged for verification, apply the annotator merge rule;
//! 4. drop images whose labels touch an excluded class.
//!
//! The result is a manifest: one JSON header line followed by one JSON line
//! per kept image, sorted by image id.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TransformGrid;
use crate::store::{ColumnKind, CorrectnessMatrix, LabelSpace, LabelTable};

pub const MANIFEST_VERSION: u32 = 1;

/// Classes whose images routinely belong to more than one label.
pub const DEFAULT_EXCLUDED_CLASSES: [&str; 8] =
    ["sunglass", "sunglasses", "tub", "bathtub", "cradle", "bassinet", "projectile", "missile"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vote {
    Accept,
    Reject,
    NotSure,
}

impl FromStr for Vote {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace([' ', '-'], "_").as_str() {
            "accept" => Ok(Vote::Accept),
            "reject" => Ok(Vote::Reject),
            "not_sure" => Ok(Vote::NotSure),
            _ => Err(Error::inconsistent(format!("malformed vote {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub group_a: [Vote; 3],
    pub group_b: Vec<Vote>,
}

impl AnnotationRecord {
    pub fn new(image_id: impl Into<String>, group_a: [Vote; 3], group_b: Vec<Vote>) -> Self {
        Self { image_id: image_id.into(), group_a, group_b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeDecision {
    Keep,
    Drop,
}

/// Keep when all three group-A votes accept, or when exactly two do and at
/// least one group-B reviewer voted and every group-B vote accepts.
/// "Not sure" never counts as acceptance.
pub fn annotation_merge(rec: &AnnotationRecord) -> MergeDecision {
    let a_accepts = rec.group_a.iter().filter(|&&v| v == Vote::Accept).count();
    let b_unanimous = !rec.group_b.is_empty() && rec.group_b.iter().all(|&v| v == Vote::Accept);
    if a_accepts == 3 || (a_accepts == 2 && b_unanimous) {
        MergeDecision::Keep
    } else {
        MergeDecision::Drop
    }
}

#[derive(Debug, Deserialize)]
struct AnnotationRow {
    image_id: String,
    annotator_group: String,
    annotator_id: String,
    vote: String,
}

/// Reads `image_id,annotator_group,annotator_id,vote` rows (with header).
/// Every annotated image needs exactly three group-A votes.
pub fn load_annotations(path: &Path) -> Result<BTreeMap<String, AnnotationRecord>> {
    parse_annotations(csv::Reader::from_path(path)?)
}

pub fn parse_annotations<R: std::io::Read>(mut reader: csv::Reader<R>) -> Result<BTreeMap<String, AnnotationRecord>> {
    let mut a_votes: BTreeMap<String, Vec<Vote>> = BTreeMap::new();
    let mut b_votes: BTreeMap<String, Vec<Vote>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for row in reader.deserialize() {
        let row: AnnotationRow = row?;
        let vote: Vote = row.vote.parse()?;
        let group = row.annotator_group.trim().to_ascii_uppercase();
        if !seen.insert((row.image_id.clone(), group.clone(), row.annotator_id.clone())) {
            return Err(Error::inconsistent(format!(
                "annotator {} of group {group} voted twice on `{}`",
                row.annotator_id, row.image_id
            )));
        }
        let target = match group.as_str() {
            "A" => &mut a_votes,
            "B" => &mut b_votes,
            other => return Err(Error::inconsistent(format!("unknown annotator group {other:?}"))),
        };
        target.entry(row.image_id).or_default().push(vote);
    }
    if let Some(id) = b_votes.keys().find(|id| !a_votes.contains_key(*id)) {
        return Err(Error::inconsistent(format!("`{id}` has group-B votes but no group-A votes")));
    }
    a_votes
        .into_iter()
        .map(|(id, a)| {
            let group_a: [Vote; 3] = a.try_into().map_err(|a: Vec<Vote>| {
                Error::inconsistent(format!("`{id}` has {} group-A votes, expected 3", a.len()))
            })?;
            let group_b = b_votes.remove(&id).unwrap_or_default();
            Ok((id.clone(), AnnotationRecord::new(id, group_a, group_b)))
        })
        .collect()
}

/// Images that no column classifies correctly, in matrix order.
pub fn unclassifiable_filter(cm: &CorrectnessMatrix) -> Vec<String> {
    (0..cm.n_images())
        .filter(|&i| !cm.row(i).iter().any(|&b| b))
        .map(|i| cm.image_ids()[i].clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HardSetEntry {
    pub image_id: String,
    pub source_dataset: String,
    pub labels: BTreeSet<u32>,
}

/// Removes entries whose labels include any of `excluded` (class names).
pub fn class_exclusion(entries: Vec<HardSetEntry>, excluded: &[String], space: &LabelSpace) -> Result<Vec<HardSetEntry>> {
    let ids = excluded_class_ids(excluded, space)?;
    Ok(entries.into_iter().filter(|e| e.labels.is_disjoint(&ids)).collect())
}

fn excluded_class_ids(excluded: &[String], space: &LabelSpace) -> Result<BTreeSet<u32>> {
    if excluded.is_empty() {
        return Ok(BTreeSet::new());
    }
    if space.names().is_none() {
        return Err(Error::inconsistent("class exclusion needs a label space with class names"));
    }
    excluded
        .iter()
        .map(|n| space.index_of(n).ok_or_else(|| Error::inconsistent(format!("unknown class name {n:?} in exclusion list"))))
        .collect()
}

/// One class name per line; blank lines and `#` comments are ignored.
pub fn load_exclusion_list(path: &Path) -> Result<Vec<String>> {
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

/// One id per line.
pub fn load_id_list(path: &Path) -> Result<BTreeSet<String>> {
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

#[derive(Debug, Clone)]
pub struct SourceInput {
    pub name: String,
    pub correctness: CorrectnessMatrix,
    pub labels: LabelTable,
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Images that must pass the annotator merge rule.
    pub flagged: BTreeSet<String>,
    pub annotations: BTreeMap<String, AnnotationRecord>,
    /// Ids removed before annotation.
    pub pre_excluded: BTreeSet<String>,
    pub excluded_classes: Vec<String>,
    /// When set, every matrix must cover exactly this grid.
    pub grid: Option<TransformGrid>,
}

impl BuildOptions {
    pub fn with_default_exclusions(mut self) -> Self {
        self.excluded_classes = DEFAULT_EXCLUDED_CLASSES.iter().map(|s| s.to_string()).collect();
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCounts {
    pub unclassifiable: usize,
    pub pre_excluded: usize,
    pub merge_dropped: usize,
    pub class_excluded: usize,
    pub kept: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub version: u32,
    pub kind: String,
    pub total: usize,
    pub sources: BTreeMap<String, SourceCounts>,
    pub excluded_classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardSetManifest {
    pub header: ManifestHeader,
    pub entries: Vec<HardSetEntry>,
}

impl HardSetManifest {
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = serde_json::to_string(&self.header)?;
        out.push('\n');
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: ManifestHeader =
            serde_json::from_str(lines.next().ok_or_else(|| Error::format("empty manifest"))?)?;
        if header.version != MANIFEST_VERSION {
            return Err(Error::format(format!("unsupported manifest version {}", header.version)));
        }
        let entries = lines.map(serde_json::from_str).collect::<Result<Vec<HardSetEntry>, _>>()?;
        if entries.len() != header.total {
            return Err(Error::inconsistent(format!("header says {} entries, found {}", header.total, entries.len())));
        }
        Ok(Self { header, entries })
    }
}

fn check_grid(src: &SourceInput, grid: &TransformGrid) -> Result<()> {
    let axes = src.correctness.axes();
    let expected: Vec<u32> = (0..grid.len() as u32).collect();
    if axes.column_kind != ColumnKind::Grid || axes.transform_ids != expected {
        return Err(Error::inconsistent(format!("source `{}` does not cover the full grid", src.name)));
    }
    match &axes.grid_sha256 {
        Some(sha) if *sha != grid.sha256() => {
            Err(Error::inconsistent(format!("source `{}` was scored with a different grid", src.name)))
        }
        _ => Ok(()),
    }
}

pub fn build_manifest(sources: &[SourceInput], space: &LabelSpace, opts: &BuildOptions) -> Result<HardSetManifest> {
    let excluded_ids = excluded_class_ids(&opts.excluded_classes, space)?;
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    for src in sources {
        if let Some(grid) = &opts.grid {
            check_grid(src, grid)?;
        }
        for id in src.correctness.image_ids() {
            if let Some(prev) = owner.insert(id, &src.name) {
                return Err(Error::inconsistent(format!("image id `{id}` appears in sources `{prev}` and `{}`", src.name)));
            }
        }
    }

    let mut entries = Vec::new();
    let mut counts = BTreeMap::new();
    for src in sources {
        let mut c = SourceCounts::default();
        for id in unclassifiable_filter(&src.correctness) {
            c.unclassifiable += 1;
            if opts.pre_excluded.contains(&id) {
                c.pre_excluded += 1;
                continue;
            }
            if opts.flagged.contains(&id) {
                let rec = opts
                    .annotations
                    .get(&id)
                    .ok_or_else(|| Error::inconsistent(format!("flagged image `{id}` has no annotations")))?;
                if annotation_merge(rec) == MergeDecision::Drop {
                    c.merge_dropped += 1;
                    continue;
                }
            }
            let labels = src.labels.get(&id).ok_or_else(|| Error::MissingLabels(id.clone()))?.labels.clone();
            space_check(&labels, space, &id)?;
            if !labels.is_disjoint(&excluded_ids) {
                c.class_excluded += 1;
                continue;
            }
            c.kept += 1;
            entries.push(HardSetEntry { image_id: id, source_dataset: src.name.clone(), labels });
        }
        counts.insert(src.name.clone(), c);
    }
    entries.sort();

    Ok(HardSetManifest {
        header: ManifestHeader {
            version: MANIFEST_VERSION,
            kind: "hard-set".into(),
            total: entries.len(),
            sources: counts,
            excluded_classes: opts.excluded_classes.clone(),
        },
        entries,
    })
}

fn space_check(labels: &BTreeSet<u32>, space: &LabelSpace, id: &str) -> Result<()> {
    match labels.iter().find(|&&l| l as usize >= space.class_count()) {
        Some(l) => Err(Error::inconsistent(format!("label {l} of `{id}` outside the label space"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::LabelSet;
    use Vote::*;

    #[test]
    fn merge_rule_examples() {
        assert_eq!(annotation_merge(&AnnotationRecord::new("x", [Accept; 3], vec![])), MergeDecision::Keep);
        assert_eq!(
            annotation_merge(&AnnotationRecord::new("x", [Accept, Accept, Reject], vec![])),
            MergeDecision::Drop
        );
        assert_eq!(
            annotation_merge(&AnnotationRecord::new("x", [Accept, Accept, NotSure], vec![Accept, Accept])),
            MergeDecision::Keep
        );
        assert_eq!(
            annotation_merge(&AnnotationRecord::new("x", [Accept, Accept, NotSure], vec![Accept, NotSure])),
            MergeDecision::Drop
        );
        assert_eq!(
            annotation_merge(&AnnotationRecord::new("x", [Accept, Reject, Reject], vec![Accept])),
            MergeDecision::Drop
        );
    }

    #[test]
    fn adding_an_accept_never_flips_keep_to_drop() {
        let all = [Accept, Reject, NotSure];
        for a in 0..27 {
            let group_a = [all[a % 3], all[a / 3 % 3], all[a / 9]];
            for b_len in 0..3 {
                for b in 0..3usize.pow(b_len) {
                    let group_b: Vec<Vote> = (0..b_len).map(|i| all[b / 3usize.pow(i) % 3]).collect();
                    let rec = AnnotationRecord::new("x", group_a, group_b.clone());
                    if annotation_merge(&rec) == MergeDecision::Drop {
                        continue;
                    }
                    // upgrade any non-accept vote to accept
                    for i in 0..3 {
                        let mut up = group_a;
                        up[i] = Accept;
                        assert_eq!(annotation_merge(&AnnotationRecord::new("x", up, group_b.clone())), MergeDecision::Keep);
                    }
                    for i in 0..group_b.len() {
                        let mut up = group_b.clone();
                        up[i] = Accept;
                        assert_eq!(annotation_merge(&AnnotationRecord::new("x", group_a, up)), MergeDecision::Keep);
                    }
                    // adding a B accept to a keep
                    let mut more = group_b.clone();
                    more.push(Accept);
                    assert_eq!(annotation_merge(&AnnotationRecord::new("x", group_a, more)), MergeDecision::Keep);
                }
            }
        }
    }

    #[test]
    fn vote_parsing() {
        assert_eq!("Accept".parse::<Vote>().unwrap(), Accept);
        assert_eq!("not sure".parse::<Vote>().unwrap(), NotSure);
        assert_eq!("not-sure".parse::<Vote>().unwrap(), NotSure);
        assert!("maybe".parse::<Vote>().is_err());
    }

    #[test]
    fn annotations_csv() {
        let text = "image_id,annotator_group,annotator_id,vote\n\
                    a,A,s1,accept\na,A,s2,accept\na,A,s3,reject\na,B,b7,accept\n\
                    b,A,s1,accept\nb,A,s2,not_sure\nb,A,s3,accept\n";
        let recs = parse_annotations(csv::Reader::from_reader(text.as_bytes())).unwrap();
        assert_eq!(recs["a"].group_b, vec![Accept]);
        assert_eq!(annotation_merge(&recs["a"]), MergeDecision::Keep);
        assert_eq!(annotation_merge(&recs["b"]), MergeDecision::Drop);

        let short = "image_id,annotator_group,annotator_id,vote\na,A,s1,accept\n";
        assert!(parse_annotations(csv::Reader::from_reader(short.as_bytes())).is_err());
        let bad_vote = "image_id,annotator_group,annotator_id,vote\na,A,s1,yes\n";
        assert!(parse_annotations(csv::Reader::from_reader(bad_vote.as_bytes())).is_err());
        let dup = "image_id,annotator_group,annotator_id,vote\na,A,s1,accept\na,A,s1,accept\na,A,s2,accept\n";
        assert!(parse_annotations(csv::Reader::from_reader(dup.as_bytes())).is_err());
    }

    fn space() -> LabelSpace {
        let mut names: Vec<String> = DEFAULT_EXCLUDED_CLASSES.iter().map(|s| s.to_string()).collect();
        names.push("goldfish".into());
        LabelSpace::with_names(names).unwrap()
    }

    fn entry(id: &str, label: u32) -> HardSetEntry {
        HardSetEntry { image_id: id.into(), source_dataset: "s".into(), labels: BTreeSet::from([label]) }
    }

    #[test]
    fn exclusion_examples() {
        let sp = space();
        let bathtub = sp.index_of("bathtub").unwrap();
        let goldfish = sp.index_of("goldfish").unwrap();
        let entries = vec![entry("a", bathtub), entry("b", goldfish)];
        let defaults: Vec<String> = DEFAULT_EXCLUDED_CLASSES.iter().map(|s| s.to_string()).collect();
        let kept = class_exclusion(entries.clone(), &defaults, &sp).unwrap();
        assert_eq!(kept, vec![entry("b", goldfish)]);
        assert_eq!(class_exclusion(entries.clone(), &[], &sp).unwrap(), entries);
        assert!(class_exclusion(entries, &["unicorn".into()], &sp).is_err());
    }

    #[test]
    fn unclassifiable_rows() {
        let cm = CorrectnessMatrix::from_rows(&[vec![false, true], vec![false, false]]).unwrap();
        assert_eq!(unclassifiable_filter(&cm), vec!["img1".to_string()]);
    }

    #[test]
    fn empty_sources_give_empty_manifest() {
        let m = build_manifest(&[], &space(), &BuildOptions::default()).unwrap();
        assert_eq!(m.entries.len(), 0);
        assert_eq!(m.header.total, 0);
        let text = m.to_jsonl().unwrap();
        assert_eq!(HardSetManifest::from_jsonl(&text).unwrap(), m);
    }

    #[test]
    fn id_collision_across_sources() {
        let cm = CorrectnessMatrix::from_rows(&[vec![false]]).unwrap();
        let labels: LabelTable = [LabelSet::new("img0", [0]).unwrap()].into_iter().collect();
        let a = SourceInput { name: "a".into(), correctness: cm.clone(), labels: labels.clone() };
        let b = SourceInput { name: "b".into(), correctness: cm, labels };
        let err = build_manifest(&[a, b], &space(), &BuildOptions::default()).unwrap_err();
        assert!(err.to_string().contains("img0"));
    }

    #[test]
    fn flagged_without_annotation_is_an_error() {
        let cm = CorrectnessMatrix::from_rows(&[vec![false]]).unwrap();
        let labels: LabelTable = [LabelSet::new("img0", [8]).unwrap()].into_iter().collect();
        let src = SourceInput { name: "a".into(), correctness: cm, labels };
        let opts = BuildOptions { flagged: BTreeSet::from(["img0".to_string()]), ..Default::default() };
        assert!(build_manifest(&[src], &space(), &opts).is_err());
    }
}
