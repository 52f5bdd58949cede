//! Classifier outputs over `(image, transform)` and ground-truth label sets.
//!
//! # ZPM1 layout
//!
//! ```text
//! "ZPM1" | u32 LE version | u32 LE manifest length | manifest JSON | blob
//! ```
//!
//! The manifest records ids, dimensions, `kind` (`logits` / `correctness`),
//! `dtype`, the column family and the SHA-256 of the grid JSON that produced
//! the columns. Logit blobs are little-endian f32 in `[image][transform][class]`
//! order. Correctness blobs are bit-packed row-major over `[image][transform]`
//! (bit `k = image * m + transform` lives in byte `k / 8` at bit `k % 8`,
//! LSB first); rows are not padded.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::argmax;
use crate::error::{Error, Result};

pub const ZPM_MAGIC: &[u8; 4] = b"ZPM1";
pub const ZPM_VERSION: u32 = 1;

/// The class universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSpace {
    class_count: usize,
    names: Option<Vec<String>>,
}

impl LabelSpace {
    pub fn new(class_count: usize) -> Result<Self> {
        if class_count < 2 {
            return Err(Error::InvalidArgument(format!("label space needs >= 2 classes, got {class_count}")));
        }
        Ok(Self { class_count, names: None })
    }

    pub fn with_names(names: Vec<String>) -> Result<Self> {
        let mut space = Self::new(names.len())?;
        let unique: BTreeSet<&String> = names.iter().collect();
        if unique.len() != names.len() {
            return Err(Error::InvalidArgument("class names must be unique".into()));
        }
        space.names = Some(names);
        Ok(space)
    }

    /// One class name per non-empty line.
    pub fn load_names(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::with_names(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.as_ref()?.iter().position(|n| n == name).map(|i| i as u32)
    }
}

/// Ground-truth classes of one image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    pub image_id: String,
    pub labels: BTreeSet<u32>,
}

impl LabelSet {
    pub fn new(image_id: impl Into<String>, labels: impl IntoIterator<Item = u32>) -> Result<Self> {
        let image_id = image_id.into();
        let labels: BTreeSet<u32> = labels.into_iter().collect();
        if labels.is_empty() {
            return Err(Error::inconsistent(format!("empty label set for `{image_id}`")));
        }
        Ok(Self { image_id, labels })
    }

    pub fn contains(&self, class: u32) -> bool {
        self.labels.contains(&class)
    }
}

/// Label sets keyed by image id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelTable {
    sets: BTreeMap<String, LabelSet>,
}

impl LabelTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a set, merging by union if the image already has one.
    pub fn insert(&mut self, set: LabelSet) {
        match self.sets.get_mut(&set.image_id) {
            Some(existing) => existing.labels.extend(set.labels),
            None => {
                self.sets.insert(set.image_id.clone(), set);
            }
        }
    }

    /// Union with another source, image by image.
    pub fn union(mut self, other: LabelTable) -> Self {
        for set in other.sets.into_values() {
            self.insert(set);
        }
        self
    }

    pub fn get(&self, image_id: &str) -> Option<&LabelSet> {
        self.sets.get(image_id)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LabelSet> {
        self.sets.values()
    }

    pub fn validate(&self, space: &LabelSpace) -> Result<()> {
        for set in self.sets.values() {
            if let Some(&bad) = set.labels.iter().find(|&&c| c as usize >= space.class_count()) {
                return Err(Error::inconsistent(format!(
                    "label {bad} of `{}` outside {} classes",
                    set.image_id,
                    space.class_count()
                )));
            }
        }
        Ok(())
    }

    /// JSONL, one `{"image_id": .., "labels": [..]}` per line.
    pub fn load(path: &Path) -> Result<Self> {
        let mut table = Self::new();
        for (n, line) in BufReader::new(fs::File::open(path)?).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let set: LabelSet = serde_json::from_str(&line)
                .map_err(|e| Error::format(format!("{}:{}: {e}", path.display(), n + 1)))?;
            table.insert(LabelSet::new(set.image_id, set.labels)?);
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        for set in self.sets.values() {
            serde_json::to_writer(&mut out, set)?;
            out.push(b'\n');
        }
        fs::write(path, out)?;
        Ok(())
    }
}

impl FromIterator<LabelSet> for LabelTable {
    fn from_iter<I: IntoIterator<Item = LabelSet>>(iter: I) -> Self {
        let mut t = Self::new();
        for s in iter {
            t.insert(s);
        }
        t
    }
}

/// What the matrix columns are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    /// Column ids are zoom-grid transform ids.
    Grid,
    /// Column ids are center-zoom scales.
    CenterZoom,
    /// Column ids index the classic ten-crop list (0..10).
    Crop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Logits,
    Correctness,
}

/// Ids and column metadata shared by both matrix kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixAxes {
    pub image_ids: Vec<String>,
    pub transform_ids: Vec<u32>,
    pub column_kind: ColumnKind,
    pub grid_sha256: Option<String>,
}

impl MatrixAxes {
    pub fn new(image_ids: Vec<String>, transform_ids: Vec<u32>, column_kind: ColumnKind) -> Self {
        Self { image_ids, transform_ids, column_kind, grid_sha256: None }
    }

    pub fn with_grid_sha256(mut self, sha: impl Into<String>) -> Self {
        self.grid_sha256 = Some(sha.into());
        self
    }

    fn validate(&self) -> Result<()> {
        let ids: BTreeSet<&String> = self.image_ids.iter().collect();
        if ids.len() != self.image_ids.len() {
            return Err(Error::inconsistent("duplicate image id in matrix"));
        }
        let cols: BTreeSet<u32> = self.transform_ids.iter().copied().collect();
        if cols.len() != self.transform_ids.len() {
            return Err(Error::inconsistent("duplicate transform id in matrix"));
        }
        Ok(())
    }

    pub fn n_images(&self) -> usize {
        self.image_ids.len()
    }

    pub fn n_transforms(&self) -> usize {
        self.transform_ids.len()
    }

    pub fn column_index(&self, transform_id: u32) -> Option<usize> {
        self.transform_ids.iter().position(|&t| t == transform_id)
    }

    pub fn row_index(&self, image_id: &str) -> Option<usize> {
        self.image_ids.iter().position(|i| i == image_id)
    }
}

/// Per-crop class scores, `n x m x C`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitMatrix {
    axes: MatrixAxes,
    n_classes: usize,
    values: Vec<f32>,
}

impl LogitMatrix {
    pub fn new(axes: MatrixAxes, n_classes: usize, values: Vec<f32>) -> Result<Self> {
        axes.validate()?;
        if n_classes == 0 {
            return Err(Error::inconsistent("logit matrix with zero classes"));
        }
        let expected = axes.n_images() * axes.n_transforms() * n_classes;
        if values.len() != expected {
            return Err(Error::inconsistent(format!(
                "{} logits for {}x{}x{n_classes}",
                values.len(),
                axes.n_images(),
                axes.n_transforms()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::inconsistent("non-finite logit"));
        }
        Ok(Self { axes, n_classes, values })
    }

    pub fn axes(&self) -> &MatrixAxes {
        &self.axes
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn logits(&self, image: usize, column: usize) -> &[f32] {
        let start = (image * self.axes.n_transforms() + column) * self.n_classes;
        &self.values[start..start + self.n_classes]
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let blob: Vec<u8> = self.values.iter().flat_map(|v| v.to_le_bytes()).collect();
        write_zpm(path, &self.axes, MatrixKind::Logits, Some(self.n_classes), &blob)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (manifest, blob) = read_zpm(path)?;
        if manifest.kind != MatrixKind::Logits {
            return Err(Error::format(format!("{} holds a correctness matrix, expected logits", path.display())));
        }
        let n_classes = manifest
            .n_classes
            .ok_or_else(|| Error::format("logits manifest without n_classes"))?;
        let values = blob.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect();
        Self::new(manifest.axes, n_classes, values)
    }
}

/// Top-1 correctness bits, `n x m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectnessMatrix {
    axes: MatrixAxes,
    bits: Vec<bool>,
}

impl CorrectnessMatrix {
    pub fn new(axes: MatrixAxes, bits: Vec<bool>) -> Result<Self> {
        axes.validate()?;
        if bits.len() != axes.n_images() * axes.n_transforms() {
            return Err(Error::inconsistent(format!(
                "{} bits for {}x{} matrix",
                bits.len(),
                axes.n_images(),
                axes.n_transforms()
            )));
        }
        Ok(Self { axes, bits })
    }

    /// Grid-column matrix with generated ids `img0..` and columns `0..m`.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::inconsistent("ragged correctness rows"));
        }
        let axes = MatrixAxes::new(
            (0..rows.len()).map(|i| format!("img{i}")).collect(),
            (0..m as u32).collect(),
            ColumnKind::Grid,
        );
        Self::new(axes, rows.concat())
    }

    pub fn axes(&self) -> &MatrixAxes {
        &self.axes
    }

    pub fn n_images(&self) -> usize {
        self.axes.n_images()
    }

    pub fn n_transforms(&self) -> usize {
        self.axes.n_transforms()
    }

    pub fn image_ids(&self) -> &[String] {
        &self.axes.image_ids
    }

    pub fn transform_ids(&self) -> &[u32] {
        &self.axes.transform_ids
    }

    #[inline]
    pub fn get(&self, image: usize, column: usize) -> bool {
        self.bits[image * self.n_transforms() + column]
    }

    pub fn row(&self, image: usize) -> &[bool] {
        let m = self.n_transforms();
        &self.bits[image * m..(image + 1) * m]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Column positions of `transform_ids`, in the given order.
    pub fn columns_for(&self, transform_ids: &[u32]) -> Result<Vec<usize>> {
        transform_ids
            .iter()
            .map(|&t| self.axes.column_index(t).ok_or(Error::UnknownTransform(t)))
            .collect()
    }

    pub fn to_packed(&self) -> Vec<u8> {
        pack_bits(&self.bits)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_zpm(path, &self.axes, MatrixKind::Correctness, None, &self.to_packed())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (manifest, blob) = read_zpm(path)?;
        if manifest.kind != MatrixKind::Correctness {
            return Err(Error::format(format!("{} holds logits, expected a correctness matrix", path.display())));
        }
        let n = manifest.axes.n_images() * manifest.axes.n_transforms();
        Self::new(manifest.axes, unpack_bits(&blob, n))
    }
}

pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (k, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        out[k / 8] |= 1 << (k % 8);
    }
    out
}

pub fn unpack_bits(bytes: &[u8], len: usize) -> Vec<bool> {
    (0..len).map(|k| bytes[k / 8] >> (k % 8) & 1 == 1).collect()
}

/// `bit[i][j] = argmax(logits[i][j]) ∈ labels(i)`, ties to the lowest class.
pub fn correctness_from_logits(lm: &LogitMatrix, labels: &LabelTable) -> Result<CorrectnessMatrix> {
    let sets = lm
        .axes
        .image_ids
        .iter()
        .map(|id| labels.get(id).ok_or_else(|| Error::MissingLabels(id.clone())))
        .collect::<Result<Vec<_>>>()?;
    let m = lm.axes.n_transforms();
    let bits: Vec<bool> = sets
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, set)| (0..m).map(move |j| set.contains(argmax(lm.logits(i, j)) as u32)))
        .collect();
    CorrectnessMatrix::new(lm.axes.clone(), bits)
}

#[derive(Debug, Serialize, Deserialize)]
struct ZpmManifest {
    kind: MatrixKind,
    dtype: String,
    n_images: usize,
    n_transforms: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_classes: Option<usize>,
    #[serde(flatten)]
    axes: MatrixAxes,
    blob_bytes: u64,
}

fn write_zpm(path: &Path, axes: &MatrixAxes, kind: MatrixKind, n_classes: Option<usize>, blob: &[u8]) -> Result<()> {
    let manifest = ZpmManifest {
        kind,
        dtype: match kind {
            MatrixKind::Logits => "f32le".into(),
            MatrixKind::Correctness => "bit-lsb".into(),
        },
        n_images: axes.n_images(),
        n_transforms: axes.n_transforms(),
        n_classes,
        axes: axes.clone(),
        blob_bytes: blob.len() as u64,
    };
    let json = serde_json::to_vec(&manifest)?;
    let mut out = Vec::with_capacity(12 + json.len() + blob.len());
    out.write_all(ZPM_MAGIC)?;
    out.write_all(&ZPM_VERSION.to_le_bytes())?;
    out.write_all(&(json.len() as u32).to_le_bytes())?;
    out.write_all(&json)?;
    out.write_all(blob)?;
    fs::write(path, out)?;
    Ok(())
}

fn read_zpm(path: &Path) -> Result<(ZpmManifest, Vec<u8>)> {
    parse_zpm(&fs::read(path)?).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn parse_zpm(bytes: &[u8]) -> Result<(ZpmManifest, Vec<u8>)> {
    if bytes.len() < 12 {
        return Err(Error::format("truncated ZPM1 header"));
    }
    if &bytes[..4] != ZPM_MAGIC {
        return Err(Error::format("bad magic, not a ZPM1 file"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != ZPM_VERSION {
        return Err(Error::format(format!("unsupported ZPM1 version {version}")));
    }
    let json_len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let json = bytes
        .get(12..12 + json_len)
        .ok_or_else(|| Error::format("truncated ZPM1 manifest"))?;
    let manifest: ZpmManifest =
        serde_json::from_slice(json).map_err(|e| Error::format(format!("bad ZPM1 manifest: {e}")))?;
    let blob = &bytes[12 + json_len..];
    if blob.len() as u64 != manifest.blob_bytes {
        return Err(Error::format(format!(
            "blob is {} bytes, manifest declares {}",
            blob.len(),
            manifest.blob_bytes
        )));
    }
    if manifest.n_images != manifest.axes.n_images() || manifest.n_transforms != manifest.axes.n_transforms() {
        return Err(Error::inconsistent("manifest dimensions disagree with its id lists"));
    }
    let cells = manifest.n_images * manifest.n_transforms;
    let expected = match manifest.kind {
        MatrixKind::Logits => cells * manifest.n_classes.unwrap_or(0) * 4,
        MatrixKind::Correctness => cells.div_ceil(8),
    };
    if blob.len() != expected {
        return Err(Error::inconsistent(format!(
            "blob is {} bytes, dimensions require {expected}",
            blob.len()
        )));
    }
    Ok((manifest, blob.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn axes(n: usize, m: usize) -> MatrixAxes {
        MatrixAxes::new((0..n).map(|i| format!("im{i}")).collect(), (0..m as u32).collect(), ColumnKind::Grid)
    }

    fn single(logits: Vec<f32>, labels: &[u32]) -> bool {
        let c = logits.len();
        let lm = LogitMatrix::new(axes(1, 1), c, logits).unwrap();
        let table: LabelTable = [LabelSet::new("im0", labels.iter().copied()).unwrap()].into_iter().collect();
        correctness_from_logits(&lm, &table).unwrap().get(0, 0)
    }

    #[test]
    fn correctness_examples() {
        assert!(single(vec![0.1, 0.9, 0.0], &[1]));
        assert!(!single(vec![0.5, 0.5, 0.0], &[1]));
        assert!(single(vec![0.2, 0.3, 0.9], &[0, 2]));
    }

    #[test]
    fn missing_labels_names_the_image() {
        let lm = LogitMatrix::new(axes(2, 1), 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let table: LabelTable = [LabelSet::new("im0", [1]).unwrap()].into_iter().collect();
        match correctness_from_logits(&lm, &table) {
            Err(Error::MissingLabels(id)) => assert_eq!(id, "im1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn label_union_merges_sources() {
        let a: LabelTable = [LabelSet::new("x", [1]).unwrap()].into_iter().collect();
        let b: LabelTable = [LabelSet::new("x", [4]).unwrap(), LabelSet::new("y", [0]).unwrap()]
            .into_iter()
            .collect();
        let u = a.union(b);
        assert_eq!(u.get("x").unwrap().labels, BTreeSet::from([1, 4]));
        assert_eq!(u.len(), 2);
        assert!(LabelSet::new("z", []).is_err());
        assert!(u.validate(&LabelSpace::new(3).unwrap()).is_err());
        assert!(u.validate(&LabelSpace::new(5).unwrap()).is_ok());
    }

    #[test]
    fn label_space_invariants() {
        assert!(LabelSpace::new(1).is_err());
        assert!(LabelSpace::with_names(vec!["a".into(), "a".into()]).is_err());
        let s = LabelSpace::with_names(vec!["goldfish".into(), "bathtub".into()]).unwrap();
        assert_eq!(s.index_of("bathtub"), Some(1));
        assert_eq!(s.index_of("tub"), None);
    }

    #[test]
    fn logits_roundtrip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let values: Vec<f32> = (0..5 * 12 * 10).map(|k| ((k * 7919) % 1000) as f32 / 37.0 - 13.0).collect();
        let lm = LogitMatrix::new(axes(5, 12).with_grid_sha256("ab"), 10, values).unwrap();
        let path = dir.path().join("l.zpm");
        lm.save(&path).unwrap();
        assert_eq!(LogitMatrix::load(&path).unwrap(), lm);
        assert!(CorrectnessMatrix::load(&path).is_err());
    }

    #[test]
    fn correctness_roundtrip_5x324() {
        let dir = tempfile::tempdir().unwrap();
        let bits: Vec<bool> = (0..5 * 324).map(|k| (k * 31 + k / 7) % 3 == 0).collect();
        let cm = CorrectnessMatrix::new(axes(5, 324), bits).unwrap();
        let path = dir.path().join("c.zpm");
        cm.save(&path).unwrap();
        assert_eq!(CorrectnessMatrix::load(&path).unwrap(), cm);
    }

    #[test]
    fn truncated_and_corrupt_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cm = CorrectnessMatrix::new(axes(3, 9), vec![true; 27]).unwrap();
        let path = dir.path().join("c.zpm");
        cm.save(&path).unwrap();
        let bytes = fs::read(&path).unwrap();
        for cut in [0, 5, 11, 20, bytes.len() - 1] {
            fs::write(&path, &bytes[..cut]).unwrap();
            assert!(matches!(CorrectnessMatrix::load(&path), Err(Error::Format(_))), "cut at {cut}");
        }
        let mut bad = bytes.clone();
        bad[4] = 2;
        fs::write(&path, &bad).unwrap();
        assert!(matches!(CorrectnessMatrix::load(&path), Err(Error::Format(m)) if m.contains("version")));
        let mut bad = bytes.clone();
        bad[0] = b'Q';
        fs::write(&path, &bad).unwrap();
        assert!(matches!(CorrectnessMatrix::load(&path), Err(Error::Format(m)) if m.contains("magic")));
    }

    #[test]
    fn dimension_mismatch_vs_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.zpm");
        // manifest claims 2x9 but the blob only fits 1x9
        let mut a = axes(2, 9);
        write_zpm(&path, &a, MatrixKind::Correctness, None, &[0, 0]).unwrap();
        assert!(matches!(CorrectnessMatrix::load(&path), Err(Error::Inconsistent(_))));
        a.image_ids.pop();
        write_zpm(&path, &a, MatrixKind::Correctness, None, &[0, 0]).unwrap();
        assert!(CorrectnessMatrix::load(&path).is_ok());
    }

    #[test]
    fn rejects_duplicate_ids() {
        let mut a = axes(2, 2);
        a.image_ids[1] = "im0".into();
        assert!(CorrectnessMatrix::new(a, vec![false; 4]).is_err());
    }

    #[test]
    fn label_table_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.jsonl");
        let t: LabelTable = [LabelSet::new("b", [3, 1]).unwrap(), LabelSet::new("a", [0]).unwrap()]
            .into_iter()
            .collect();
        t.save(&path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap().lines().next().unwrap(), r#"{"image_id":"a","labels":[0]}"#);
        assert_eq!(LabelTable::load(&path).unwrap(), t);
    }

    proptest! {
        #[test]
        fn bit_packing_roundtrips(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let packed = pack_bits(&bits);
            prop_assert_eq!(packed.len(), bits.len().div_ceil(8));
            prop_assert_eq!(unpack_bits(&packed, bits.len()), bits);
        }

        #[test]
        fn correctness_is_equivariant_in_image_order(
            seed in any::<u64>(), n in 1usize..8, m in 1usize..6, rot in 0usize..8
        ) {
            let c = 4;
            let vals: Vec<f32> = (0..n * m * c)
                .map(|k| (crate::mock::mix64(seed ^ k as u64) % 7) as f32)
                .collect();
            let ids: Vec<String> = (0..n).map(|i| format!("im{i}")).collect();
            let labels: LabelTable = ids.iter().enumerate()
                .map(|(i, id)| LabelSet::new(id.clone(), [(i % c) as u32]).unwrap())
                .collect();
            let lm = LogitMatrix::new(MatrixAxes::new(ids.clone(), (0..m as u32).collect(), ColumnKind::Grid), c, vals.clone()).unwrap();
            let cm = correctness_from_logits(&lm, &labels).unwrap();

            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
            let pids: Vec<String> = perm.iter().map(|&i| ids[i].clone()).collect();
            let pvals: Vec<f32> = perm.iter().flat_map(|&i| vals[i * m * c..(i + 1) * m * c].to_vec()).collect();
            let plm = LogitMatrix::new(MatrixAxes::new(pids, (0..m as u32).collect(), ColumnKind::Grid), c, pvals).unwrap();
            let pcm = correctness_from_logits(&plm, &labels).unwrap();
            for (pi, &i) in perm.iter().enumerate() {
                prop_assert_eq!(pcm.row(pi), cm.row(i));
            }
        }
    }
}
