//! Minimum transform set cover.
//!
//! Transforms and images form a bipartite graph with an edge wherever the
//! transform classifies the image correctly. A cover is a set of transforms
//! whose edges reach every image that any transform reaches, so restricting
//! evaluation to a cover keeps the upper-bound accuracy unchanged. The greedy
//! picker repeatedly takes the transform with the most not-yet-covered
//! images; the exhaustive search is the exact oracle for small instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{TransformGrid, ZoomGroup};
use crate::store::CorrectnessMatrix;

/// Largest instance [`brute_force_min_cover`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Fixed-size bitset over image positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageSet {
    words: Vec<u64>,
    len: usize,
}

impl ImageSet {
    pub fn empty(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &ImageSet) {
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a |= b);
    }

    pub fn difference_with(&mut self, other: &ImageSet) {
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a &= !b);
    }

    pub fn intersection_count(&self, other: &ImageSet) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_superset(&self, other: &ImageSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| b & !a == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }
}

/// Bipartite transform-to-image coverage graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverInstance {
    transform_ids: Vec<u32>,
    image_ids: Vec<String>,
    edges: Vec<ImageSet>,
}

impl CoverInstance {
    pub fn new(transform_ids: Vec<u32>, image_ids: Vec<String>, edges: Vec<ImageSet>) -> Result<Self> {
        if edges.len() != transform_ids.len() || edges.iter().any(|e| e.len != image_ids.len()) {
            return Err(Error::inconsistent("cover edges do not match transform/image counts"));
        }
        Ok(Self { transform_ids, image_ids, edges })
    }

    /// Edge `(t, i)` wherever the matrix bit is set.
    pub fn from_matrix(cm: &CorrectnessMatrix) -> Self {
        let n = cm.n_images();
        let edges = (0..cm.n_transforms())
            .map(|j| {
                let mut set = ImageSet::empty(n);
                for i in (0..n).filter(|&i| cm.get(i, j)) {
                    set.insert(i);
                }
                set
            })
            .collect();
        Self { transform_ids: cm.transform_ids().to_vec(), image_ids: cm.image_ids().to_vec(), edges }
    }

    /// Instance from explicit edge lists over image positions `0..n_images`.
    pub fn from_edge_lists(n_images: usize, lists: &[Vec<usize>]) -> Self {
        let edges = lists
            .iter()
            .map(|l| {
                let mut s = ImageSet::empty(n_images);
                l.iter().for_each(|&i| s.insert(i));
                s
            })
            .collect();
        Self {
            transform_ids: (0..lists.len() as u32).collect(),
            image_ids: (0..n_images).map(|i| format!("img{i}")).collect(),
            edges,
        }
    }

    pub fn transform_ids(&self) -> &[u32] {
        &self.transform_ids
    }

    pub fn image_ids(&self) -> &[String] {
        &self.image_ids
    }

    pub fn edges(&self) -> &[ImageSet] {
        &self.edges
    }

    pub fn n_transforms(&self) -> usize {
        self.transform_ids.len()
    }

    /// Images reached by at least one transform.
    pub fn coverable(&self) -> ImageSet {
        let mut all = ImageSet::empty(self.image_ids.len());
        self.edges.iter().for_each(|e| all.union_with(e));
        all
    }

    pub fn max_edge_count(&self) -> usize {
        self.edges.iter().map(ImageSet::count).max().unwrap_or(0)
    }

    fn position_of(&self, id: u32) -> Option<usize> {
        self.transform_ids.iter().position(|&t| t == id)
    }

    /// Images covered by the given transforms.
    pub fn covered_by(&self, chosen: &[u32]) -> Result<ImageSet> {
        let mut covered = ImageSet::empty(self.image_ids.len());
        for &id in chosen {
            let pos = self.position_of(id).ok_or(Error::UnknownTransform(id))?;
            covered.union_with(&self.edges[pos]);
        }
        Ok(covered)
    }
}

/// Counts of chosen transforms per zoom group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSplit {
    pub zoom_in: usize,
    pub zoom_out: usize,
    pub zoom_less: usize,
}

impl GroupSplit {
    pub fn total(&self) -> usize {
        self.zoom_in + self.zoom_out + self.zoom_less
    }
}

/// Selected transforms in pick order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub chosen: Vec<u32>,
    /// Newly covered images at each pick.
    pub gains: Vec<usize>,
    /// Coverable images still uncovered when selection stopped.
    pub uncovered: Vec<String>,
    pub n_transforms: usize,
    pub n_coverable: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_split: Option<GroupSplit>,
}

impl CoverResult {
    pub fn is_complete(&self) -> bool {
        self.uncovered.is_empty()
    }

    pub fn fraction_of_grid(&self) -> f64 {
        self.chosen.len() as f64 / self.n_transforms as f64
    }

    pub fn with_group_split(mut self, grid: &TransformGrid) -> Result<Self> {
        self.group_split = Some(group_split(&self.chosen, grid)?);
        Ok(self)
    }
}

pub fn group_split(chosen: &[u32], grid: &TransformGrid) -> Result<GroupSplit> {
    let mut split = GroupSplit::default();
    for &id in chosen {
        match grid.get(id)?.group() {
            ZoomGroup::ZoomIn => split.zoom_in += 1,
            ZoomGroup::ZoomOut => split.zoom_out += 1,
            ZoomGroup::ZoomLess => split.zoom_less += 1,
        }
    }
    Ok(split)
}

/// Greedy set cover over the coverable images.
///
/// Each step takes the unselected transform covering the most uncovered
/// images, ties going to the lowest transform id. Stops when everything
/// coverable is covered, when a step would gain nothing, or after
/// `stop_after` picks.
pub fn greedy_min_cover(ci: &CoverInstance, stop_after: Option<usize>) -> CoverResult {
    let target = ci.coverable();
    let mut uncovered = target.clone();
    let mut taken = vec![false; ci.n_transforms()];
    let mut chosen = Vec::new();
    let mut gains = Vec::new();
    let limit = stop_after.unwrap_or(usize::MAX);

    while !uncovered.is_empty() && chosen.len() < limit {
        let mut best: Option<(usize, usize)> = None;
        for (pos, edge) in ci.edges.iter().enumerate() {
            if taken[pos] {
                continue;
            }
            let gain = edge.intersection_count(&uncovered);
            let better = match best {
                None => true,
                Some((bpos, bgain)) => {
                    gain > bgain || (gain == bgain && ci.transform_ids[pos] < ci.transform_ids[bpos])
                }
            };
            if better {
                best = Some((pos, gain));
            }
        }
        match best {
            Some((pos, gain)) if gain > 0 => {
                taken[pos] = true;
                uncovered.difference_with(&ci.edges[pos]);
                chosen.push(ci.transform_ids[pos]);
                gains.push(gain);
            }
            _ => break,
        }
    }

    CoverResult {
        chosen,
        gains,
        uncovered: uncovered.iter().map(|i| ci.image_ids[i].clone()).collect(),
        n_transforms: ci.n_transforms(),
        n_coverable: target.count(),
        group_split: None,
    }
}

/// Exact minimum cover size by enumerating subsets in increasing size.
pub fn brute_force_min_cover(ci: &CoverInstance) -> Result<usize> {
    let m = ci.n_transforms();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { got: m, max: BRUTE_FORCE_LIMIT });
    }
    let target = ci.coverable();
    if target.is_empty() {
        return Ok(0);
    }
    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); m + 1];
    for mask in 1u32..(1 << m) {
        by_size[mask.count_ones() as usize].push(mask);
    }
    for (size, masks) in by_size.iter().enumerate().skip(1) {
        for &mask in masks {
            let mut covered = ImageSet::empty(ci.image_ids.len());
            for pos in (0..m).filter(|&p| mask >> p & 1 == 1) {
                covered.union_with(&ci.edges[pos]);
            }
            if covered.is_superset(&target) {
                return Ok(size);
            }
        }
    }
    unreachable!("the full transform set always covers the coverable set")
}

/// Mean fraction of the grid each cover needed.
pub fn cover_fraction_report(results: &[CoverResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::empty("cover result list"));
    }
    Ok(results.iter().map(CoverResult::fraction_of_grid).sum::<f64>() / results.len() as f64)
}

/// `H(k) = 1 + 1/2 + ... + 1/k`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}
