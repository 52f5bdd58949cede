//! Zoom-transform analysis toolkit.
//!
//! Every analysis here starts from the same object: a grid of zoom
//! transforms (resize the smaller edge to a scale `S`, then take a fixed-size
//! crop centered on one of nine 3x3 grid-cell centers, zero-padding where the
//! window leaves the image). Classifier outputs over `(image, transform)`
//! pairs are stored as [`store::LogitMatrix`] / [`store::CorrectnessMatrix`]
//! and feed the analytics:
//!
//! - [`eval`]: top-1, upper-bound ("optimal zoom") accuracy, random baselines,
//!   per-anchor heatmaps, zoom-group breakdowns and center-zoom sweeps.
//! - [`cover`]: greedy minimum transform set cover with an exhaustive oracle.
//! - [`aggregate`]: mean/max fusion over crop sets, including 5/10-crop.
//! - [`memo`]: marginal-entropy test-time adaptation on a differentiable scorer.
//! - [`hardset`]: the unclassifiable-filter / annotation-merge / class-exclusion
//!   pipeline that emits a hard-benchmark manifest.
//! - [`mock`]: a seeded stand-in classifier so all of the above run end to end.
//!
//! Runnable walkthroughs live in `examples/`; the `zoomlens` binary exposes
//! the same operations as subcommands.

pub mod aggregate;
pub mod cli;
pub mod cover;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod hardset;
pub mod image;
pub mod memo;
pub mod mock;
pub mod pipeline;
pub mod store;

pub use error::{Error, Result};
pub use geometry::{TransformGrid, ZoomGroup, ZoomTransform};
pub use image::ImageBuffer;
pub use store::{CorrectnessMatrix, LabelSet, LabelSpace, LogitMatrix};

/// Index of the largest value, ties resolved toward the lowest index.
///
/// Panics on an empty slice.
pub fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::argmax;

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        assert_eq!(argmax(&[0.5f32, 0.5, 0.0]), 0);
        assert_eq!(argmax(&[0.1f32, 0.9, 0.9]), 1);
        assert_eq!(argmax(&[3.0f64]), 0);
    }
}
