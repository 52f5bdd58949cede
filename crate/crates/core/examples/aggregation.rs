//! Mean and max fusion of crop predictions, first on hand-written logits and
//! then per crop policy over a mock matrix.

use zoomlens::aggregate::{aggregate, aggregate_matrix, crop_set_for, AggregateMode, CropDistributions, CropPolicy};
use zoomlens::cover::{greedy_min_cover, CoverInstance};
use zoomlens::mock::{image_ids, mock_crop_matrix, mock_grid_matrix};
use zoomlens::pipeline::{demo_scorer, DEMO_IMAGES};
use zoomlens::store::correctness_from_logits;
use zoomlens::TransformGrid;

fn main() -> zoomlens::Result<()> {
    // one confident crop against two mildly disagreeing ones
    let logits: [&[f32]; 3] = [&[8.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]];
    let dists = CropDistributions::from_logits(logits)?;
    for mode in [AggregateMode::Mean, AggregateMode::Max] {
        let a = aggregate(&dists, mode);
        println!("{mode:?}: class {} confidence {:.3}", a.class, a.confidence());
    }

    let grid = TransformGrid::default();
    let scorer = demo_scorer(5);
    let ids = image_ids(DEMO_IMAGES);
    let labels = scorer.label_table(&ids);
    let lm = mock_grid_matrix(&scorer, &ids, &grid)?;
    let cover = greedy_min_cover(&CoverInstance::from_matrix(&correctness_from_logits(&lm, &labels)?), None);
    let crops = mock_crop_matrix(&scorer, &ids)?;
    for policy in [CropPolicy::ZoomIn, CropPolicy::ZoomOut, CropPolicy::ZoomLess, CropPolicy::FiveCrop, CropPolicy::TenCrop] {
        let specs = match crop_set_for(policy, &grid, &cover.chosen) {
            Ok(s) => s,
            Err(e) => {
                println!("{policy}: skipped ({e})");
                continue;
            }
        };
        let source = if matches!(policy, CropPolicy::FiveCrop | CropPolicy::TenCrop) { &crops } else { &lm };
        let preds = aggregate_matrix(source, &specs, AggregateMode::Mean)?;
        let hits = preds.iter().filter(|p| labels.get(&p.image_id).is_some_and(|l| l.contains(p.class as u32))).count();
        println!("{policy}: {} crops, accuracy {:.3}", specs.len(), hits as f64 / preds.len() as f64);
    }
    Ok(())
}
