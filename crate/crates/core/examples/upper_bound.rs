//! Top-1 versus upper-bound accuracy on a mock correctness matrix, plus the
//! random-guess baseline for the same number of crops.

use zoomlens::eval::{full_upper_bound, random_baseline, top1_accuracy, upper_bound_accuracy};
use zoomlens::mock::{image_ids, mock_grid_matrix};
use zoomlens::pipeline::{demo_scorer, DEMO_CLASSES, DEMO_IMAGES};
use zoomlens::store::correctness_from_logits;
use zoomlens::TransformGrid;

fn main() -> zoomlens::Result<()> {
    let grid = TransformGrid::default();
    let scorer = demo_scorer(7);
    let ids = image_ids(DEMO_IMAGES);
    let cm = correctness_from_logits(&mock_grid_matrix(&scorer, &ids, &grid)?, &scorer.label_table(&ids))?;

    let s224 = grid.scales().iter().position(|&s| s == 224).expect("224 is a grid scale") as u32;
    let center = s224 * 9 + 4;
    println!("top-1 at t{center}: {:.3}", top1_accuracy(&cm, center)?);
    println!("upper bound, all {}: {:.3}", grid.len(), full_upper_bound(&cm)?);
    for k in [1usize, 9, 36] {
        let subset: Vec<u32> = (0..k as u32).map(|i| i * 9 + 4).collect();
        println!("upper bound, {k} centered scales: {:.3}", upper_bound_accuracy(&cm, &subset)?);
    }
    println!("random baseline, {} crops / {DEMO_CLASSES} classes: {:.3}", grid.len(), random_baseline(grid.len(), DEMO_CLASSES)?);
    println!("random baseline, 324 crops / 1000 classes: {:.4}", random_baseline(324, 1000)?);
    Ok(())
}
