//! Per-anchor upper bounds and the zoom-group breakdown.

use zoomlens::eval::{per_anchor_upper_bound, zoom_group_breakdown};
use zoomlens::mock::{image_ids, mock_grid_matrix};
use zoomlens::pipeline::{demo_scorer, DEMO_IMAGES};
use zoomlens::store::correctness_from_logits;
use zoomlens::TransformGrid;

fn main() -> zoomlens::Result<()> {
    let grid = TransformGrid::default();
    let scorer = demo_scorer(2);
    let ids = image_ids(DEMO_IMAGES);
    let cm = correctness_from_logits(&mock_grid_matrix(&scorer, &ids, &grid)?, &scorer.label_table(&ids))?;

    let all: Vec<u32> = (0..grid.len() as u32).collect();
    let heat = per_anchor_upper_bound(&cm, &grid, &all)?;
    println!("{}", heat.to_csv());

    let b = zoom_group_breakdown(&cm, &grid)?;
    for (g, solves) in &b.solves {
        println!("{g}: solves {:.3}, only {:.3}", solves, b.only[g]);
    }
    Ok(())
}
