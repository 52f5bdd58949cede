//! Top-1 accuracy of a center crop as the resize scale varies.

use zoomlens::eval::center_zoom_sweep;
use zoomlens::geometry::CENTER_SWEEP_SCALES;
use zoomlens::mock::{image_ids, mock_center_matrix};
use zoomlens::pipeline::{demo_scorer, DEMO_IMAGES};
use zoomlens::store::correctness_from_logits;

fn main() -> zoomlens::Result<()> {
    let scorer = demo_scorer(4);
    let ids = image_ids(DEMO_IMAGES);
    let lm = mock_center_matrix(&scorer, &ids, &CENTER_SWEEP_SCALES)?;
    let cm = correctness_from_logits(&lm, &scorer.label_table(&ids))?;
    for (scale, acc) in center_zoom_sweep(&cm, &CENTER_SWEEP_SCALES)? {
        println!("{scale:>4}  {acc:.3}  {}", "#".repeat((acc * 40.0).round() as usize));
    }
    Ok(())
}
