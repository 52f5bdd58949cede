//! Hard-set construction: unclassifiable filter, annotation merge and class
//! exclusion over a mock source.

use zoomlens::hardset::{build_manifest, unclassifiable_filter, BuildOptions, SourceInput};
use zoomlens::mock::{image_ids, mock_grid_matrix};
use zoomlens::pipeline::{demo_annotations, demo_label_space, demo_scorer, DEMO_IMAGES};
use zoomlens::store::correctness_from_logits;
use zoomlens::TransformGrid;

fn main() -> zoomlens::Result<()> {
    let grid = TransformGrid::default();
    let scorer = demo_scorer(0);
    let ids = image_ids(DEMO_IMAGES);
    let labels = scorer.label_table(&ids);
    let cm = correctness_from_logits(&mock_grid_matrix(&scorer, &ids, &grid)?, &labels)?;

    let unsolved = unclassifiable_filter(&cm);
    println!("{} of {} images are unsolved by every transform", unsolved.len(), ids.len());

    let flagged: Vec<String> = unsolved.iter().step_by(2).cloned().collect();
    let opts = BuildOptions {
        annotations: demo_annotations(&flagged),
        flagged: flagged.into_iter().collect(),
        grid: Some(grid),
        ..Default::default()
    }
    .with_default_exclusions();
    let source = SourceInput { name: "mock".into(), correctness: cm, labels };
    let manifest = build_manifest(&[source], &demo_label_space(), &opts)?;
    println!("{}", serde_json::to_string_pretty(&manifest.header)?);
    for e in &manifest.entries {
        println!("  {} {:?}", e.image_id, e.labels);
    }
    Ok(())
}
