//! Greedy minimum transform cover on a mock matrix, and a comparison with
//! the exhaustive optimum on a small random instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zoomlens::cover::{brute_force_min_cover, greedy_min_cover, harmonic, CoverInstance};
use zoomlens::mock::{image_ids, mock_grid_matrix};
use zoomlens::pipeline::{demo_scorer, DEMO_IMAGES};
use zoomlens::store::correctness_from_logits;
use zoomlens::{CorrectnessMatrix, TransformGrid};

fn main() -> zoomlens::Result<()> {
    let grid = TransformGrid::default();
    let scorer = demo_scorer(1);
    let ids = image_ids(DEMO_IMAGES);
    let cm = correctness_from_logits(&mock_grid_matrix(&scorer, &ids, &grid)?, &scorer.label_table(&ids))?;
    let cover = greedy_min_cover(&CoverInstance::from_matrix(&cm), None).with_group_split(&grid)?;
    println!(
        "greedy picked {} of {} transforms ({:.2}%) to cover {} images",
        cover.chosen.len(),
        cover.n_transforms,
        100.0 * cover.fraction_of_grid(),
        cover.n_coverable
    );
    println!("gains per pick: {:?}", cover.gains);
    println!("group split: {:?}", cover.group_split.unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rows: Vec<Vec<bool>> = (0..30).map(|_| (0..12).map(|_| rng.gen_bool(0.15)).collect()).collect();
    let ci = CoverInstance::from_matrix(&CorrectnessMatrix::from_rows(&rows)?);
    let greedy = greedy_min_cover(&ci, None).chosen.len();
    let opt = brute_force_min_cover(&ci)?;
    println!("small instance: greedy {greedy}, optimum {opt}, bound {:.2}", opt as f64 * harmonic(ci.max_edge_count()));
    Ok(())
}
