//! Marginal-entropy adaptation of the toy linear scorer on one image.

use zoomlens::memo::{memo_adapt, DifferentiableScorer, MemoConfig, ToyLinearSoftmax};
use zoomlens::pipeline::demo_image;

fn main() -> zoomlens::Result<()> {
    let toy = ToyLinearSoftmax::new(10)?;
    let params = toy.init_params(0, 0.05);
    let img = demo_image(11, 400, 300);
    for lr in [0.0, 1e-3, 0.5] {
        let cfg = MemoConfig { lr, steps: 3, ..Default::default() };
        let out = memo_adapt(&toy, &params, &img, &cfg)?;
        println!(
            "lr {lr:<6} entropy {:.5} -> {:.5}  class {} -> {}  steps {:?}",
            out.entropy_before, out.entropy_after, out.baseline_class, out.adapted_class, out.step_lrs
        );
    }
    println!("{} parameters, each run starts from the same initial values", toy.n_params());
    Ok(())
}
