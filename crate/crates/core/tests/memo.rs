mod common;

use rand::seq::SliceRandom;
use rand::Rng;

use common::*;
use zoomlens::geometry::{rrc_batch, RrcParams};
use zoomlens::memo::{marginal_entropy_grad, memo_adapt, standard_view, DifferentiableScorer, MemoConfig, ToyLinearSoftmax};
use zoomlens::pipeline::demo_image;
use zoomlens::Error;

#[test]
fn crop_order_does_not_change_loss_or_gradient() {
    let mut r = rng(21);
    let toy = ToyLinearSoftmax::new(5).unwrap();
    for _ in 0..10 {
        let params: Vec<f64> = (0..toy.n_params()).map(|_| r.gen_range(-0.3..0.3)).collect();
        let mut inputs: Vec<Vec<f64>> = (0..16).map(|_| (0..256).map(|_| r.gen_range(0.0..1.0)).collect()).collect();
        let (l1, g1) = marginal_entropy_grad(&toy, &params, &inputs);
        inputs.shuffle(&mut r);
        let (l2, g2) = marginal_entropy_grad(&toy, &params, &inputs);
        assert!((l1 - l2).abs() <= 1e-9);
        assert!(g1.iter().zip(&g2).all(|(a, b)| (a - b).abs() <= 1e-9));
    }
}

#[test]
fn adaptation_is_episodic() {
    let toy = ToyLinearSoftmax::new(8).unwrap();
    let params = toy.init_params(1, 0.05);
    let cfg = MemoConfig { lr: 0.5, steps: 3, seed: 4, ..Default::default() };
    let a = demo_image(1, 200, 150);
    let b = demo_image(2, 180, 240);
    let alone = memo_adapt(&toy, &params, &b, &cfg).unwrap();
    let first = memo_adapt(&toy, &params, &a, &cfg).unwrap();
    let after = memo_adapt(&toy, &params, &b, &cfg).unwrap();
    assert_ne!(first.params, params);
    assert_eq!(alone, after);
}

#[test]
fn same_seed_same_outcome() {
    let toy = ToyLinearSoftmax::new(6).unwrap();
    let params = toy.init_params(2, 0.05);
    let img = demo_image(3, 160, 160);
    let cfg = MemoConfig { lr: 0.1, steps: 2, seed: 9, ..Default::default() };
    assert_eq!(memo_adapt(&toy, &params, &img, &cfg).unwrap(), memo_adapt(&toy, &params, &img, &cfg).unwrap());
}

#[test]
fn entropy_never_increases_even_with_a_huge_step() {
    let toy = ToyLinearSoftmax::new(10).unwrap();
    for seed in 0..5 {
        let params = toy.init_params(seed, 0.05);
        let img = demo_image(seed, 150, 100);
        let out = memo_adapt(&toy, &params, &img, &MemoConfig { lr: 1e4, steps: 4, seed, ..Default::default() }).unwrap();
        assert!(out.entropy_after <= out.entropy_before);
        assert_eq!(out.step_lrs.len(), 4);
    }
}

#[test]
fn k16_crops_are_distinct_and_sized() {
    let img = demo_image(5, 300, 200);
    let p = RrcParams { seed: 11, ..Default::default() };
    let crops = rrc_batch(&img, &p, 16).unwrap();
    assert_eq!(crops.len(), 16);
    for (i, a) in crops.iter().enumerate() {
        assert_eq!((a.width(), a.height()), (224, 224));
        for b in &crops[i + 1..] {
            assert_ne!(a, b);
        }
    }
    assert_eq!(rrc_batch(&img, &p, 16).unwrap(), crops);
}

#[test]
fn standard_view_is_a_224_center_crop() {
    let v = standard_view(&demo_image(0, 640, 480)).unwrap();
    assert_eq!((v.width(), v.height()), (224, 224));
}

#[test]
fn non_finite_parameters_abort() {
    let toy = ToyLinearSoftmax::new(3).unwrap();
    let mut params = toy.init_params(0, 0.05);
    params[0] = f64::NAN;
    let err = memo_adapt(&toy, &params, &demo_image(0, 64, 64), &MemoConfig::default()).unwrap_err();
    assert!(matches!(err, Error::NonFinite(_)));
}

#[test]
fn gradient_matches_finite_differences_at_large_logits() {
    // saturated softmax regime: the gradient is tiny but still accurate
    let mut r = rng(22);
    let toy = ToyLinearSoftmax::new(4).unwrap();
    let params: Vec<f64> = (0..toy.n_params()).map(|_| r.gen_range(-3.0..3.0)).collect();
    let inputs: Vec<Vec<f64>> = (0..4).map(|_| (0..256).map(|_| r.gen_range(0.0..1.0)).collect()).collect();
    let (_, grad) = marginal_entropy_grad(&toy, &params, &inputs);
    let h = 1e-6;
    for i in (0..toy.n_params()).step_by(37) {
        let mut p = params.clone();
        p[i] += h;
        let up = oracle_linear_marginal_entropy(&p, &inputs, 4);
        p[i] -= 2.0 * h;
        let down = oracle_linear_marginal_entropy(&p, &inputs, 4);
        let fd = (up - down) / (2.0 * h);
        assert!((grad[i] - fd).abs() <= 1e-6 * grad[i].abs().max(1.0), "coordinate {i}: {} vs {fd}", grad[i]);
    }
}
