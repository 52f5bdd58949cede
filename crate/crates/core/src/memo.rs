//! Test-time adaptation by marginal-entropy minimization.
//!
//! For one test image, `K` random-resized crops are scored, their softmax
//! outputs averaged into a marginal distribution `p̄`, and the scorer
//! parameters take gradient steps on `H(p̄) = -Σ p̄_c ln p̄_c`. The adapted
//! parameters then classify the original (center-cropped) image and are
//! discarded, so every test point starts again from the same parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::argmax;
use crate::error::{Error, Result};
use crate::geometry::{center_zoom, rrc_batch, RrcParams, DEFAULT_CROP_SIZE, DEFAULT_FIVE_CROP_BASE};
use crate::image::{resize_exact, ImageBuffer};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        iter.into_iter().for_each(|v| s.add(v));
        s
    }
}

/// A parameterized classifier with an analytic parameter gradient.
///
/// Implementations must be deterministic in `(params, input)`.
pub trait DifferentiableScorer {
    fn n_params(&self) -> usize;

    fn n_classes(&self) -> usize;

    /// Maps an image crop to the scorer's input vector.
    fn features(&self, img: &ImageBuffer) -> Result<Vec<f64>>;

    fn forward(&self, params: &[f64], input: &[f64]) -> Vec<f64>;

    /// Adds `(∂logits/∂params)ᵀ · upstream` into `grad`.
    fn backward(&self, params: &[f64], input: &[f64], upstream: &[f64], grad: &mut [f64]);
}

/// Linear softmax classifier over a 16x16 grayscale thumbnail.
///
/// Parameters are laid out as the `C x 256` weight matrix (row-major)
/// followed by `C` biases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyLinearSoftmax {
    n_classes: usize,
}

impl ToyLinearSoftmax {
    pub const SIDE: usize = 16;
    pub const INPUT_DIM: usize = Self::SIDE * Self::SIDE;

    pub fn new(n_classes: usize) -> Result<Self> {
        if n_classes < 2 {
            return Err(Error::InvalidArgument("toy scorer needs >= 2 classes".into()));
        }
        Ok(Self { n_classes })
    }

    /// Uniform(-scale, scale) parameters from a seeded stream.
    pub fn init_params(&self, seed: u64, scale: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.n_params()).map(|_| rng.gen_range(-scale..=scale)).collect()
    }
}

impl DifferentiableScorer for ToyLinearSoftmax {
    fn n_params(&self) -> usize {
        self.n_classes * (Self::INPUT_DIM + 1)
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn features(&self, img: &ImageBuffer) -> Result<Vec<f64>> {
        let thumb = resize_exact(&img.to_gray(), Self::SIDE, Self::SIDE)?;
        Ok(thumb.data().iter().map(|&v| v as f64).collect())
    }

    fn forward(&self, params: &[f64], input: &[f64]) -> Vec<f64> {
        let d = Self::INPUT_DIM;
        let (weights, bias) = params.split_at(self.n_classes * d);
        (0..self.n_classes)
            .map(|c| {
                let row = &weights[c * d..(c + 1) * d];
                row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + bias[c]
            })
            .collect()
    }

    fn backward(&self, _params: &[f64], input: &[f64], upstream: &[f64], grad: &mut [f64]) {
        let d = Self::INPUT_DIM;
        let (gw, gb) = grad.split_at_mut(self.n_classes * d);
        for (c, &u) in upstream.iter().enumerate() {
            if u == 0.0 {
                continue;
            }
            for (g, x) in gw[c * d..(c + 1) * d].iter_mut().zip(input) {
                *g += u * x;
            }
            gb[c] += u;
        }
    }
}

fn softmax64(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total = e.iter().copied().collect::<CompensatedSum>().value();
    e.into_iter().map(|v| v / total).collect()
}

fn marginal(probs: &[Vec<f64>]) -> Vec<f64> {
    let c = probs[0].len();
    (0..c)
        .map(|j| probs.iter().map(|p| p[j]).collect::<CompensatedSum>().value() / probs.len() as f64)
        .collect()
}

/// `-Σ p ln p` with `0 ln 0 = 0`.
pub fn entropy(p: &[f64]) -> f64 {
    let h = p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .collect::<CompensatedSum>()
        .value();
    h.max(0.0)
}

/// Entropy of the mean softmax distribution over the inputs.
pub fn marginal_entropy<S: DifferentiableScorer + ?Sized>(scorer: &S, params: &[f64], inputs: &[Vec<f64>]) -> f64 {
    assert!(!inputs.is_empty(), "marginal entropy needs at least one input");
    let probs: Vec<Vec<f64>> = inputs.iter().map(|x| softmax64(&scorer.forward(params, x))).collect();
    entropy(&marginal(&probs))
}

/// Marginal entropy and its gradient with respect to the parameters.
pub fn marginal_entropy_grad<S: DifferentiableScorer + ?Sized>(
    scorer: &S,
    params: &[f64],
    inputs: &[Vec<f64>],
) -> (f64, Vec<f64>) {
    assert!(!inputs.is_empty(), "marginal entropy needs at least one input");
    let k = inputs.len() as f64;
    let probs: Vec<Vec<f64>> = inputs.iter().map(|x| softmax64(&scorer.forward(params, x))).collect();
    let mean = marginal(&probs);
    let loss = entropy(&mean);

    // dH/dp̄_c = -(ln p̄_c + 1); each crop contributes 1/K of p̄.
    let g: Vec<f64> = mean
        .iter()
        .map(|&m| if m > 0.0 { -(m.ln() + 1.0) / k } else { 0.0 })
        .collect();
    let mut grad = vec![0.0; scorer.n_params()];
    for (x, p) in inputs.iter().zip(&probs) {
        // softmax backward: dz = p ⊙ (g - <g, p>)
        let dot = p.iter().zip(&g).map(|(a, b)| a * b).collect::<CompensatedSum>().value();
        let upstream: Vec<f64> = p.iter().zip(&g).map(|(pi, gi)| pi * (gi - dot)).collect();
        scorer.backward(params, x, &upstream, &mut grad);
    }
    (loss, grad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoConfig {
    /// Number of augmented crops.
    pub k: usize,
    pub steps: usize,
    pub lr: f64,
    /// Seeds the crop sampler; overrides `augmentation.seed`.
    pub seed: u64,
    pub augmentation: RrcParams,
    /// How many times a step's learning rate may be halved when it fails to
    /// lower the entropy.
    pub max_backtracks: usize,
}

impl Default for MemoConfig {
    fn default() -> Self {
        Self { k: 16, steps: 1, lr: 1e-3, seed: 0, augmentation: RrcParams::default(), max_backtracks: 5 }
    }
}

impl MemoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("K must be >= 1".into()));
        }
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return Err(Error::InvalidArgument(format!("learning rate {} must be finite and >= 0", self.lr)));
        }
        self.augmentation.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoOutcome {
    pub params: Vec<f64>,
    pub baseline_class: usize,
    pub adapted_class: usize,
    pub entropy_before: f64,
    pub entropy_after: f64,
    /// Learning rate accepted at each step; `None` when the step was rejected.
    pub step_lrs: Vec<Option<f64>>,
}

impl MemoOutcome {
    pub fn report(&self) -> MemoReport {
        MemoReport {
            baseline_class: self.baseline_class,
            adapted_class: self.adapted_class,
            entropy_before: self.entropy_before,
            entropy_after: self.entropy_after,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoReport {
    pub baseline_class: usize,
    pub adapted_class: usize,
    pub entropy_before: f64,
    pub entropy_after: f64,
}

/// Standard preprocessing of the un-augmented image: resize the smaller edge
/// to 256, center crop 224.
pub fn standard_view(img: &ImageBuffer) -> Result<ImageBuffer> {
    center_zoom(img, DEFAULT_FIVE_CROP_BASE, DEFAULT_CROP_SIZE)
}

/// Episodic adaptation on one image. `params0` is only read.
pub fn memo_adapt<S: DifferentiableScorer + ?Sized>(
    scorer: &S,
    params0: &[f64],
    img: &ImageBuffer,
    cfg: &MemoConfig,
) -> Result<MemoOutcome> {
    cfg.validate()?;
    if params0.len() != scorer.n_params() {
        return Err(Error::inconsistent(format!(
            "{} parameters given, scorer has {}",
            params0.len(),
            scorer.n_params()
        )));
    }
    let aug = RrcParams { seed: cfg.seed, ..cfg.augmentation.clone() };
    let inputs = rrc_batch(img, &aug, cfg.k)?
        .iter()
        .map(|crop| scorer.features(crop))
        .collect::<Result<Vec<_>>>()?;
    let original = scorer.features(&standard_view(img)?)?;

    let baseline_class = argmax(&scorer.forward(params0, &original));
    let entropy_before = marginal_entropy(scorer, params0, &inputs);
    let mut params = params0.to_vec();
    let mut step_lrs = Vec::with_capacity(cfg.steps);

    for step in 0..cfg.steps {
        let (loss, grad) = marginal_entropy_grad(scorer, &params, &inputs);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("step {step}: loss {loss}, gradient not finite")));
        }
        if cfg.lr == 0.0 || grad.iter().all(|&g| g == 0.0) {
            step_lrs.push(None);
            continue;
        }
        let mut lr = cfg.lr;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let candidate: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - lr * g).collect();
            let new_loss = marginal_entropy(scorer, &candidate, &inputs);
            if !new_loss.is_finite() {
                return Err(Error::NonFinite(format!("step {step}: loss {new_loss} at lr {lr}")));
            }
            if new_loss < loss {
                params = candidate;
                accepted = Some(lr);
                break;
            }
            lr /= 2.0;
        }
        step_lrs.push(accepted);
    }

    let entropy_after = marginal_entropy(scorer, &params, &inputs);
    let adapted_class = argmax(&scorer.forward(&params, &original));
    Ok(MemoOutcome { params, baseline_class, adapted_class, entropy_before, entropy_after, step_lrs })
}
