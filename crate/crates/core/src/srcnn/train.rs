//! The training loop: seeded initialization, per-epoch shuffling,
//! mini-batch gradient averaging, and momentum updates.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::imagekit::PatchPair;

use super::backprop::{
    backward_params_accumulate, sgd_momentum_step, BackwardScratch, GradientSet, Velocity,
};
use super::model::{forward_into, mse_loss_into, ForwardCache, ModelMetadata, SrcnnModel};
use super::tensor::Tensor3;
use super::SrcnnError;

/// Hyperparameters of one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// The reference configuration: batch 16, 50 epochs, learning rate
    /// 1e-5, momentum 0.9.
    pub fn reference(seed: u64) -> Self {
        Self {
            batch_size: 16,
            epochs: 50,
            learning_rate: 1e-5,
            momentum: 0.9,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SrcnnError> {
        if self.batch_size == 0 {
            return Err(SrcnnError::BadConfig("batch_size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(SrcnnError::BadConfig("epochs must be at least 1".into()));
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(SrcnnError::BadConfig(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(SrcnnError::BadConfig(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        Ok(())
    }
}

/// Standard deviation of the Gaussian weight initialization.
pub const INIT_WEIGHT_STD: f64 = 1e-3;

/// Trains a fresh network on the given patch pairs.
///
/// Weights start from a seeded Gaussian (mean 0, std 1e-3) with zero
/// biases. Every epoch reshuffles the sample order from the same seeded
/// stream, walks batches of `batch_size` (the final batch may be short),
/// averages the parameter gradients over each batch, and applies one
/// momentum update per batch. Returns the model plus the per-epoch mean
/// training loss. Bit-for-bit deterministic given (pairs order, config).
pub fn train_srcnn(pairs: &[PatchPair], config: &TrainConfig) -> Result<(SrcnnModel, Vec<f64>), SrcnnError> {
    config.validate()?;
    if pairs.is_empty() {
        return Err(SrcnnError::EmptyTrainingSet);
    }
    let channels = pairs[0].input().channels();
    if pairs.iter().any(|p| p.input().channels() != channels) {
        return Err(SrcnnError::ShapeMismatch(
            "training pairs mix channel counts".into(),
        ));
    }

    // One stream drives initialization and every epoch's shuffle.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = SrcnnModel::random_from_rng(channels, INIT_WEIGHT_STD, &mut rng)?;

    let samples: Vec<(Tensor3, Tensor3)> = pairs
        .iter()
        .map(|p| (Tensor3::from_image(p.input()), Tensor3::from_image(p.target())))
        .collect();

    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut velocity = Velocity::zeros_like(&model);
    let mut batch_grads = GradientSet::zeros_like(&model);
    let mut cache = ForwardCache::empty();
    let mut scratch = BackwardScratch::new();
    let mut loss_grad = Tensor3::zeros(0, 0, 0);
    let mut history = Vec::with_capacity(config.epochs);

    for _epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            batch_grads.clear_params();
            for &idx in batch {
                let (input, target) = &samples[idx];
                forward_into(&model, input, &mut cache)?;
                epoch_loss += mse_loss_into(cache.output(), target, &mut loss_grad)?;
                backward_params_accumulate(&model, &cache, &loss_grad, &mut batch_grads, &mut scratch)?;
            }
            batch_grads.scale_params(1.0 / batch.len() as f64);
            sgd_momentum_step(&mut model, &mut velocity, &batch_grads, config.learning_rate, config.momentum)?;
        }
        history.push(epoch_loss / samples.len() as f64);
    }

    model.set_metadata(ModelMetadata {
        seed: config.seed,
        epochs: config.epochs as u32,
        final_loss: *history.last().unwrap() as f32,
    });
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagekit::{extract_patch_pairs, RasterImage, PATCH_STRIDE};

    /// A deterministic textured image that bicubic degradation visibly
    /// blurs, so training has structure to learn.
    fn wavy(h: usize, w: usize, phase: f64) -> RasterImage {
        let mut data = Vec::with_capacity(h * w);
        for y in 0..h {
            for x in 0..w {
                let v = 0.5
                    + 0.22 * ((x as f64) * 1.9 + phase).sin()
                    + 0.18 * ((y as f64) * 2.3 - phase).cos();
                data.push(v.clamp(0.0, 1.0));
            }
        }
        RasterImage::from_data(h, w, 1, data).unwrap()
    }

    fn small_corpus() -> Vec<PatchPair> {
        let mut pairs = Vec::new();
        for k in 0..4 {
            let img = wavy(40, 40, k as f64 * 0.7);
            pairs.extend(extract_patch_pairs(&img, 2, PATCH_STRIDE, &format!("img{k}")).unwrap());
        }
        pairs // 4 images x 4 pairs
    }

    #[test]
    fn empty_training_set_is_rejected() {
        let cfg = TrainConfig::reference(1);
        assert!(matches!(train_srcnn(&[], &cfg), Err(SrcnnError::EmptyTrainingSet)));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let pairs = small_corpus();
        for cfg in [
            TrainConfig { batch_size: 0, ..TrainConfig::reference(1) },
            TrainConfig { epochs: 0, ..TrainConfig::reference(1) },
            TrainConfig { learning_rate: 0.0, ..TrainConfig::reference(1) },
            TrainConfig { momentum: 1.0, ..TrainConfig::reference(1) },
            TrainConfig { momentum: -0.1, ..TrainConfig::reference(1) },
        ] {
            assert!(train_srcnn(&pairs, &cfg).is_err(), "config {cfg:?} should fail");
        }
    }

    #[test]
    fn loss_descends_on_a_learnable_corpus() {
        let pairs = small_corpus();
        // A learning rate large enough to move the (tiny-init) weights in
        // 20 epochs on 16 samples.
        let cfg = TrainConfig {
            batch_size: 16,
            epochs: 20,
            learning_rate: 0.05,
            momentum: 0.9,
            seed: 4242,
        };
        let (model, history) = train_srcnn(&pairs, &cfg).unwrap();
        assert_eq!(history.len(), 20);
        assert!(history.iter().all(|l| l.is_finite()));
        assert!(
            history.last().unwrap() < &history[0],
            "loss failed to descend: {history:?}"
        );
        assert_eq!(model.metadata().epochs, 20);
        assert_eq!(model.metadata().seed, 4242);
        assert!((model.metadata().final_loss as f64 - history[19]).abs() < 1e-6);
    }

    #[test]
    fn training_is_bit_deterministic() {
        let pairs = small_corpus();
        let cfg = TrainConfig {
            batch_size: 4,
            epochs: 3,
            learning_rate: 0.01,
            momentum: 0.9,
            seed: 99,
        };
        let (m1, h1) = train_srcnn(&pairs, &cfg).unwrap();
        let (m2, h2) = train_srcnn(&pairs, &cfg).unwrap();
        assert_eq!(h1, h2);
        for k in 0..3 {
            assert_eq!(m1.layers()[k].weights(), m2.layers()[k].weights(), "layer {k}");
            assert_eq!(m1.layers()[k].biases(), m2.layers()[k].biases());
        }
    }

    #[test]
    fn different_seeds_give_different_models() {
        let pairs = small_corpus();
        let cfg = TrainConfig { epochs: 1, ..TrainConfig::reference(1) };
        let cfg2 = TrainConfig { epochs: 1, ..TrainConfig::reference(2) };
        let (m1, _) = train_srcnn(&pairs, &cfg).unwrap();
        let (m2, _) = train_srcnn(&pairs, &cfg2).unwrap();
        assert_ne!(m1.layers()[0].weights(), m2.layers()[0].weights());
    }

    #[test]
    fn short_final_batch_is_trained_not_dropped() {
        // 16 pairs with batch 10 -> batches of 10 and 6; the run must
        // complete and descend identically to a hand-checkable setup.
        let pairs = small_corpus();
        assert_eq!(pairs.len(), 16);
        let cfg = TrainConfig {
            batch_size: 10,
            epochs: 2,
            learning_rate: 0.01,
            momentum: 0.0,
            seed: 5,
        };
        let (_, history) = train_srcnn(&pairs, &cfg).unwrap();
        assert_eq!(history.len(), 2);
        assert!(history.iter().all(|l| l.is_finite()));
    }

    #[test]
    fn mixed_channel_pairs_are_rejected() {
        let mut pairs = small_corpus();
        let rgb = {
            let gray = wavy(30, 30, 0.0);
            let mut data = Vec::new();
            for v in gray.data() {
                data.extend_from_slice(&[*v, *v, *v]);
            }
            RasterImage::from_data(30, 30, 3, data).unwrap()
        };
        pairs.extend(extract_patch_pairs(&rgb, 2, PATCH_STRIDE, "rgb").unwrap());
        let cfg = TrainConfig::reference(1);
        assert!(matches!(
            train_srcnn(&pairs, &cfg),
            Err(SrcnnError::ShapeMismatch(_))
        ));
    }
}
