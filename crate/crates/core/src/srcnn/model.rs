//! The three-layer super-resolution network and its forward pass.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::layer::{apply_activation, Activation, ConvLayer};
use super::tensor::Tensor3;
use super::SrcnnError;

/// Fixed architecture geometry: 64 9x9 filters, 32 1x1 filters, then a
/// linear 5x5 reconstruction layer. Valid convolutions shrink each spatial
/// axis by `(9-1) + (1-1) + (5-1) = 12` pixels in total.
pub const LAYER1_FILTERS: usize = 64;
pub const LAYER2_FILTERS: usize = 32;
pub const LAYER1_KERNEL: usize = 9;
pub const LAYER2_KERNEL: usize = 1;
pub const LAYER3_KERNEL: usize = 5;
/// Total spatial shrink per axis across the three layers.
pub const TOTAL_SHRINK: usize = (LAYER1_KERNEL - 1) + (LAYER2_KERNEL - 1) + (LAYER3_KERNEL - 1);

/// Training provenance carried inside a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelMetadata {
    pub seed: u64,
    pub epochs: u32,
    pub final_loss: f32,
}

impl Default for ModelMetadata {
    fn default() -> Self {
        Self { seed: 0, epochs: 0, final_loss: f32::NAN }
    }
}

/// The super-resolution network: two ReLU feature layers and a linear
/// reconstruction layer, all valid convolutions.
#[derive(Debug, Clone)]
pub struct SrcnnModel {
    channels: usize,
    layers: [ConvLayer; 3],
    metadata: ModelMetadata,
}

impl SrcnnModel {
    /// Assembles a model from explicit layers, enforcing the architecture.
    pub fn from_layers(
        channels: usize,
        layer1: ConvLayer,
        layer2: ConvLayer,
        layer3: ConvLayer,
        metadata: ModelMetadata,
    ) -> Result<Self, SrcnnError> {
        if channels != 1 && channels != 3 {
            return Err(SrcnnError::ChannelMismatch(format!(
                "model channels must be 1 or 3, got {channels}"
            )));
        }
        let want = [
            (LAYER1_FILTERS, channels, LAYER1_KERNEL, Activation::ReLU),
            (LAYER2_FILTERS, LAYER1_FILTERS, LAYER2_KERNEL, Activation::ReLU),
            (channels, LAYER2_FILTERS, LAYER3_KERNEL, Activation::Linear),
        ];
        for (idx, (layer, (out_c, in_c, k, act))) in [&layer1, &layer2, &layer3].iter().zip(want).enumerate() {
            if layer.out_channels() != out_c
                || layer.in_channels() != in_c
                || layer.kernel_h() != k
                || layer.kernel_w() != k
                || layer.activation() != act
            {
                return Err(SrcnnError::ShapeMismatch(format!(
                    "layer {} must be {out_c}x{in_c}x{k}x{k} {act:?}, got {}x{}x{}x{} {:?}",
                    idx + 1,
                    layer.out_channels(),
                    layer.in_channels(),
                    layer.kernel_h(),
                    layer.kernel_w(),
                    layer.activation()
                )));
            }
        }
        Ok(Self { channels, layers: [layer1, layer2, layer3], metadata })
    }

    /// A model with weights drawn from a seeded Gaussian
    /// (mean 0, the given standard deviation) and zero biases.
    pub fn random(channels: usize, seed: u64, weight_std: f64) -> Result<Self, SrcnnError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_from_rng(channels, weight_std, &mut rng)
    }

    /// As [`SrcnnModel::random`], drawing from a caller-owned stream so the
    /// trainer can keep consuming it afterwards.
    pub(crate) fn random_from_rng(
        channels: usize,
        weight_std: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, SrcnnError> {
        use rand_distr::{Distribution, Normal};
        let normal = Normal::new(0.0, weight_std)
            .map_err(|e| SrcnnError::BadConfig(format!("weight std: {e}")))?;
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| normal.sample(rng)).collect() };
        let l1 = ConvLayer::new(
            LAYER1_FILTERS,
            channels,
            LAYER1_KERNEL,
            LAYER1_KERNEL,
            draw(LAYER1_FILTERS * channels * LAYER1_KERNEL * LAYER1_KERNEL),
            vec![0.0; LAYER1_FILTERS],
            Activation::ReLU,
        )?;
        let l2 = ConvLayer::new(
            LAYER2_FILTERS,
            LAYER1_FILTERS,
            LAYER2_KERNEL,
            LAYER2_KERNEL,
            draw(LAYER2_FILTERS * LAYER1_FILTERS),
            vec![0.0; LAYER2_FILTERS],
            Activation::ReLU,
        )?;
        let l3 = ConvLayer::new(
            channels,
            LAYER2_FILTERS,
            LAYER3_KERNEL,
            LAYER3_KERNEL,
            draw(channels * LAYER2_FILTERS * LAYER3_KERNEL * LAYER3_KERNEL),
            vec![0.0; channels],
            Activation::Linear,
        )?;
        Self::from_layers(channels, l1, l2, l3, ModelMetadata { seed: 0, epochs: 0, final_loss: f32::NAN })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn layers(&self) -> &[ConvLayer; 3] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [ConvLayer; 3] {
        &mut self.layers
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub(crate) fn set_metadata(&mut self, metadata: ModelMetadata) {
        self.metadata = metadata;
    }

    /// Total number of trainable parameters.
    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights().len() + l.biases().len())
            .sum()
    }
}

/// Per-layer activations retained by [`forward`] for backpropagation.
/// `pre[k]` is layer k's pre-activation; `post[k]` its post-activation.
/// `post[2]` equals the network output (the last layer is linear).
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub(crate) input: Tensor3,
    pub(crate) pre: [Tensor3; 3],
    pub(crate) post: [Tensor3; 3],
}

impl ForwardCache {
    pub(crate) fn empty() -> Self {
        Self {
            input: Tensor3::zeros(0, 0, 0),
            pre: [Tensor3::zeros(0, 0, 0), Tensor3::zeros(0, 0, 0), Tensor3::zeros(0, 0, 0)],
            post: [Tensor3::zeros(0, 0, 0), Tensor3::zeros(0, 0, 0), Tensor3::zeros(0, 0, 0)],
        }
    }

    pub fn output(&self) -> &Tensor3 {
        &self.post[2]
    }
}

/// Runs the three layers, returning the output and the cached activations
/// needed by the backward pass.
pub fn forward(model: &SrcnnModel, input: &Tensor3) -> Result<(Tensor3, ForwardCache), SrcnnError> {
    let mut cache = ForwardCache::empty();
    forward_into(model, input, &mut cache)?;
    Ok((cache.output().clone(), cache))
}

/// Buffer-reusing forward pass; `cache` tensors are reshaped as needed.
pub(crate) fn forward_into(model: &SrcnnModel, input: &Tensor3, cache: &mut ForwardCache) -> Result<(), SrcnnError> {
    if input.channels() != model.channels {
        return Err(SrcnnError::ChannelMismatch(format!(
            "model expects {} channels, got {}",
            model.channels,
            input.channels()
        )));
    }
    let min = TOTAL_SHRINK + 1;
    if input.height() < min || input.width() < min {
        return Err(SrcnnError::InputTooSmall(format!(
            "{}x{} input; the network needs at least {min}x{min}",
            input.height(),
            input.width()
        )));
    }
    cache.input.reset(input.channels(), input.height(), input.width());
    cache.input.data_mut().copy_from_slice(input.data());
    for k in 0..3 {
        let layer = &model.layers[k];
        let src = if k == 0 { &cache.input } else { &cache.post[k - 1] };
        // Split borrows: pre[k] is written from src, then post[k] from pre[k].
        let mut pre = std::mem::replace(&mut cache.pre[k], Tensor3::zeros(0, 0, 0));
        layer.forward_pre_into(src, &mut pre)?;
        let mut post = std::mem::replace(&mut cache.post[k], Tensor3::zeros(0, 0, 0));
        apply_activation(layer.activation(), &pre, &mut post);
        cache.pre[k] = pre;
        cache.post[k] = post;
    }
    Ok(())
}

/// Mean-squared-error loss and its gradient `2 (pred - target) / N`.
pub fn mse_loss(pred: &Tensor3, target: &Tensor3) -> Result<(f64, Tensor3), SrcnnError> {
    let mut grad = Tensor3::zeros(0, 0, 0);
    let loss = mse_loss_into(pred, target, &mut grad)?;
    Ok((loss, grad))
}

/// Buffer-reusing MSE; returns the loss, writing the gradient into `grad`.
pub(crate) fn mse_loss_into(pred: &Tensor3, target: &Tensor3, grad: &mut Tensor3) -> Result<f64, SrcnnError> {
    if pred.shape() != target.shape() {
        return Err(SrcnnError::ShapeMismatch(format!(
            "prediction {:?} vs target {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    let (c, h, w) = pred.shape();
    grad.reset(c, h, w);
    let n = pred.data().len() as f64;
    let mut loss = 0.0;
    for ((g, &p), &t) in grad.data_mut().iter_mut().zip(pred.data()).zip(target.data()) {
        let d = p - t;
        loss += d * d;
        *g = 2.0 * d / n;
    }
    Ok(loss / n)
}
