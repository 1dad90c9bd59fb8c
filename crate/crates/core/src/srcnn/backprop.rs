//! Explicit backpropagation through the three-layer network, and the
//! SGD-with-momentum parameter update.

use super::layer::{Activation, ConvLayer};
use super::model::{ForwardCache, SrcnnModel};
use super::tensor::Tensor3;
use super::SrcnnError;

/// Gradients (or momentum state) for one layer's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradients {
    pub(crate) weights: Vec<f64>,
    pub(crate) biases: Vec<f64>,
}

impl LayerGradients {
    fn zeros_like(layer: &ConvLayer) -> Self {
        Self {
            weights: vec![0.0; layer.weights().len()],
            biases: vec![0.0; layer.biases().len()],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }
}

/// The full gradient of the loss: per-layer parameter gradients plus the
/// gradient with respect to the network input.
#[derive(Debug, Clone)]
pub struct GradientSet {
    pub(crate) layers: [LayerGradients; 3],
    pub(crate) input: Tensor3,
}

impl GradientSet {
    pub(crate) fn zeros_like(model: &SrcnnModel) -> Self {
        let [l1, l2, l3] = model.layers();
        Self {
            layers: [
                LayerGradients::zeros_like(l1),
                LayerGradients::zeros_like(l2),
                LayerGradients::zeros_like(l3),
            ],
            input: Tensor3::zeros(0, 0, 0),
        }
    }

    pub fn layers(&self) -> &[LayerGradients; 3] {
        &self.layers
    }

    /// Gradient of the loss with respect to the network input.
    pub fn input(&self) -> &Tensor3 {
        &self.input
    }

    /// Scales every parameter gradient in place (used for batch averaging).
    pub(crate) fn scale_params(&mut self, factor: f64) {
        for lg in &mut self.layers {
            for w in &mut lg.weights {
                *w *= factor;
            }
            for b in &mut lg.biases {
                *b *= factor;
            }
        }
    }

    /// Zeroes every parameter gradient in place.
    pub(crate) fn clear_params(&mut self) {
        for lg in &mut self.layers {
            lg.weights.fill(0.0);
            lg.biases.fill(0.0);
        }
    }
}

/// Dot product with four independent accumulators. The fixed accumulation
/// pattern keeps results bit-deterministic while letting the loop vectorize.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = k * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Accumulates parameter gradients for one layer:
/// `dW[o,i,ky,kx] += sum_yx g[o,y,x] * a_in[i, y+ky, x+kx]`,
/// `db[o] += sum_yx g[o,y,x]`.
fn conv_backward_params(a_in: &Tensor3, g: &Tensor3, layer: &ConvLayer, acc: &mut LayerGradients) {
    let (_, out_h, out_w) = g.shape();
    let in_w = a_in.width();
    for o in 0..layer.out_channels() {
        let gpl = g.plane(o);
        acc.biases[o] += gpl.iter().sum::<f64>();
        for i in 0..layer.in_channels() {
            let apl = a_in.plane(i);
            for ky in 0..layer.kernel_h() {
                for kx in 0..layer.kernel_w() {
                    let mut s = 0.0;
                    for y in 0..out_h {
                        let grow = &gpl[y * out_w..y * out_w + out_w];
                        let arow = &apl[(y + ky) * in_w + kx..(y + ky) * in_w + kx + out_w];
                        s += dot(grow, arow);
                    }
                    acc.weights[layer.widx(o, i, ky, kx)] += s;
                }
            }
        }
    }
}

/// Gradient with respect to the layer input (full correlation):
/// `gin[i, y+ky, x+kx] += w[o,i,ky,kx] * g[o,y,x]`.
/// `gin` must already have the input's shape; values are accumulated.
fn conv_backward_input(g: &Tensor3, layer: &ConvLayer, gin: &mut Tensor3) {
    let (_, out_h, out_w) = g.shape();
    let in_h = gin.height();
    let in_w = gin.width();
    let plane_len = in_h * in_w;
    for o in 0..layer.out_channels() {
        let gpl_start = o * out_h * out_w;
        for i in 0..layer.in_channels() {
            for ky in 0..layer.kernel_h() {
                for kx in 0..layer.kernel_w() {
                    let w = layer.weights()[layer.widx(o, i, ky, kx)];
                    for y in 0..out_h {
                        // Re-borrow per row to satisfy the borrow checker
                        // while g and gin live in different tensors.
                        let grow_start = gpl_start + y * out_w;
                        let irow_start = i * plane_len + (y + ky) * in_w + kx;
                        let (gdata, idata) = (g.data(), gin.data_mut());
                        let grow = &gdata[grow_start..grow_start + out_w];
                        let irow = &mut idata[irow_start..irow_start + out_w];
                        for (d, s) in irow.iter_mut().zip(grow) {
                            *d += w * *s;
                        }
                    }
                }
            }
        }
    }
}

/// In place: `d = d * (pre > 0)` — the ReLU gate on pre-activation sign.
fn relu_gate(d: &mut Tensor3, pre: &Tensor3) {
    for (v, &p) in d.data_mut().iter_mut().zip(pre.data()) {
        if p <= 0.0 {
            *v = 0.0;
        }
    }
}

fn check_cache(model: &SrcnnModel, cache: &ForwardCache, loss_grad: &Tensor3) -> Result<(), SrcnnError> {
    if cache.input.channels() != model.channels() || cache.input.data().is_empty() {
        return Err(SrcnnError::CacheMismatch(format!(
            "cache input is {}-channel, model is {}-channel",
            cache.input.channels(),
            model.channels()
        )));
    }
    if loss_grad.shape() != cache.post[2].shape() {
        return Err(SrcnnError::CacheMismatch(format!(
            "loss gradient shape {:?} does not match cached output {:?}",
            loss_grad.shape(),
            cache.post[2].shape()
        )));
    }
    Ok(())
}

/// Backpropagates `loss_grad` through the cached forward pass, producing
/// gradients for every weight and bias plus the input gradient. ReLU
/// layers gate on the sign of their cached pre-activations.
pub fn backward(model: &SrcnnModel, cache: &ForwardCache, loss_grad: &Tensor3) -> Result<GradientSet, SrcnnError> {
    check_cache(model, cache, loss_grad)?;
    let mut gs = GradientSet::zeros_like(model);
    let mut scratch = BackwardScratch::new();
    backward_params_accumulate(model, cache, loss_grad, &mut gs, &mut scratch)?;
    // Finish with the gradient w.r.t. the network input.
    let (c, h, w) = cache.input.shape();
    gs.input.reset(c, h, w);
    conv_backward_input(&scratch.d1, &model.layers()[0], &mut gs.input);
    Ok(gs)
}

/// Scratch tensors reused across backward passes inside a training batch.
#[derive(Debug)]
pub(crate) struct BackwardScratch {
    d2: Tensor3,
    d1: Tensor3,
}

impl BackwardScratch {
    pub(crate) fn new() -> Self {
        Self {
            d2: Tensor3::zeros(0, 0, 0),
            d1: Tensor3::zeros(0, 0, 0),
        }
    }
}

/// Accumulates parameter gradients (only) into `acc`, leaving `acc.input`
/// untouched. The training loop calls this per sample, then averages;
/// skipping the layer-1 input gradient saves roughly a quarter of the
/// backward arithmetic and that gradient is not needed for the update.
pub(crate) fn backward_params_accumulate(
    model: &SrcnnModel,
    cache: &ForwardCache,
    loss_grad: &Tensor3,
    acc: &mut GradientSet,
    scratch: &mut BackwardScratch,
) -> Result<(), SrcnnError> {
    check_cache(model, cache, loss_grad)?;
    let [l1, l2, l3] = model.layers();
    debug_assert_eq!(l3.activation(), Activation::Linear);

    // Layer 3 (linear): the loss gradient is already the pre-activation
    // gradient.
    conv_backward_params(&cache.post[1], loss_grad, l3, &mut acc.layers[2]);

    // d(post of layer 2).
    let (c2, h2, w2) = cache.post[1].shape();
    scratch.d2.reset(c2, h2, w2);
    conv_backward_input(loss_grad, l3, &mut scratch.d2);
    relu_gate(&mut scratch.d2, &cache.pre[1]);
    conv_backward_params(&cache.post[0], &scratch.d2, l2, &mut acc.layers[1]);

    // d(post of layer 1).
    let (c1, h1, w1) = cache.post[0].shape();
    scratch.d1.reset(c1, h1, w1);
    conv_backward_input(&scratch.d2, l2, &mut scratch.d1);
    relu_gate(&mut scratch.d1, &cache.pre[0]);
    conv_backward_params(&cache.input, &scratch.d1, l1, &mut acc.layers[0]);
    Ok(())
}

/// Momentum buffers for every trainable parameter.
#[derive(Debug, Clone)]
pub struct Velocity {
    pub(crate) layers: [LayerGradients; 3],
}

impl Velocity {
    pub fn zeros_like(model: &SrcnnModel) -> Self {
        let [l1, l2, l3] = model.layers();
        Self {
            layers: [
                LayerGradients::zeros_like(l1),
                LayerGradients::zeros_like(l2),
                LayerGradients::zeros_like(l3),
            ],
        }
    }
}

/// One SGD-with-momentum update over every weight and bias:
/// `v <- momentum * v - lr * g`, then `w <- w + v`.
pub fn sgd_momentum_step(
    model: &mut SrcnnModel,
    velocity: &mut Velocity,
    grads: &GradientSet,
    learning_rate: f64,
    momentum: f64,
) -> Result<(), SrcnnError> {
    for k in 0..3 {
        let layer = &model.layers()[k];
        if grads.layers[k].weights.len() != layer.weights().len()
            || grads.layers[k].biases.len() != layer.biases().len()
            || velocity.layers[k].weights.len() != layer.weights().len()
            || velocity.layers[k].biases.len() != layer.biases().len()
        {
            return Err(SrcnnError::ShapeMismatch(format!(
                "gradient/velocity buffers do not match layer {} geometry",
                k + 1
            )));
        }
    }
    for k in 0..3 {
        let layer = &mut model.layers_mut()[k];
        let g = &grads.layers[k];
        let v = &mut velocity.layers[k];
        for ((w, vel), grad) in layer.weights_mut().iter_mut().zip(&mut v.weights).zip(&g.weights) {
            *vel = momentum * *vel - learning_rate * *grad;
            *w += *vel;
        }
        for ((b, vel), grad) in layer.biases_mut().iter_mut().zip(&mut v.biases).zip(&g.biases) {
            *vel = momentum * *vel - learning_rate * *grad;
            *b += *vel;
        }
    }
    Ok(())
}
