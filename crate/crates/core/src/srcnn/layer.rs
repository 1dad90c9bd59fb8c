//! Convolution layers and the valid-convolution forward primitive.

use super::tensor::Tensor3;
use super::SrcnnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    ReLU,
    Linear,
}

/// One convolution layer with no padding ("valid" convolution).
///
/// Weights are stored `out x in x kh x kw`, row-major in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub(crate) out_channels: usize,
    pub(crate) in_channels: usize,
    pub(crate) kernel_h: usize,
    pub(crate) kernel_w: usize,
    pub(crate) weights: Vec<f64>,
    pub(crate) biases: Vec<f64>,
    pub(crate) activation: Activation,
}

impl ConvLayer {
    pub fn new(
        out_channels: usize,
        in_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        activation: Activation,
    ) -> Result<Self, SrcnnError> {
        if out_channels == 0 || in_channels == 0 {
            return Err(SrcnnError::ShapeMismatch("channel counts must be at least 1".into()));
        }
        if kernel_h == 0 || kernel_w == 0 || kernel_h.is_multiple_of(2) || kernel_w.is_multiple_of(2) {
            return Err(SrcnnError::ShapeMismatch(format!(
                "kernel dimensions must be odd and >= 1, got {kernel_h}x{kernel_w}"
            )));
        }
        let expected = out_channels * in_channels * kernel_h * kernel_w;
        if weights.len() != expected {
            return Err(SrcnnError::ShapeMismatch(format!(
                "weight buffer holds {} values, expected {expected}",
                weights.len()
            )));
        }
        if biases.len() != out_channels {
            return Err(SrcnnError::ShapeMismatch(format!(
                "bias buffer holds {} values, expected {out_channels}",
                biases.len()
            )));
        }
        Ok(Self {
            out_channels,
            in_channels,
            kernel_h,
            kernel_w,
            weights,
            biases,
            activation,
        })
    }

    /// All-zero layer of the given geometry.
    pub fn zeros(
        out_channels: usize,
        in_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
        activation: Activation,
    ) -> Result<Self, SrcnnError> {
        Self::new(
            out_channels,
            in_channels,
            kernel_h,
            kernel_w,
            vec![0.0; out_channels * in_channels * kernel_h * kernel_w],
            vec![0.0; out_channels],
            activation,
        )
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn kernel_h(&self) -> usize {
        self.kernel_h
    }

    pub fn kernel_w(&self) -> usize {
        self.kernel_w
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    /// Index of weight `(o, i, ky, kx)` in the flat buffer.
    #[inline]
    pub(crate) fn widx(&self, o: usize, i: usize, ky: usize, kx: usize) -> usize {
        ((o * self.in_channels + i) * self.kernel_h + ky) * self.kernel_w + kx
    }

    fn check_input(&self, input: &Tensor3) -> Result<(usize, usize), SrcnnError> {
        if input.channels() != self.in_channels {
            return Err(SrcnnError::ChannelMismatch(format!(
                "layer expects {} input channels, got {}",
                self.in_channels,
                input.channels()
            )));
        }
        if input.height() < self.kernel_h || input.width() < self.kernel_w {
            return Err(SrcnnError::InputSmallerThanKernel(format!(
                "{}x{} input vs {}x{} kernel",
                input.height(),
                input.width(),
                self.kernel_h,
                self.kernel_w
            )));
        }
        Ok((input.height() - self.kernel_h + 1, input.width() - self.kernel_w + 1))
    }

    /// Writes pre-activation outputs into `pre` (reshaped as needed).
    pub(crate) fn forward_pre_into(&self, input: &Tensor3, pre: &mut Tensor3) -> Result<(), SrcnnError> {
        let (out_h, out_w) = self.check_input(input)?;
        pre.reset(self.out_channels, out_h, out_w);
        let in_w = input.width();
        let out = pre.data_mut();
        for o in 0..self.out_channels {
            let bias = self.biases[o];
            let out_plane = &mut out[o * out_h * out_w..(o + 1) * out_h * out_w];
            out_plane.fill(bias);
            for i in 0..self.in_channels {
                let in_plane = input.plane(i);
                for ky in 0..self.kernel_h {
                    let wrow = &self.weights[self.widx(o, i, ky, 0)..self.widx(o, i, ky, 0) + self.kernel_w];
                    for y in 0..out_h {
                        let in_row = &in_plane[(y + ky) * in_w..(y + ky) * in_w + in_w];
                        let dst = &mut out_plane[y * out_w..y * out_w + out_w];
                        for (kx, &w) in wrow.iter().enumerate() {
                            let src = &in_row[kx..kx + out_w];
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d += w * *s;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Applies a layer's activation elementwise, `pre -> post`.
pub(crate) fn apply_activation(activation: Activation, pre: &Tensor3, post: &mut Tensor3) {
    let (c, h, w) = pre.shape();
    post.reset(c, h, w);
    match activation {
        Activation::Linear => post.data_mut().copy_from_slice(pre.data()),
        Activation::ReLU => {
            for (d, &s) in post.data_mut().iter_mut().zip(pre.data()) {
                *d = if s > 0.0 { s } else { 0.0 };
            }
        }
    }
}

/// Valid convolution followed by the layer's activation.
pub fn conv_valid_forward(input: &Tensor3, layer: &ConvLayer) -> Result<Tensor3, SrcnnError> {
    let mut pre = Tensor3::zeros(0, 0, 0);
    layer.forward_pre_into(input, &mut pre)?;
    if layer.activation == Activation::ReLU {
        for v in pre.data_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }
    Ok(pre)
}
