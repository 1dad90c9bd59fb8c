//! Three-layer super-resolution network: forward pass, explicit
//! backpropagation, SGD-with-momentum training, full-image inference, and
//! model serialization.
//!
//! The architecture is fixed: 64 9x9 ReLU filters, 32 1x1 ReLU filters,
//! and a linear 5x5 reconstruction layer, all valid (unpadded)
//! convolutions, so any input loses 12 pixels per spatial axis end to end.

mod backprop;
mod infer;
mod layer;
mod model;
mod serial;
mod tensor;
mod train;

pub use backprop::{backward, sgd_momentum_step, GradientSet, LayerGradients, Velocity};
pub use infer::upscale;
pub use layer::{conv_valid_forward, Activation, ConvLayer};
pub use model::{
    forward, mse_loss, ForwardCache, ModelMetadata, SrcnnModel, LAYER1_FILTERS, LAYER1_KERNEL,
    LAYER2_FILTERS, LAYER2_KERNEL, LAYER3_KERNEL, TOTAL_SHRINK,
};
pub use serial::{load_model, model_from_bytes, model_to_bytes, save_model};
pub use tensor::Tensor3;
pub use train::{train_srcnn, TrainConfig, INIT_WEIGHT_STD};

use thiserror::Error;

/// Errors produced by network construction, execution, training, and
/// serialization.
#[derive(Debug, Error)]
pub enum SrcnnError {
    #[error("channel mismatch: {0}")]
    ChannelMismatch(String),
    #[error("input smaller than kernel: {0}")]
    InputSmallerThanKernel(String),
    #[error("input too small: {0}")]
    InputTooSmall(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("cache mismatch: {0}")]
    CacheMismatch(String),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("bad magic bytes (not a model file)")]
    BadMagic,
    #[error("unsupported model format version {0}")]
    VersionUnsupported(u32),
    #[error("checksum mismatch (file corrupt or truncated)")]
    ChecksumMismatch,
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
