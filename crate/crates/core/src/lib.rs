//! Periocular super-resolution and sex-classification toolkit.
//!
//! The crate is organized as four layers that build on each other:
//!
//! * [`imagekit`] — image containers, PNG/PNM I/O, bicubic resampling,
//!   patch-pair extraction, geometric augmentation, and PSNR.
//! * [`srcnn`] — a three-layer super-resolution CNN trained from scratch
//!   with explicit backpropagation and SGD with momentum.
//! * [`forest`] — random-forest classification with three split criteria
//!   (Gini, two-class deviance, twoing rule).
//! * [`pipeline`] — experiment orchestration: manifests, person-disjoint
//!   splits, augmentation sets, SR training runs, the classification
//!   experiment matrix, hyperparameter grid search, and a synthetic
//!   corpus generator.
//!
//! All randomized behaviour is driven by explicit `u64` seeds through
//! ChaCha8 streams, so every public operation is reproducible bit-for-bit
//! given the same inputs and seed.

pub mod forest;
pub mod imagekit;
pub mod pipeline;
pub mod rng;
pub mod srcnn;
