//! Two-stream image classification for detecting locally-textured image
//! classes at any resolution.
//!
//! The library combines a globally resized 224x224 view of an image with
//! `n` local 224x224 crops taken at the original resolution. Crops are
//! placed either uniformly at random over the whole image or by stratified
//! grid sampling, which guarantees pairwise non-overlapping crops. Crop
//! embeddings are fused by an additive-attention aggregator and classified
//! together with the global embedding.
//!
//! Module map:
//! - [`imaging`]: decoding, bilinear resize, crop extraction, dataset
//!   manifests and splitting, synthetic corpus generation
//! - [`sampler`]: the grid-size rule and both crop-sampling strategies
//! - [`coverage`]: analytic expected-coverage of sampled crops, a
//!   closed-form approximation, and a Monte Carlo oracle
//! - [`model`]: backbones, additive attention, classifier, forward and
//!   backward passes, checkpoints
//! - [`training`]: per-branch optimizer, training loop, evaluation,
//!   scaling probes
//! - [`metrics`]: accuracy/precision/recall/F1, AUC, ECE, least squares,
//!   classifier weight distribution

pub mod coverage;
pub mod error;
pub mod imaging;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod training;

pub use error::{GlassError, Result};
pub use rng::SeedRng;

/// Version stamp written into every JSON artifact the library produces.
pub const SCHEMA_VERSION: u32 = 1;

/// Side length in pixels of every crop and of the global resized view.
pub const CROP_SIDE: usize = 224;

/// Grid-size cap: at most 8x8 cells regardless of image size.
pub const MAX_GRID: usize = 8;

#[cfg(doctest)]
mod book_doctests;
