//! The two-stream network: backbones, additive attention, classifier,
//! forward/backward passes, and checkpoints.

mod attention;
mod backbone;
mod checkpoint;
mod classifier;
mod forward;
mod gemm;
mod scalar;

pub use attention::{attention_aggregate, AttentionCache, AttentionParams};
pub use backbone::{backbone_forward, BackboneCache, BackboneParams};
pub use checkpoint::{load_checkpoint, save_checkpoint, ModelKind};
pub use classifier::{classify, ClassifierCache, ClassifierParams};
pub use forward::{
    glass_forward, loss_and_grads, Diagnostics, GlassParams, GlobalOnlyParams, Model,
};
pub use gemm::gemm;
pub use scalar::Scalar;

use serde::{Deserialize, Serialize};

/// Architecture hyperparameters shared by every parameter container.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchConfig {
    /// Embedding dimension D produced by each backbone.
    pub embed_dim: usize,
    /// Attention MLP hidden width K.
    pub attn_hidden: usize,
    /// Channel widths of the convolutional blocks.
    pub widths: Vec<usize>,
}

impl Default for ArchConfig {
    fn default() -> Self {
        ArchConfig {
            embed_dim: 64,
            attn_hidden: 128,
            widths: vec![16, 32, 64],
        }
    }
}

impl ArchConfig {
    /// Tiny configuration used by gradient-check tests.
    pub fn tiny() -> Self {
        ArchConfig {
            embed_dim: 4,
            attn_hidden: 4,
            widths: vec![8],
        }
    }
}
