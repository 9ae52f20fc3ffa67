//! Training-time augmentation policy: photometric transforms (brightness,
//! contrast, gamma, additive noise) and geometric transforms (affine,
//! elastic). The susceptibility estimator reuses the photometric part of the
//! exact policy the segmenter was trained with; geometric warps are excluded
//! there because per-pixel statistics require spatial alignment.
//!
//! Test-time corruptions (bias field, ghosting, spikes, motion) are a
//! different module and can never appear in a policy.

mod geometric;
mod photometric;
mod policy;

pub use geometric::apply_geometric;
pub use photometric::apply_photometric;
pub use policy::{
    sample_params, AffineRanges, AugParams, AugmentError, AugmentationPolicy, ElasticConfig,
    GeometricParams,
};
