//! Shared domain types, the portable tensor file format, and deterministic
//! random-seed plumbing used by every other crate in the workspace.
//!
//! The central objects are per-slice grids in `C x M x N` layout: images
//! (`1 x M x N`), one-hot labels, logits, probabilities and temperature maps.
//! Probabilities and temperatures are held in `f64`; grids on disk are always
//! `f32` (see [`io`]).

pub mod error;
pub mod io;
pub mod seed;
pub mod softmax;
pub mod types;

pub use error::CoreError;
pub use softmax::{argmax_logits, argmax_probs, softmax, softmax_scaled};
pub use types::{
    DatasetSplit, ImageSlice, LabelMap, LogitMap, ProbabilityMap, SplitRole, TemperatureMap,
};

/// Result alias used across the workspace's core operations.
pub type Result<T> = std::result::Result<T, CoreError>;
