//! Channel-wise softmax, temperature-scaled softmax and per-pixel argmax.
//!
//! All probability arithmetic happens in `f64`. Together with the
//! single-channel temperature contract this makes the per-pixel argmax of
//! `softmax(z / T)` provably identical to the argmax of `softmax(z)`:
//! distinct `f32` logits stay distinct through an `f64` division by a shared
//! positive factor and through `exp`, and exact logit ties break to the
//! lowest class index on both routes.

use ndarray::{Array2, Array3};

use crate::error::CoreError;
use crate::types::{LogitMap, ProbabilityMap, TemperatureMap};
use crate::Result;

/// Channel-wise softmax per pixel, stabilized by subtracting the per-pixel
/// channel maximum before exponentiation.
pub fn softmax(logits: &LogitMap) -> ProbabilityMap {
    let z = logits.data();
    let (c, h, w) = z.dim();
    let mut out = Array3::<f64>::zeros((c, h, w));
    for m in 0..h {
        for n in 0..w {
            let mut max = f64::NEG_INFINITY;
            for ch in 0..c {
                max = max.max(z[[ch, m, n]] as f64);
            }
            let mut sum = 0.0;
            for ch in 0..c {
                let e = ((z[[ch, m, n]] as f64) - max).exp();
                out[[ch, m, n]] = e;
                sum += e;
            }
            for ch in 0..c {
                out[[ch, m, n]] /= sum;
            }
        }
    }
    ProbabilityMap::new(out).expect("softmax output is normalized by construction")
}

/// Softmax of `z / T` with the single temperature channel broadcast across
/// classes. Errors if the spatial shapes disagree.
pub fn softmax_scaled(logits: &LogitMap, temperature: &TemperatureMap) -> Result<ProbabilityMap> {
    let z = logits.data();
    let t = temperature.data();
    let (c, h, w) = z.dim();
    if t.shape()[1] != h || t.shape()[2] != w {
        return Err(CoreError::ShapeMismatch {
            expected: format!("1 x {h} x {w}"),
            actual: format!("{:?}", t.shape()),
        });
    }
    let mut out = Array3::<f64>::zeros((c, h, w));
    for m in 0..h {
        for n in 0..w {
            let tv = t[[0, m, n]];
            let mut max = f64::NEG_INFINITY;
            for ch in 0..c {
                let u = (z[[ch, m, n]] as f64) / tv;
                out[[ch, m, n]] = u;
                max = max.max(u);
            }
            let mut sum = 0.0;
            for ch in 0..c {
                let e = (out[[ch, m, n]] - max).exp();
                out[[ch, m, n]] = e;
                sum += e;
            }
            for ch in 0..c {
                out[[ch, m, n]] /= sum;
            }
        }
    }
    Ok(ProbabilityMap::new(out).expect("scaled softmax output is normalized by construction"))
}

fn argmax_grid<T: PartialOrd + Copy>(data: &Array3<T>) -> Array2<usize> {
    let (c, h, w) = data.dim();
    let mut out = Array2::zeros((h, w));
    for m in 0..h {
        for n in 0..w {
            let mut best_idx = 0usize;
            let mut best = data[[0, m, n]];
            for ch in 1..c {
                let v = data[[ch, m, n]];
                // Ties break to the lowest class index.
                if v > best {
                    best = v;
                    best_idx = ch;
                }
            }
            out[[m, n]] = best_idx;
        }
    }
    out
}

/// Per-pixel argmax over logit channels, ties broken to the lowest index.
pub fn argmax_logits(logits: &LogitMap) -> Array2<usize> {
    argmax_grid(logits.data())
}

/// Per-pixel argmax over probability channels, ties broken to the lowest index.
pub fn argmax_probs(probs: &ProbabilityMap) -> Array2<usize> {
    argmax_grid(probs.data())
}
