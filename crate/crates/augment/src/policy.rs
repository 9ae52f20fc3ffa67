use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use calseg_core::seed::{derive_seed, rng_from};

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("invalid augmentation policy: {0}")]
    InvalidPolicy(String),
    #[error("policy contains geometric transforms where only photometric are allowed")]
    GeometricNotAllowed,
}

/// Inclusive parameter ranges for the affine transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineRanges {
    pub rotation_deg: (f32, f32),
    pub scale: (f32, f32),
    pub translation_px: (f32, f32),
}

/// Elastic deformation: a coarse Gaussian displacement grid upsampled
/// bilinearly to the image resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElasticConfig {
    pub grid_spacing: usize,
    pub displacement_std: f32,
}

/// Augmentation policy. Each transform is present with its range or disabled
/// with `None`; every enabled range must contain the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationPolicy {
    pub brightness: Option<(f32, f32)>,
    pub contrast: Option<(f32, f32)>,
    pub gamma: Option<(f32, f32)>,
    pub noise_std: Option<(f32, f32)>,
    pub affine: Option<AffineRanges>,
    pub elastic: Option<ElasticConfig>,
}

impl Default for AugmentationPolicy {
    fn default() -> Self {
        Self {
            brightness: Some((-0.1, 0.1)),
            contrast: Some((0.8, 1.2)),
            gamma: Some((0.7, 1.4)),
            noise_std: Some((0.0, 0.05)),
            affine: Some(AffineRanges {
                rotation_deg: (-15.0, 15.0),
                scale: (0.9, 1.1),
                translation_px: (-5.0, 5.0),
            }),
            elastic: Some(ElasticConfig {
                grid_spacing: 32,
                displacement_std: 1.5,
            }),
        }
    }
}

impl AugmentationPolicy {
    /// No-op policy; useful as a control.
    pub fn identity() -> Self {
        Self {
            brightness: None,
            contrast: None,
            gamma: None,
            noise_std: None,
            affine: None,
            elastic: None,
        }
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        fn check(
            name: &str,
            range: Option<(f32, f32)>,
            identity: f32,
        ) -> Result<(), AugmentError> {
            if let Some((lo, hi)) = range {
                if !(lo <= hi) {
                    return Err(AugmentError::InvalidPolicy(format!(
                        "{name} range ({lo}, {hi}) is empty"
                    )));
                }
                if !(lo <= identity && identity <= hi) {
                    return Err(AugmentError::InvalidPolicy(format!(
                        "{name} range ({lo}, {hi}) does not contain the identity {identity}"
                    )));
                }
            }
            Ok(())
        }
        check("brightness", self.brightness, 0.0)?;
        check("contrast", self.contrast, 1.0)?;
        check("gamma", self.gamma, 1.0)?;
        check("noise_std", self.noise_std, 0.0)?;
        if let Some(aff) = &self.affine {
            check("rotation", Some(aff.rotation_deg), 0.0)?;
            check("scale", Some(aff.scale), 1.0)?;
            check("translation", Some(aff.translation_px), 0.0)?;
        }
        if let Some(el) = &self.elastic {
            if el.grid_spacing == 0 {
                return Err(AugmentError::InvalidPolicy(
                    "elastic grid spacing must be positive".into(),
                ));
            }
            if el.displacement_std < 0.0 {
                return Err(AugmentError::InvalidPolicy(
                    "elastic displacement std must be non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn has_geometric(&self) -> bool {
        self.affine.is_some() || self.elastic.is_some()
    }

    /// Copy of this policy with the geometric transforms stripped.
    pub fn photometric_only(&self) -> Self {
        Self {
            affine: None,
            elastic: None,
            ..self.clone()
        }
    }
}

/// Geometric draw: one rigid-ish affine plus an optional elastic field seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricParams {
    pub rotation_deg: f32,
    pub scale: f32,
    pub translation_px: (f32, f32),
    pub elastic: Option<ElasticConfig>,
    pub elastic_seed: u64,
}

impl GeometricParams {
    pub fn is_identity(&self) -> bool {
        self.rotation_deg == 0.0
            && self.scale == 1.0
            && self.translation_px == (0.0, 0.0)
            && self
                .elastic
                .as_ref()
                .map(|e| e.displacement_std == 0.0)
                .unwrap_or(true)
    }
}

/// One concrete draw from a policy. Applying the same params twice gives the
/// same output; the additive-noise field is pinned by `noise_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugParams {
    pub brightness: f32,
    pub contrast: f32,
    pub gamma: f32,
    pub noise_std: f32,
    pub noise_seed: u64,
    pub geometric: Option<GeometricParams>,
}

impl AugParams {
    /// Exact no-op draw.
    pub fn identity() -> Self {
        Self {
            brightness: 0.0,
            contrast: 1.0,
            gamma: 1.0,
            noise_std: 0.0,
            noise_seed: 0,
            geometric: None,
        }
    }
}

/// Draws one parameter set from the policy; deterministic given the seed.
pub fn sample_params(policy: &AugmentationPolicy, seed: u64) -> AugParams {
    let mut rng = rng_from(derive_seed(seed, &["augment", "params"], 0));
    let mut draw = |range: Option<(f32, f32)>, identity: f32| -> f32 {
        match range {
            Some((lo, hi)) if lo < hi => rng.gen_range(lo..=hi),
            Some((lo, _)) => lo,
            None => identity,
        }
    };
    let brightness = draw(policy.brightness, 0.0);
    let contrast = draw(policy.contrast, 1.0);
    let gamma = draw(policy.gamma, 1.0);
    let noise_std = draw(policy.noise_std, 0.0);
    let noise_seed = derive_seed(seed, &["augment", "noise"], 0);

    let geometric = if policy.has_geometric() {
        let (rotation_deg, scale, translation_px) = if let Some(aff) = &policy.affine {
            let mut draw_aff = |(lo, hi): (f32, f32), identity: f32| -> f32 {
                if lo < hi {
                    rng.gen_range(lo..=hi)
                } else if lo == hi {
                    lo
                } else {
                    identity
                }
            };
            let rot = draw_aff(aff.rotation_deg, 0.0);
            let sc = draw_aff(aff.scale, 1.0);
            let tx = draw_aff(aff.translation_px, 0.0);
            let ty = draw_aff(aff.translation_px, 0.0);
            (rot, sc, (tx, ty))
        } else {
            (0.0, 1.0, (0.0, 0.0))
        };
        Some(GeometricParams {
            rotation_deg,
            scale,
            translation_px,
            elastic: policy.elastic.clone(),
            elastic_seed: derive_seed(seed, &["augment", "elastic"], 0),
        })
    } else {
        None
    };

    AugParams {
        brightness,
        contrast,
        gamma,
        noise_std,
        noise_seed,
        geometric,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_policy_is_valid() {
        AugmentationPolicy::default().validate().unwrap();
    }

    #[test]
    fn policy_without_identity_is_rejected() {
        let mut p = AugmentationPolicy::default();
        p.gamma = Some((1.2, 1.4));
        assert!(p.validate().is_err());
    }

    #[test]
    fn degenerate_ranges_always_draw_the_same_params() {
        let p = AugmentationPolicy {
            brightness: Some((0.05, 0.05)),
            contrast: Some((1.1, 1.1)),
            gamma: Some((0.9, 0.9)),
            noise_std: Some((0.0, 0.0)),
            affine: None,
            elastic: None,
        };
        for seed in 0..20 {
            let params = sample_params(&p, seed);
            assert_eq!(params.brightness, 0.05);
            assert_eq!(params.contrast, 1.1);
            assert_eq!(params.gamma, 0.9);
            assert_eq!(params.noise_std, 0.0);
        }
    }

    #[test]
    fn fixed_seed_gives_identical_params() {
        let p = AugmentationPolicy::default();
        assert_eq!(sample_params(&p, 1234), sample_params(&p, 1234));
    }

    #[test]
    fn gamma_draws_stay_inside_the_range() {
        let p = AugmentationPolicy {
            gamma: Some((0.7, 1.4)),
            ..AugmentationPolicy::identity()
        };
        let mut min = f32::INFINITY;
        let mut max = f32::NEG_INFINITY;
        for seed in 0..10_000u64 {
            let g = sample_params(&p, seed).gamma;
            min = min.min(g);
            max = max.max(g);
        }
        assert!(min >= 0.7 && max <= 1.4, "range violated: [{min}, {max}]");
        // The draws should also cover most of the range.
        assert!(min < 0.75 && max > 1.35);
    }

    #[test]
    fn photometric_only_strips_geometry() {
        let p = AugmentationPolicy::default().photometric_only();
        assert!(!p.has_geometric());
        assert!(sample_params(&p, 7).geometric.is_none());
    }
}
