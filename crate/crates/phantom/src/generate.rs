use ndarray::{Array2, Array3};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use calseg_core::seed::{derive_seed, rng_from};
use calseg_core::{ImageSlice, LabelMap};

use crate::classes;

#[derive(Debug, Error)]
pub enum PhantomError {
    #[error("invalid phantom config: {0}")]
    InvalidConfig(String),
    #[error("no admissible geometry found after {0} rejection-sampling attempts")]
    DegenerateGeometry(usize),
}

/// Geometry and texture ranges for one synthetic case. All lengths are in
/// pixels, angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomConfig {
    /// Square image side M = N.
    pub image_size: usize,
    /// Fixed at 4: background, RV, myocardium, LV.
    pub class_count: usize,
    pub slices_per_case: usize,
    pub lv_radius: (f32, f32),
    pub myo_thickness: (f32, f32),
    pub rv_width: (f32, f32),
    /// Angular extent of the RV crescent; the low end of 0 is allowed and
    /// produces a slice without RV.
    pub rv_extent_rad: (f32, f32),
    pub center_jitter: f32,
    /// Through-slice scaling applied across the slices of a case.
    pub slice_scale: (f32, f32),
    pub intensity_means: [f32; 4],
    pub noise_std: f32,
    pub gradient_amplitude: f32,
    /// Base seed for dataset-level operations; per-case seeds are derived
    /// from it by the dataset writer.
    pub seed: u64,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        Self {
            image_size: 128,
            class_count: 4,
            slices_per_case: 3,
            lv_radius: (10.0, 18.0),
            myo_thickness: (4.0, 8.0),
            rv_width: (5.0, 9.0),
            rv_extent_rad: (0.6, 1.3),
            center_jitter: 6.0,
            slice_scale: (0.85, 1.1),
            intensity_means: [0.20, 0.45, 0.30, 0.70],
            noise_std: 0.03,
            gradient_amplitude: 0.08,
            seed: 0,
        }
    }
}

impl PhantomConfig {
    /// Defaults with the geometry ranges rescaled from the 128 px reference
    /// to another image side, keeping the validated minimums.
    pub fn for_image_size(image_size: usize) -> Self {
        let s = image_size as f32 / 128.0;
        let base = Self::default();
        let scale = |(lo, hi): (f32, f32), min: f32| ((lo * s).max(min), (hi * s).max(min));
        Self {
            image_size,
            lv_radius: scale(base.lv_radius, 3.0),
            myo_thickness: scale(base.myo_thickness, 2.0),
            rv_width: scale(base.rv_width, 2.0),
            center_jitter: (base.center_jitter * s).max(1.0),
            ..base
        }
    }

    pub fn validate(&self) -> Result<(), PhantomError> {
        if self.class_count != 4 {
            return Err(PhantomError::InvalidConfig(
                "phantom supports exactly 4 classes".into(),
            ));
        }
        if self.image_size < 16 {
            return Err(PhantomError::InvalidConfig("image size below 16".into()));
        }
        if self.slices_per_case == 0 {
            return Err(PhantomError::InvalidConfig("need at least one slice".into()));
        }
        for (name, (lo, hi)) in [
            ("lv_radius", self.lv_radius),
            ("myo_thickness", self.myo_thickness),
            ("rv_width", self.rv_width),
            ("rv_extent_rad", self.rv_extent_rad),
            ("slice_scale", self.slice_scale),
        ] {
            if !(lo <= hi) || lo < 0.0 {
                return Err(PhantomError::InvalidConfig(format!(
                    "{name} range ({lo}, {hi}) is invalid"
                )));
            }
        }
        if self.lv_radius.0 < 3.0 {
            return Err(PhantomError::InvalidConfig(
                "LV radius below 3 px degenerates".into(),
            ));
        }
        if self.myo_thickness.0 < 2.0 {
            return Err(PhantomError::InvalidConfig(
                "myocardium thinner than 2 px degenerates".into(),
            ));
        }
        if self.noise_std < 0.0 || self.gradient_amplitude < 0.0 {
            return Err(PhantomError::InvalidConfig(
                "noise and gradient amplitudes must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

struct CaseGeometry {
    center: (f32, f32),
    lv_radius: f32,
    myo_thickness: f32,
    rv_width: f32,
    rv_extent: f32,
    rv_angle: f32,
    gradient_angle: f32,
}

const MARGIN: f32 = 2.0;
const MAX_ATTEMPTS: usize = 100;

fn sample_range<R: Rng>(rng: &mut R, (lo, hi): (f32, f32)) -> f32 {
    if lo < hi {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Generates the slices of one case. Deterministic in `(config, case_seed)`.
pub fn generate_case(
    config: &PhantomConfig,
    case_id: &str,
    case_seed: u64,
) -> Result<Vec<(ImageSlice, LabelMap)>, PhantomError> {
    config.validate()?;
    let mut rng = rng_from(derive_seed(case_seed, &["phantom", "geometry"], 0));
    let size = config.image_size as f32;
    let half = (size - 1.0) / 2.0;

    let mut geometry = None;
    for _ in 0..MAX_ATTEMPTS {
        let jm = sample_range(&mut rng, (-config.center_jitter, config.center_jitter));
        let jn = sample_range(&mut rng, (-config.center_jitter, config.center_jitter));
        let lv = sample_range(&mut rng, config.lv_radius);
        let myo = sample_range(&mut rng, config.myo_thickness);
        let rvw = sample_range(&mut rng, config.rv_width);
        let rve = sample_range(&mut rng, config.rv_extent_rad);
        let rva = sample_range(&mut rng, (-std::f32::consts::PI, std::f32::consts::PI));
        let ga = sample_range(&mut rng, (-std::f32::consts::PI, std::f32::consts::PI));

        let outer = (lv + myo + rvw) * config.slice_scale.1;
        let cm = half + jm;
        let cn = half + jn;
        let fits = cm - outer >= MARGIN
            && cn - outer >= MARGIN
            && cm + outer <= size - 1.0 - MARGIN
            && cn + outer <= size - 1.0 - MARGIN;
        if fits {
            geometry = Some(CaseGeometry {
                center: (cm, cn),
                lv_radius: lv,
                myo_thickness: myo,
                rv_width: rvw,
                rv_extent: rve,
                rv_angle: rva,
                gradient_angle: ga,
            });
            break;
        }
    }
    let geo = geometry.ok_or(PhantomError::DegenerateGeometry(MAX_ATTEMPTS))?;

    let mut slices = Vec::with_capacity(config.slices_per_case);
    for s in 0..config.slices_per_case {
        let scale = if config.slices_per_case == 1 {
            1.0
        } else {
            let t = s as f32 / (config.slices_per_case - 1) as f32;
            config.slice_scale.0 + t * (config.slice_scale.1 - config.slice_scale.0)
        };
        let noise_seed = derive_seed(case_seed, &["phantom", "noise"], s as u64);
        let (image, label) = render_slice(config, &geo, scale, case_id, s, noise_seed);
        slices.push((image, label));
    }
    Ok(slices)
}

fn render_slice(
    config: &PhantomConfig,
    geo: &CaseGeometry,
    scale: f32,
    case_id: &str,
    slice_index: usize,
    noise_seed: u64,
) -> (ImageSlice, LabelMap) {
    let size = config.image_size;
    let (cm, cn) = geo.center;
    let r_lv = geo.lv_radius * scale;
    let r_myo = (geo.lv_radius + geo.myo_thickness) * scale;
    let r_rv = (geo.lv_radius + geo.myo_thickness + geo.rv_width) * scale;
    let half_extent = geo.rv_extent / 2.0;

    let mut cls = Array2::<usize>::zeros((size, size));
    for m in 0..size {
        for n in 0..size {
            let dm = m as f32 - cm;
            let dn = n as f32 - cn;
            let r = (dm * dm + dn * dn).sqrt();
            let class = if r < r_lv {
                classes::LEFT_VENTRICLE
            } else if r < r_myo {
                classes::MYOCARDIUM
            } else if r < r_rv && half_extent > 0.0 {
                let phi = dn.atan2(dm);
                let mut delta = (phi - geo.rv_angle).abs();
                if delta > std::f32::consts::PI {
                    delta = 2.0 * std::f32::consts::PI - delta;
                }
                if delta <= half_extent {
                    classes::RIGHT_VENTRICLE
                } else {
                    classes::BACKGROUND
                }
            } else {
                classes::BACKGROUND
            };
            cls[[m, n]] = class;
        }
    }

    let mut rng = rng_from(noise_seed);
    let noise = if config.noise_std > 0.0 {
        Some(Normal::new(0.0f32, config.noise_std).expect("validated noise std"))
    } else {
        None
    };
    let (gsin, gcos) = geo.gradient_angle.sin_cos();
    let mut raw = Array3::<f32>::zeros((1, size, size));
    for m in 0..size {
        for n in 0..size {
            let mut v = config.intensity_means[cls[[m, n]]];
            if config.gradient_amplitude > 0.0 {
                let proj = (m as f32 * gcos + n as f32 * gsin) / size as f32;
                v += config.gradient_amplitude * proj;
            }
            if let Some(dist) = &noise {
                v += dist.sample(&mut rng);
            }
            raw[[0, m, n]] = v;
        }
    }

    let image = ImageSlice::normalized(case_id, slice_index, raw)
        .expect("phantom intensities are finite");
    let label =
        LabelMap::from_classes(&cls, config.class_count).expect("phantom classes are in range");
    (image, label)
}
