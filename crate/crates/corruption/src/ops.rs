use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use calseg_core::seed::rng_from;
use calseg_core::ImageSlice;

use crate::fft::{dft2, idft2, magnitude_clipped, real_clipped, to_complex};

#[derive(Debug, Error)]
pub enum CorruptionError {
    #[error("invalid corruption parameters: {0}")]
    InvalidParams(String),
}

fn plane(x: &ImageSlice) -> Array2<f32> {
    x.data()
        .index_axis(ndarray::Axis(0), 0)
        .to_owned()
}

fn rewrap(x: &ImageSlice, plane: Array2<f32>) -> ImageSlice {
    let (h, w) = plane.dim();
    let mut data = Array3::zeros((1, h, w));
    data.index_axis_mut(ndarray::Axis(0), 0).assign(&plane);
    ImageSlice::new(x.case_id.clone(), x.slice_index, data)
        .expect("corruption outputs stay clipped and finite")
}

/// Multiplicative bias field `x * exp(P)` where `P` is a 2-D polynomial of
/// total degree <= `order` on coordinates scaled to `[-1, 1]`, with the given
/// coefficients in graded-lexicographic order `(i + j, i)`.
pub fn bias_field_with_coeffs(
    x: &ImageSlice,
    order: usize,
    coeffs: &[f32],
) -> Result<ImageSlice, CorruptionError> {
    let expected = num_bias_coeffs(order);
    if coeffs.len() != expected {
        return Err(CorruptionError::InvalidParams(format!(
            "order {order} needs {expected} coefficients, got {}",
            coeffs.len()
        )));
    }
    let src = plane(x);
    let (h, w) = src.dim();
    let mut out = Array2::<f32>::zeros((h, w));
    for m in 0..h {
        let mm = if h > 1 {
            2.0 * m as f64 / (h - 1) as f64 - 1.0
        } else {
            0.0
        };
        for n in 0..w {
            let nn = if w > 1 {
                2.0 * n as f64 / (w - 1) as f64 - 1.0
            } else {
                0.0
            };
            let mut p = 0.0f64;
            let mut idx = 0usize;
            for total in 0..=order {
                for i in 0..=total {
                    let j = total - i;
                    p += coeffs[idx] as f64 * mm.powi(i as i32) * nn.powi(j as i32);
                    idx += 1;
                }
            }
            out[[m, n]] = ((src[[m, n]] as f64) * p.exp()).clamp(0.0, 1.0) as f32;
        }
    }
    Ok(rewrap(x, out))
}

pub fn num_bias_coeffs(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Bias field with coefficients drawn uniformly from `coeff_range`.
pub fn apply_bias_field(
    x: &ImageSlice,
    order: usize,
    coeff_range: (f32, f32),
    seed: u64,
) -> Result<ImageSlice, CorruptionError> {
    if coeff_range.0 > coeff_range.1 {
        return Err(CorruptionError::InvalidParams(
            "empty coefficient range".into(),
        ));
    }
    let mut rng = rng_from(seed);
    let coeffs: Vec<f32> = (0..num_bias_coeffs(order))
        .map(|_| {
            if coeff_range.0 < coeff_range.1 {
                rng.gen_range(coeff_range.0..=coeff_range.1)
            } else {
                coeff_range.0
            }
        })
        .collect();
    bias_field_with_coeffs(x, order, &coeffs)
}

/// Axis along which k-space lines are indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PhaseAxis {
    Rows,
    Cols,
}

/// Ghosting: every k-space line with index not divisible by `num_ghosts`
/// along the phase-encoding axis is attenuated by `1 - intensity`.
pub fn apply_ghosting(
    x: &ImageSlice,
    num_ghosts: usize,
    axis: PhaseAxis,
    intensity: f32,
) -> Result<ImageSlice, CorruptionError> {
    if num_ghosts < 1 {
        return Err(CorruptionError::InvalidParams("num_ghosts must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&intensity) {
        return Err(CorruptionError::InvalidParams(format!(
            "ghost intensity {intensity} outside [0, 1]"
        )));
    }
    let src = plane(x);
    let (h, w) = src.dim();
    let axis_len = match axis {
        PhaseAxis::Rows => h,
        PhaseAxis::Cols => w,
    };
    if num_ghosts >= axis_len {
        return Err(CorruptionError::InvalidParams(format!(
            "num_ghosts {num_ghosts} must be below the axis length {axis_len}"
        )));
    }

    let mut k = dft2(&to_complex(&src));
    let keep = 1.0 - intensity as f64;
    match axis {
        PhaseAxis::Rows => {
            for m in 0..h {
                if m % num_ghosts != 0 {
                    for n in 0..w {
                        k[[m, n]] *= keep;
                    }
                }
            }
        }
        PhaseAxis::Cols => {
            for n in 0..w {
                if n % num_ghosts != 0 {
                    for m in 0..h {
                        k[[m, n]] *= keep;
                    }
                }
            }
        }
    }
    Ok(rewrap(x, real_clipped(&idft2(&k))))
}

/// Adds `intensity * max|K|` at one k-space bin; the DC bin is rejected.
pub fn apply_spike(
    x: &ImageSlice,
    spike_pos: (usize, usize),
    intensity: f32,
) -> Result<ImageSlice, CorruptionError> {
    let src = plane(x);
    let (h, w) = src.dim();
    let (u, v) = spike_pos;
    if u == 0 && v == 0 {
        return Err(CorruptionError::InvalidParams(
            "spike at the DC bin is rejected".into(),
        ));
    }
    if u >= h || v >= w {
        return Err(CorruptionError::InvalidParams(format!(
            "spike position ({u}, {v}) outside {h} x {w} spectrum"
        )));
    }
    let mut k = dft2(&to_complex(&src));
    let max_mag = k.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    k[[u, v]] += Complex64::new(intensity as f64 * max_mag, 0.0);
    Ok(rewrap(x, real_clipped(&idft2(&k))))
}

/// Motion: `num_movements` rigid copies of the image are synthesized and
/// k-space rows are partitioned into `num_movements + 1` contiguous time
/// segments, segment 0 from the original and segment j from copy j. The
/// output is the clipped magnitude of the inverse transform.
pub fn apply_motion(
    x: &ImageSlice,
    num_movements: usize,
    max_rot_deg: f32,
    max_shift_px: f32,
    seed: u64,
) -> Result<ImageSlice, CorruptionError> {
    if num_movements < 1 {
        return Err(CorruptionError::InvalidParams(
            "num_movements must be >= 1".into(),
        ));
    }
    if max_rot_deg < 0.0 || max_shift_px < 0.0 {
        return Err(CorruptionError::InvalidParams(
            "motion magnitudes must be non-negative".into(),
        ));
    }
    let src = plane(x);
    let (h, w) = src.dim();
    let mut rng = rng_from(seed);

    let mut spectra = Vec::with_capacity(num_movements + 1);
    spectra.push(dft2(&to_complex(&src)));
    for _ in 0..num_movements {
        let rot = if max_rot_deg > 0.0 {
            rng.gen_range(-max_rot_deg..=max_rot_deg)
        } else {
            0.0
        };
        let sm = if max_shift_px > 0.0 {
            rng.gen_range(-max_shift_px..=max_shift_px)
        } else {
            0.0
        };
        let sn = if max_shift_px > 0.0 {
            rng.gen_range(-max_shift_px..=max_shift_px)
        } else {
            0.0
        };
        let moved = rigid_warp(&src, rot, sm, sn);
        spectra.push(dft2(&to_complex(&moved)));
    }

    let segments = num_movements + 1;
    let mut k = Array2::from_elem((h, w), Complex64::default());
    for m in 0..h {
        let segment = (m * segments / h).min(segments - 1);
        for n in 0..w {
            k[[m, n]] = spectra[segment][[m, n]];
        }
    }
    Ok(rewrap(x, magnitude_clipped(&idft2(&k))))
}

/// Rotation about the image center followed by a shift, bilinear sampling
/// with zero fill outside.
pub(crate) fn rigid_warp(src: &Array2<f32>, rot_deg: f32, shift_m: f32, shift_n: f32) -> Array2<f32> {
    if rot_deg == 0.0 && shift_m == 0.0 && shift_n == 0.0 {
        return src.clone();
    }
    let (h, w) = src.dim();
    let cm = (h as f32 - 1.0) / 2.0;
    let cn = (w as f32 - 1.0) / 2.0;
    let theta = rot_deg.to_radians();
    let (sin, cos) = (theta.sin(), theta.cos());
    let mut out = Array2::<f32>::zeros((h, w));
    for m in 0..h {
        for n in 0..w {
            let dm = m as f32 - cm - shift_m;
            let dn = n as f32 - cn - shift_n;
            let sm = cos * dm + sin * dn + cm;
            let sn = -sin * dm + cos * dn + cn;
            out[[m, n]] = bilinear(src, sm, sn);
        }
    }
    out
}

fn bilinear(data: &Array2<f32>, m: f32, n: f32) -> f32 {
    let (h, w) = data.dim();
    let m0 = m.floor();
    let n0 = n.floor();
    let fm = m - m0;
    let fn_ = n - n0;
    let mut acc = 0.0f32;
    for (di, wm) in [(0isize, 1.0 - fm), (1, fm)] {
        for (dj, wn) in [(0isize, 1.0 - fn_), (1, fn_)] {
            let weight = wm * wn;
            if weight == 0.0 {
                continue;
            }
            let mm = m0 as isize + di;
            let nn = n0 as isize + dj;
            if mm >= 0 && (mm as usize) < h && nn >= 0 && (nn as usize) < w {
                acc += weight * data[[mm as usize, nn as usize]];
            }
        }
    }
    acc
}
