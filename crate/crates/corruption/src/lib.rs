//! Out-of-domain test-set synthesis: the four MRI artifact families applied
//! only at test time. Corruptions never appear in any augmentation policy.
//!
//! Every corruption maps `[0, 1]` images to `[0, 1]` images of the same
//! shape. Severity presets (mild/moderate/severe) make suites reproducible;
//! the per-slice parameter draws derive from the spec seed plus the slice
//! identity.

pub mod fft;
mod ops;

use rand::Rng;
use serde::{Deserialize, Serialize};

use calseg_core::seed::{derive_seed, rng_from};
use calseg_core::ImageSlice;

pub use ops::{
    apply_bias_field, apply_ghosting, apply_motion, apply_spike, bias_field_with_coeffs,
    num_bias_coeffs, CorruptionError, PhaseAxis,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    /// Exact passthrough for control runs.
    Identity,
    BiasField,
    Motion,
    Ghosting,
    Spike,
}

impl CorruptionKind {
    pub fn name(&self) -> &'static str {
        match self {
            CorruptionKind::Identity => "identity",
            CorruptionKind::BiasField => "bias_field",
            CorruptionKind::Motion => "motion",
            CorruptionKind::Ghosting => "ghosting",
            CorruptionKind::Spike => "spike",
        }
    }

    /// The four artifact families, excluding the identity control.
    pub fn artifact_kinds() -> [CorruptionKind; 4] {
        [
            CorruptionKind::BiasField,
            CorruptionKind::Motion,
            CorruptionKind::Ghosting,
            CorruptionKind::Spike,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Mild,
    Moderate,
    Severe,
}

impl Severity {
    pub fn name(&self) -> &'static str {
        match self {
            Severity::Mild => "mild",
            Severity::Moderate => "moderate",
            Severity::Severe => "severe",
        }
    }
}

/// One corruption recipe: kind, severity preset and base seed. Applying the
/// same spec to the same slice is deterministic; different slices draw
/// different per-slice parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub severity: Severity,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind, severity: Severity, seed: u64) -> Self {
        Self {
            kind,
            severity,
            seed,
        }
    }

    /// Tag used for corrupted copies on disk, e.g. `ghosting_moderate`.
    pub fn tag(&self) -> String {
        format!("{}_{}", self.kind.name(), self.severity.name())
    }

    /// Applies the corruption to one slice. The per-slice seed derives from
    /// the spec seed, the kind and the slice identity.
    pub fn apply(&self, x: &ImageSlice) -> Result<ImageSlice, CorruptionError> {
        let slice_seed = derive_seed(
            self.seed,
            &["corrupt", self.kind.name(), &x.case_id],
            x.slice_index as u64,
        );
        match self.kind {
            CorruptionKind::Identity => Ok(x.clone()),
            CorruptionKind::BiasField => {
                let amp = match self.severity {
                    Severity::Mild => 0.35,
                    Severity::Moderate => 0.6,
                    Severity::Severe => 0.9,
                };
                apply_bias_field(x, 3, (-amp, amp), slice_seed)
            }
            CorruptionKind::Motion => {
                let (movements, rot, shift) = match self.severity {
                    Severity::Mild => (2, 4.0, 3.0),
                    Severity::Moderate => (3, 8.0, 6.0),
                    Severity::Severe => (4, 12.0, 10.0),
                };
                apply_motion(x, movements, rot, shift, slice_seed)
            }
            CorruptionKind::Ghosting => {
                let intensity = match self.severity {
                    Severity::Mild => 0.35,
                    Severity::Moderate => 0.55,
                    Severity::Severe => 0.8,
                };
                let axis = if rng_from(slice_seed).gen_bool(0.5) {
                    PhaseAxis::Rows
                } else {
                    PhaseAxis::Cols
                };
                apply_ghosting(x, 4, axis, intensity)
            }
            CorruptionKind::Spike => {
                let intensity = match self.severity {
                    Severity::Mild => 0.1,
                    Severity::Moderate => 0.2,
                    Severity::Severe => 0.35,
                };
                let (h, w) = (x.height(), x.width());
                let mut rng = rng_from(slice_seed);
                // Mid-band frequencies produce visible stripes.
                let u = rng.gen_range(h / 16..h / 4).max(1);
                let v = rng.gen_range(w / 16..w / 4).max(1);
                apply_spike(x, (u, v), intensity)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{Array2, Array3};
    use num_complex::Complex64;

    fn slice_from_plane(plane: &Array2<f32>) -> ImageSlice {
        let (h, w) = plane.dim();
        let mut data = Array3::zeros((1, h, w));
        data.index_axis_mut(ndarray::Axis(0), 0).assign(plane);
        ImageSlice::new("case", 0, data).unwrap()
    }

    fn constant_slice(h: usize, w: usize, value: f32) -> ImageSlice {
        slice_from_plane(&Array2::from_elem((h, w), value))
    }

    fn checkered(h: usize, w: usize) -> ImageSlice {
        slice_from_plane(&Array2::from_shape_fn((h, w), |(m, n)| {
            ((m * 5 + n * 3) % 11) as f32 / 11.0
        }))
    }

    /// Naive O(N^4) DFT used as an oracle, independent of rustfft.
    fn naive_dft2(plane: &Array2<f32>) -> Array2<Complex64> {
        let (h, w) = plane.dim();
        let mut out = Array2::from_elem((h, w), Complex64::default());
        for km in 0..h {
            for kn in 0..w {
                let mut acc = Complex64::default();
                for m in 0..h {
                    for n in 0..w {
                        let phase = -2.0 * std::f64::consts::PI
                            * (km as f64 * m as f64 / h as f64
                                + kn as f64 * n as f64 / w as f64);
                        acc += Complex64::from_polar(plane[[m, n]] as f64, phase);
                    }
                }
                out[[km, kn]] = acc;
            }
        }
        out
    }

    fn out_plane(x: &ImageSlice) -> Array2<f32> {
        x.data().index_axis(ndarray::Axis(0), 0).to_owned()
    }

    // ----- bias field -----

    #[test]
    fn zero_coefficients_leave_the_image_unchanged() {
        let x = checkered(16, 16);
        let coeffs = vec![0.0; num_bias_coeffs(3)];
        let y = bias_field_with_coeffs(&x, 3, &coeffs).unwrap();
        assert_eq!(x.data(), y.data());
    }

    #[test]
    fn constant_coefficient_scales_by_its_exponential() {
        let x = checkered(12, 12);
        let c0 = 0.3f32;
        let mut coeffs = vec![0.0; num_bias_coeffs(3)];
        coeffs[0] = c0;
        let y = bias_field_with_coeffs(&x, 3, &coeffs).unwrap();
        let factor = (c0 as f64).exp();
        for (a, b) in x.data().iter().zip(y.data().iter()) {
            let expected = ((*a as f64) * factor).clamp(0.0, 1.0) as f32;
            assert!((b - expected).abs() <= 1e-6, "{b} vs {expected}");
        }
    }

    #[test]
    fn random_bias_field_stays_positive_before_clipping() {
        // exp(P) > 0, so zero pixels stay zero and nonzero pixels stay
        // nonzero before the clip; after clipping everything is in range.
        let x = checkered(16, 16);
        let y = apply_bias_field(&x, 3, (-0.5, 0.5), 123).unwrap();
        for (a, b) in x.data().iter().zip(y.data().iter()) {
            if *a > 0.0 {
                assert!(*b > 0.0);
            } else {
                assert_eq!(*b, 0.0);
            }
        }
    }

    // ----- ghosting -----

    #[test]
    fn zero_intensity_ghosting_is_identity_within_fft_rounding() {
        let x = checkered(16, 16);
        let y = apply_ghosting(&x, 4, PhaseAxis::Rows, 0.0).unwrap();
        for (a, b) in x.data().iter().zip(y.data().iter()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn ghost_count_must_stay_below_the_axis_length() {
        let x = checkered(8, 8);
        assert!(apply_ghosting(&x, 8, PhaseAxis::Rows, 0.5).is_err());
        assert!(apply_ghosting(&x, 0, PhaseAxis::Rows, 0.5).is_err());
    }

    #[test]
    fn centered_impulse_with_full_suppression_produces_replicas_at_period_over_g() {
        // Keeping every 4th k-line turns an impulse into 4 replicas with
        // spatial period M/4 along the phase axis.
        let (h, w) = (32, 32);
        let mut plane = Array2::<f32>::zeros((h, w));
        plane[[h / 2, w / 2]] = 1.0;
        let x = slice_from_plane(&plane);
        let y = apply_ghosting(&x, 4, PhaseAxis::Rows, 1.0).unwrap();
        let out = out_plane(&y);

        // Expected replica positions: rows (16 + k*8) mod 32, column 16.
        let mut peaks: Vec<(usize, usize)> = Vec::new();
        for m in 0..h {
            for n in 0..w {
                if out[[m, n]] > 0.1 {
                    peaks.push((m, n));
                }
            }
        }
        assert_eq!(peaks.len(), 4, "expected 4 replicas, got {peaks:?}");
        for (m, n) in peaks {
            assert_eq!(n, w / 2);
            let offset = (m + h - h / 2) % (h / 4);
            let dist = offset.min(h / 4 - offset);
            assert!(dist <= 1, "replica row {m} off-grid");
        }
    }

    #[test]
    fn constant_images_are_invariant_under_ghosting() {
        // A constant image has all spectral energy in the DC line, which is
        // always kept (0 mod g == 0).
        let x = constant_slice(16, 16, 0.42);
        for g in [2usize, 3, 5] {
            for s in [0.3f32, 1.0] {
                let y = apply_ghosting(&x, g, PhaseAxis::Cols, s).unwrap();
                for (a, b) in x.data().iter().zip(y.data().iter()) {
                    assert!((a - b).abs() < 1e-6);
                }
            }
        }
    }

    // ----- spike -----

    #[test]
    fn zero_intensity_spike_is_identity_within_fft_rounding() {
        let x = checkered(16, 16);
        let y = apply_spike(&x, (3, 5), 0.0).unwrap();
        for (a, b) in x.data().iter().zip(y.data().iter()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn dc_spike_position_is_rejected() {
        let x = checkered(8, 8);
        assert!(apply_spike(&x, (0, 0), 0.5).is_err());
    }

    #[test]
    fn spike_on_a_constant_image_concentrates_energy_at_the_spike_bin() {
        // Constant 0.4 with intensity 0.5 keeps the sinusoid inside [0, 1],
        // so no clipping harmonics appear. The dominant non-DC bins of the
        // output must be the spike bin and its Hermitian mirror.
        let (h, w) = (32, 32);
        let u = 5usize;
        let x = constant_slice(h, w, 0.4);
        let y = apply_spike(&x, (u, 0), 0.5).unwrap();
        let out = out_plane(&y);

        let spectrum = naive_dft2(&out);
        let mut best = (0usize, 0usize);
        let mut best_mag = f64::NEG_INFINITY;
        for m in 0..h {
            for n in 0..w {
                if m == 0 && n == 0 {
                    continue;
                }
                let mag = spectrum[[m, n]].norm();
                if mag > best_mag {
                    best_mag = mag;
                    best = (m, n);
                }
            }
        }
        assert!(
            best == (u, 0) || best == (h - u, 0),
            "dominant bin {best:?} is not the spike bin"
        );
        // Stripes along rows: spatial frequency u/M cycles per pixel means
        // values repeat every M/u rows; check periodicity along columns.
        for m in 0..h {
            for n in 1..w {
                assert!((out[[m, n]] - out[[m, 0]]).abs() < 1e-6);
            }
        }
    }

    // ----- motion -----

    #[test]
    fn zero_motion_is_identity_within_tolerance() {
        let x = checkered(16, 16);
        let y = apply_motion(&x, 3, 0.0, 0.0, 9).unwrap();
        for (a, b) in x.data().iter().zip(y.data().iter()) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn motion_is_deterministic_for_a_fixed_seed() {
        let x = checkered(24, 24);
        let a = apply_motion(&x, 2, 8.0, 4.0, 77).unwrap();
        let b = apply_motion(&x, 2, 8.0, 4.0, 77).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn single_integer_shift_composition_matches_the_oracle() {
        // A centered blob shifted by integer pixels equals a circular shift
        // as long as nothing crosses the border. The oracle composes the
        // segmented spectrum from naive DFTs of the original and the
        // circularly shifted copy.
        let (h, w) = (16, 16);
        let mut plane = Array2::<f32>::zeros((h, w));
        for m in 6..10 {
            for n in 6..10 {
                plane[[m, n]] = 0.8;
            }
        }
        let x = slice_from_plane(&plane);
        let (sm, sn) = (2i64, 1i64);

        // Implementation under test: one movement, deterministic transform
        // injected by calling the internal warp through a crafted seed is not
        // possible, so compose the expected output with the same segment
        // rule and compare against a manual segment fill using naive DFTs.
        let mut shifted = Array2::<f32>::zeros((h, w));
        for m in 0..h {
            for n in 0..w {
                let src_m = (m as i64 - sm).rem_euclid(h as i64) as usize;
                let src_n = (n as i64 - sn).rem_euclid(w as i64) as usize;
                shifted[[m, n]] = plane[[src_m, src_n]];
            }
        }
        let k_orig = naive_dft2(&plane);
        let k_shift = naive_dft2(&shifted);
        let mut k = Array2::from_elem((h, w), Complex64::default());
        for m in 0..h {
            let seg = (m * 2 / h).min(1);
            for n in 0..w {
                k[[m, n]] = if seg == 0 { k_orig[[m, n]] } else { k_shift[[m, n]] };
            }
        }
        let expected = crate::fft::magnitude_clipped(&crate::fft::idft2(&k));

        // Reference composition through the implementation's building blocks
        // with the same bilinear warp (integer shifts are exact samples).
        let moved = crate::ops::rigid_warp(&plane, 0.0, sm as f32, sn as f32);
        let k2_orig = crate::fft::dft2(&crate::fft::to_complex(&plane));
        let k2_shift = crate::fft::dft2(&crate::fft::to_complex(&moved));
        let mut k2 = Array2::from_elem((h, w), Complex64::default());
        for m in 0..h {
            let seg = (m * 2 / h).min(1);
            for n in 0..w {
                k2[[m, n]] = if seg == 0 { k2_orig[[m, n]] } else { k2_shift[[m, n]] };
            }
        }
        let actual = crate::fft::magnitude_clipped(&crate::fft::idft2(&k2));

        for (a, b) in actual.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }

    // ----- spec-level dispatch -----

    #[test]
    fn identity_kind_is_an_exact_passthrough() {
        let x = checkered(16, 16);
        let spec = CorruptionSpec::new(CorruptionKind::Identity, Severity::Moderate, 5);
        let y = spec.apply(&x).unwrap();
        assert_eq!(x.data(), y.data());
    }

    #[test]
    fn every_kind_preserves_range_shape_and_finiteness() {
        let x = checkered(32, 32);
        for kind in CorruptionKind::artifact_kinds() {
            for severity in [Severity::Mild, Severity::Moderate, Severity::Severe] {
                let spec = CorruptionSpec::new(kind, severity, 11);
                let y = spec.apply(&x).unwrap();
                assert_eq!(y.data().shape(), x.data().shape());
                assert!(
                    y.data().iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)),
                    "{kind:?} {severity:?} broke the range contract"
                );
            }
        }
    }

    #[test]
    fn spec_application_is_deterministic_per_slice() {
        let x = checkered(32, 32);
        let spec = CorruptionSpec::new(CorruptionKind::Motion, Severity::Moderate, 3);
        let a = spec.apply(&x).unwrap();
        let b = spec.apply(&x).unwrap();
        assert_eq!(a.data(), b.data());
    }
}
