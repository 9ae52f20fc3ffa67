use ndarray::Array3;
use rand_distr::{Distribution, Normal};

use calseg_core::seed::rng_from;
use calseg_core::ImageSlice;

use crate::policy::AugParams;

/// Photometric pipeline: contrast about the slice mean, brightness shift,
/// gamma on the clipped value, additive Gaussian noise, final clip to [0, 1].
/// Identity parameters pass the input through bit-exactly.
pub fn apply_photometric(x: &ImageSlice, params: &AugParams) -> ImageSlice {
    let mut data: Array3<f32> = x.data().clone();

    if params.contrast != 1.0 {
        let mean = {
            let sum: f64 = data.iter().map(|&v| v as f64).sum();
            (sum / data.len() as f64) as f32
        };
        data.mapv_inplace(|v| (v - mean) * params.contrast + mean);
    }
    if params.brightness != 0.0 {
        data.mapv_inplace(|v| v + params.brightness);
    }
    // Gamma acts on the clipped value; inputs are already in [0, 1], so this
    // clip is a no-op on the identity path.
    data.mapv_inplace(|v| v.clamp(0.0, 1.0));
    if params.gamma != 1.0 {
        data.mapv_inplace(|v| v.powf(params.gamma));
    }
    if params.noise_std > 0.0 {
        let mut rng = rng_from(params.noise_seed);
        let normal = Normal::new(0.0f32, params.noise_std).expect("validated noise std");
        for v in data.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    data.mapv_inplace(|v| v.clamp(0.0, 1.0));

    ImageSlice::new(x.case_id.clone(), x.slice_index, data)
        .expect("photometric output is clipped and finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array3;

    fn slice(data: Array3<f32>) -> ImageSlice {
        ImageSlice::new("case", 0, data).unwrap()
    }

    #[test]
    fn identity_params_pass_through_exactly() {
        let x = slice(Array3::from_shape_fn((1, 5, 5), |(_, m, n)| {
            (m as f32 * 5.0 + n as f32) / 25.0
        }));
        let y = apply_photometric(&x, &AugParams::identity());
        assert_eq!(x.data(), y.data());
    }

    #[test]
    fn brightness_shifts_interior_values() {
        let x = slice(Array3::from_elem((1, 4, 4), 0.5f32));
        let params = AugParams {
            brightness: 0.1,
            ..AugParams::identity()
        };
        let y = apply_photometric(&x, &params);
        for &v in y.data().iter() {
            assert!((v - 0.6).abs() < 1e-7);
        }
    }

    #[test]
    fn gamma_two_squares_a_constant_half() {
        let x = slice(Array3::from_elem((1, 3, 3), 0.5f32));
        let params = AugParams {
            gamma: 2.0,
            ..AugParams::identity()
        };
        let y = apply_photometric(&x, &params);
        for &v in y.data().iter() {
            assert_eq!(v, 0.25);
        }
    }

    #[test]
    fn contrast_scales_about_the_mean() {
        let x = slice(Array3::from_shape_vec((1, 1, 2), vec![0.25f32, 0.75]).unwrap());
        let params = AugParams {
            contrast: 1.2,
            ..AugParams::identity()
        };
        let y = apply_photometric(&x, &params);
        // mean 0.5: 0.25 -> 0.5 - 0.3; 0.75 -> 0.5 + 0.3
        assert!((y.data()[[0, 0, 0]] - 0.2).abs() < 1e-6);
        assert!((y.data()[[0, 0, 1]] - 0.8).abs() < 1e-6);
    }

    #[test]
    fn noise_is_deterministic_given_params() {
        let x = slice(Array3::from_elem((1, 8, 8), 0.5f32));
        let params = AugParams {
            noise_std: 0.05,
            noise_seed: 99,
            ..AugParams::identity()
        };
        let a = apply_photometric(&x, &params);
        let b = apply_photometric(&x, &params);
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn output_stays_in_unit_range() {
        let x = slice(Array3::from_elem((1, 6, 6), 0.95f32));
        let params = AugParams {
            brightness: 0.1,
            noise_std: 0.2,
            noise_seed: 3,
            ..AugParams::identity()
        };
        let y = apply_photometric(&x, &params);
        assert!(y.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
