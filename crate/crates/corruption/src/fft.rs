//! 2-D DFT helpers on `f64` complex grids. Forward transforms are
//! unnormalized; the inverse carries the `1/(MN)` factor, so
//! `idft2(dft2(x)) == x` up to rounding.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

pub fn dft2(input: &Array2<Complex64>) -> Array2<Complex64> {
    transform(input, false)
}

pub fn idft2(input: &Array2<Complex64>) -> Array2<Complex64> {
    let (h, w) = input.dim();
    let mut out = transform(input, true);
    let norm = 1.0 / (h * w) as f64;
    out.mapv_inplace(|v| v * norm);
    out
}

fn transform(input: &Array2<Complex64>, inverse: bool) -> Array2<Complex64> {
    let (h, w) = input.dim();
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(w)
    } else {
        planner.plan_fft_forward(w)
    };
    let col_fft = if inverse {
        planner.plan_fft_inverse(h)
    } else {
        planner.plan_fft_forward(h)
    };

    let mut data = input.clone();
    for mut row in data.rows_mut() {
        let slice = row.as_slice_mut().expect("rows are contiguous");
        row_fft.process(slice);
    }
    let mut col = vec![Complex64::default(); h];
    for n in 0..w {
        for m in 0..h {
            col[m] = data[[m, n]];
        }
        col_fft.process(&mut col);
        for m in 0..h {
            data[[m, n]] = col[m];
        }
    }
    data
}

/// Lifts a real plane into the complex domain.
pub fn to_complex(plane: &Array2<f32>) -> Array2<Complex64> {
    plane.mapv(|v| Complex64::new(v as f64, 0.0))
}

/// Real part of an inverse transform, clipped to `[0, 1]` and cast to `f32`.
pub fn real_clipped(plane: &Array2<Complex64>) -> Array2<f32> {
    plane.mapv(|v| v.re.clamp(0.0, 1.0) as f32)
}

/// Magnitude of an inverse transform, clipped to `[0, 1]` and cast to `f32`.
pub fn magnitude_clipped(plane: &Array2<Complex64>) -> Array2<f32> {
    plane.mapv(|v| v.norm().clamp(0.0, 1.0) as f32)
}
