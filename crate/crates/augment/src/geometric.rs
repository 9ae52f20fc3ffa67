use ndarray::{Array2, Array3};
use rand_distr::{Distribution, Normal};

use calseg_core::seed::rng_from;
use calseg_core::{ImageSlice, LabelMap};

use crate::policy::{ElasticConfig, GeometricParams};

/// Applies the identical spatial warp to an image/label pair: bilinear
/// sampling for the image, nearest-neighbor for the label, so the label stays
/// one-hot. Out-of-range source coordinates map to intensity 0 / class 0.
pub fn apply_geometric(
    x: &ImageSlice,
    y: &LabelMap,
    params: &GeometricParams,
) -> (ImageSlice, LabelMap) {
    if params.is_identity() {
        return (x.clone(), y.clone());
    }
    let (h, w) = (x.height(), x.width());
    let classes = y.classes();
    let num_classes = y.num_classes();

    let displacement = params
        .elastic
        .as_ref()
        .filter(|e| e.displacement_std > 0.0)
        .map(|e| elastic_field(h, w, e, params.elastic_seed));

    let cm = (h as f32 - 1.0) / 2.0;
    let cn = (w as f32 - 1.0) / 2.0;
    let theta = params.rotation_deg.to_radians();
    let (sin, cos) = (theta.sin(), theta.cos());
    let inv_scale = 1.0 / params.scale;
    let (tm, tn) = params.translation_px;

    let mut img = Array3::<f32>::zeros((1, h, w));
    let mut cls = Array2::<usize>::zeros((h, w));
    for m in 0..h {
        for n in 0..w {
            // Inverse map: undo translation, then rotation and scale about
            // the image center.
            let dm = m as f32 - cm - tm;
            let dn = n as f32 - cn - tn;
            let mut sm = (cos * dm + sin * dn) * inv_scale + cm;
            let mut sn = (-sin * dm + cos * dn) * inv_scale + cn;
            if let Some(field) = &displacement {
                sm += field[[0, m, n]];
                sn += field[[1, m, n]];
            }
            img[[0, m, n]] = bilinear(x.data(), sm, sn);
            cls[[m, n]] = nearest_class(&classes, sm, sn);
        }
    }

    let image = ImageSlice::new(x.case_id.clone(), x.slice_index, img)
        .expect("warped image stays in range");
    let label = LabelMap::from_classes(&cls, num_classes).expect("warped label stays one-hot");
    (image, label)
}

fn bilinear(data: &Array3<f32>, m: f32, n: f32) -> f32 {
    let h = data.shape()[1] as isize;
    let w = data.shape()[2] as isize;
    let m0 = m.floor();
    let n0 = n.floor();
    let fm = m - m0;
    let fn_ = n - n0;
    let mut acc = 0.0f32;
    for (di, wm) in [(0isize, 1.0 - fm), (1, fm)] {
        for (dj, wn) in [(0isize, 1.0 - fn_), (1, fn_)] {
            let mm = m0 as isize + di;
            let nn = n0 as isize + dj;
            let weight = wm * wn;
            if weight == 0.0 {
                continue;
            }
            if mm >= 0 && mm < h && nn >= 0 && nn < w {
                acc += weight * data[[0, mm as usize, nn as usize]];
            }
        }
    }
    acc.clamp(0.0, 1.0)
}

fn nearest_class(classes: &Array2<usize>, m: f32, n: f32) -> usize {
    let h = classes.nrows() as isize;
    let w = classes.ncols() as isize;
    let mm = m.round() as isize;
    let nn = n.round() as isize;
    if mm >= 0 && mm < h && nn >= 0 && nn < w {
        classes[[mm as usize, nn as usize]]
    } else {
        0
    }
}

/// Random displacement field: Gaussian draws on a coarse grid, bilinearly
/// upsampled to pixel resolution. Channel 0 shifts rows, channel 1 columns.
fn elastic_field(h: usize, w: usize, cfg: &ElasticConfig, seed: u64) -> Array3<f32> {
    let gh = h.div_ceil(cfg.grid_spacing) + 1;
    let gw = w.div_ceil(cfg.grid_spacing) + 1;
    let mut rng = rng_from(seed);
    let normal = Normal::new(0.0f32, cfg.displacement_std).expect("validated std");
    let coarse = Array3::<f32>::from_shape_fn((2, gh, gw), |_| normal.sample(&mut rng));

    let mut field = Array3::<f32>::zeros((2, h, w));
    let step = cfg.grid_spacing as f32;
    for ch in 0..2 {
        for m in 0..h {
            for n in 0..w {
                let gm = m as f32 / step;
                let gn = n as f32 / step;
                let m0 = gm.floor() as usize;
                let n0 = gn.floor() as usize;
                let fm = gm - m0 as f32;
                let fn_ = gn - n0 as f32;
                let m1 = (m0 + 1).min(gh - 1);
                let n1 = (n0 + 1).min(gw - 1);
                field[[ch, m, n]] = coarse[[ch, m0, n0]] * (1.0 - fm) * (1.0 - fn_)
                    + coarse[[ch, m1, n0]] * fm * (1.0 - fn_)
                    + coarse[[ch, m0, n1]] * (1.0 - fm) * fn_
                    + coarse[[ch, m1, n1]] * fm * fn_;
            }
        }
    }
    field
}
