use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::Result;

/// One grayscale slice in `1 x M x N` layout with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSlice {
    pub case_id: String,
    pub slice_index: usize,
    data: Array3<f32>,
}

impl ImageSlice {
    /// Wraps an already normalized grid. Rejects non-finite values, a channel
    /// count other than 1, and intensities outside `[0, 1]`.
    pub fn new(case_id: impl Into<String>, slice_index: usize, data: Array3<f32>) -> Result<Self> {
        if data.shape()[0] != 1 {
            return Err(CoreError::ShapeMismatch {
                expected: "1 x M x N".into(),
                actual: format!("{:?}", data.shape()),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite("image slice".into()));
        }
        if data.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(CoreError::OutOfRange(
                "image intensities must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            case_id: case_id.into(),
            slice_index,
            data,
        })
    }

    /// Min-max normalizes a raw grid to `[0, 1]` per slice, then wraps it.
    /// A constant input maps to all zeros.
    pub fn normalized(
        case_id: impl Into<String>,
        slice_index: usize,
        raw: Array3<f32>,
    ) -> Result<Self> {
        if !raw.iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite("image slice before normalization".into()));
        }
        let min = raw.iter().cloned().fold(f32::INFINITY, f32::min);
        let max = raw.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
        let data = if max > min {
            let span = max - min;
            raw.mapv(|v| ((v - min) / span).clamp(0.0, 1.0))
        } else {
            Array3::zeros(raw.raw_dim())
        };
        Self::new(case_id, slice_index, data)
    }

    pub fn data(&self) -> &Array3<f32> {
        &self.data
    }

    pub fn height(&self) -> usize {
        self.data.shape()[1]
    }

    pub fn width(&self) -> usize {
        self.data.shape()[2]
    }
}

/// One-hot ground truth in `C x M x N` layout; entries are exactly 0 or 1 and
/// each pixel carries exactly one 1. `C >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMap {
    data: Array3<f32>,
}

impl LabelMap {
    pub fn new(data: Array3<f32>) -> Result<Self> {
        let c = data.shape()[0];
        if c < 2 {
            return Err(CoreError::NotOneHot(format!("need C >= 2 classes, got {c}")));
        }
        let (h, w) = (data.shape()[1], data.shape()[2]);
        for m in 0..h {
            for n in 0..w {
                let mut ones = 0usize;
                for ch in 0..c {
                    let v = data[[ch, m, n]];
                    if v == 1.0 {
                        ones += 1;
                    } else if v != 0.0 {
                        return Err(CoreError::NotOneHot(format!(
                            "entry {v} at ({ch},{m},{n}) is neither 0 nor 1"
                        )));
                    }
                }
                if ones != 1 {
                    return Err(CoreError::NotOneHot(format!(
                        "pixel ({m},{n}) has channel sum {ones}, expected 1"
                    )));
                }
            }
        }
        Ok(Self { data })
    }

    /// Builds a one-hot map from per-pixel class indices.
    pub fn from_classes(classes: &Array2<usize>, num_classes: usize) -> Result<Self> {
        let (h, w) = classes.dim();
        let mut data = Array3::zeros((num_classes, h, w));
        for m in 0..h {
            for n in 0..w {
                let cls = classes[[m, n]];
                if cls >= num_classes {
                    return Err(CoreError::NotOneHot(format!(
                        "class index {cls} exceeds C = {num_classes}"
                    )));
                }
                data[[cls, m, n]] = 1.0;
            }
        }
        Self::new(data)
    }

    pub fn data(&self) -> &Array3<f32> {
        &self.data
    }

    pub fn num_classes(&self) -> usize {
        self.data.shape()[0]
    }

    /// Per-pixel class index of the single hot channel.
    pub fn classes(&self) -> Array2<usize> {
        let (c, h, w) = self.data.dim();
        let mut out = Array2::zeros((h, w));
        for m in 0..h {
            for n in 0..w {
                for ch in 0..c {
                    if self.data[[ch, m, n]] == 1.0 {
                        out[[m, n]] = ch;
                        break;
                    }
                }
            }
        }
        out
    }
}

/// Raw per-pixel class scores in `C x M x N` layout; all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitMap {
    data: Array3<f32>,
}

impl LogitMap {
    pub fn new(data: Array3<f32>) -> Result<Self> {
        if !data.iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite("logit map".into()));
        }
        Ok(Self { data })
    }

    pub fn data(&self) -> &Array3<f32> {
        &self.data
    }

    pub fn num_classes(&self) -> usize {
        self.data.shape()[0]
    }
}

/// Channel-normalized probabilities; per-pixel channel sums lie within
/// `1e-6` of 1. Held in `f64` so temperature scaling and the metrics keep
/// enough headroom for exact argmax bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap {
    data: Array3<f64>,
}

impl ProbabilityMap {
    pub const SUM_TOLERANCE: f64 = 1e-6;

    pub fn new(data: Array3<f64>) -> Result<Self> {
        let (c, h, w) = data.dim();
        for m in 0..h {
            for n in 0..w {
                let mut sum = 0.0;
                for ch in 0..c {
                    let v = data[[ch, m, n]];
                    if !(0.0..=1.0).contains(&v) {
                        return Err(CoreError::OutOfRange(format!(
                            "probability {v} at ({ch},{m},{n})"
                        )));
                    }
                    sum += v;
                }
                if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
                    return Err(CoreError::OutOfRange(format!(
                        "pixel ({m},{n}) channel sum {sum} deviates from 1"
                    )));
                }
            }
        }
        Ok(Self { data })
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn num_classes(&self) -> usize {
        self.data.shape()[0]
    }

    /// Per-pixel probability of the highest-scored class.
    pub fn confidence(&self) -> Array2<f64> {
        let (c, h, w) = self.data.dim();
        let mut out = Array2::zeros((h, w));
        for m in 0..h {
            for n in 0..w {
                let mut best = self.data[[0, m, n]];
                for ch in 1..c {
                    let v = self.data[[ch, m, n]];
                    if v > best {
                        best = v;
                    }
                }
                out[[m, n]] = best;
            }
        }
        out
    }
}

/// Strictly positive per-pixel temperatures in `1 x M x N` layout. The single
/// channel is broadcast across classes when applied, which structurally pins
/// the temperature to be equal for all classes at a pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureMap {
    data: Array3<f64>,
}

impl TemperatureMap {
    pub fn new(data: Array3<f64>) -> Result<Self> {
        if data.shape()[0] != 1 {
            return Err(CoreError::ShapeMismatch {
                expected: "1 x M x N".into(),
                actual: format!("{:?}", data.shape()),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite("temperature map".into()));
        }
        if data.iter().any(|&v| v <= 0.0) {
            return Err(CoreError::OutOfRange(
                "temperature values must be strictly positive".into(),
            ));
        }
        Ok(Self { data })
    }

    /// Constant temperature map.
    pub fn constant(value: f64, height: usize, width: usize) -> Result<Self> {
        Self::new(Array3::from_elem((1, height, width), value))
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }
}

/// Role a split plays in the experiment protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRole {
    SegmentationTrain,
    CalibrationTrain,
    IntraDomainTest,
}

/// Pairwise-disjoint case-id lists. The validation split doubles as the
/// calibration training set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

impl DatasetSplit {
    pub fn new(train: Vec<String>, validation: Vec<String>, test: Vec<String>) -> Result<Self> {
        let split = Self {
            train,
            validation,
            test,
        };
        split.validate()?;
        Ok(split)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for id in self
            .train
            .iter()
            .chain(self.validation.iter())
            .chain(self.test.iter())
        {
            if !seen.insert(id.clone()) {
                return Err(CoreError::SplitOverlap(id.clone()));
            }
        }
        Ok(())
    }

    pub fn role_of(&self, case_id: &str) -> Option<SplitRole> {
        if self.train.iter().any(|c| c == case_id) {
            Some(SplitRole::SegmentationTrain)
        } else if self.validation.iter().any(|c| c == case_id) {
            Some(SplitRole::CalibrationTrain)
        } else if self.test.iter().any(|c| c == case_id) {
            Some(SplitRole::IntraDomainTest)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn image_slice_rejects_multichannel() {
        let data = Array3::<f32>::zeros((2, 4, 4));
        assert!(ImageSlice::new("c", 0, data).is_err());
    }

    #[test]
    fn image_slice_rejects_nan() {
        let mut data = Array3::<f32>::zeros((1, 2, 2));
        data[[0, 0, 0]] = f32::NAN;
        assert!(ImageSlice::new("c", 0, data).is_err());
    }

    #[test]
    fn normalization_maps_to_unit_range() {
        let raw = array![[[2.0_f32, 4.0], [6.0, 10.0]]];
        let s = ImageSlice::normalized("c", 0, raw).unwrap();
        assert_eq!(s.data()[[0, 0, 0]], 0.0);
        assert_eq!(s.data()[[0, 1, 1]], 1.0);
        assert_eq!(s.data()[[0, 0, 1]], 0.25);
    }

    #[test]
    fn normalization_of_constant_slice_is_zero() {
        let raw = Array3::from_elem((1, 3, 3), 7.5_f32);
        let s = ImageSlice::normalized("c", 0, raw).unwrap();
        assert!(s.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn label_map_accepts_one_hot() {
        let classes = array![[0usize, 1], [1, 0]];
        let y = LabelMap::from_classes(&classes, 2).unwrap();
        assert_eq!(y.classes(), classes);
    }

    #[test]
    fn label_map_rejects_fractional_entries() {
        let data = array![[[0.5_f32, 1.0]], [[0.5, 0.0]]];
        assert!(LabelMap::new(data).is_err());
    }

    #[test]
    fn label_map_rejects_double_hot() {
        let data = array![[[1.0_f32, 1.0]], [[1.0, 0.0]]];
        assert!(LabelMap::new(data).is_err());
    }

    #[test]
    fn label_map_rejects_single_class() {
        let data = Array3::from_elem((1, 2, 2), 1.0_f32);
        assert!(LabelMap::new(data).is_err());
    }

    #[test]
    fn probability_map_rejects_bad_sum() {
        let data = Array3::from_elem((2, 2, 2), 0.6_f64);
        assert!(ProbabilityMap::new(data).is_err());
    }

    #[test]
    fn temperature_map_rejects_nonpositive() {
        let mut data = Array3::from_elem((1, 2, 2), 1.0_f64);
        data[[0, 1, 1]] = 0.0;
        assert!(TemperatureMap::new(data).is_err());
    }

    #[test]
    fn split_rejects_overlap() {
        let r = DatasetSplit::new(
            vec!["a".into(), "b".into()],
            vec!["b".into()],
            vec!["c".into()],
        );
        assert!(r.is_err());
    }

    #[test]
    fn split_roles() {
        let s = DatasetSplit::new(vec!["a".into()], vec!["b".into()], vec!["c".into()]).unwrap();
        assert_eq!(s.role_of("a"), Some(SplitRole::SegmentationTrain));
        assert_eq!(s.role_of("b"), Some(SplitRole::CalibrationTrain));
        assert_eq!(s.role_of("c"), Some(SplitRole::IntraDomainTest));
        assert_eq!(s.role_of("d"), None);
    }
}
