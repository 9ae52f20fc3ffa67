use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use calseg_core::io::{slice_dir, write_tensor3};
use calseg_core::seed::derive_seed;
use calseg_core::{DatasetSplit, ImageSlice, LabelMap};

use crate::generate::{generate_case, PhantomConfig, PhantomError};
use crate::split::make_splits;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseEntry {
    pub case_id: String,
    pub slices: usize,
}

/// Dataset root manifest: lists cases, the split and the generator config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub image_size: usize,
    pub class_count: usize,
    pub cases: Vec<CaseEntry>,
    pub split: DatasetSplit,
    pub phantom: PhantomConfig,
}

impl DatasetManifest {
    pub fn load(root: &Path) -> Result<Self, PhantomError> {
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path)
            .map_err(|e| PhantomError::InvalidConfig(format!("manifest read: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| PhantomError::InvalidConfig(format!("manifest parse: {e}")))
    }

    pub fn save(&self, root: &Path) -> Result<(), PhantomError> {
        let path = root.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| PhantomError::InvalidConfig(format!("manifest encode: {e}")))?;
        fs::write(&path, text)
            .map_err(|e| PhantomError::InvalidConfig(format!("manifest write: {e}")))
    }
}

/// Writes one slice pair into the case layout.
pub fn write_slice_pair(
    root: &Path,
    case_id: &str,
    slice_index: usize,
    image: &ImageSlice,
    label: &LabelMap,
) -> Result<(), PhantomError> {
    let img_dir = slice_dir(root, case_id, "image", slice_index);
    let lbl_dir = slice_dir(root, case_id, "label", slice_index);
    write_tensor3(&img_dir, image.data())
        .and_then(|_| write_tensor3(&lbl_dir, label.data()))
        .map_err(|e| PhantomError::InvalidConfig(format!("slice write: {e}")))
}

/// Generates `num_cases` cases, writes them in the core tensor layout under
/// `root`, splits them by `ratios`, and saves `manifest.json`.
pub fn write_dataset(
    root: &Path,
    config: &PhantomConfig,
    num_cases: usize,
    ratios: (f64, f64, f64),
) -> Result<DatasetManifest, PhantomError> {
    config.validate()?;
    fs::create_dir_all(root)
        .map_err(|e| PhantomError::InvalidConfig(format!("dataset dir: {e}")))?;

    let mut cases = Vec::with_capacity(num_cases);
    for idx in 0..num_cases {
        let case_id = format!("case_{idx:03}");
        let case_seed = derive_seed(config.seed, &["phantom", "case"], idx as u64);
        let slices = generate_case(config, &case_id, case_seed)?;
        for (s, (image, label)) in slices.iter().enumerate() {
            write_slice_pair(root, &case_id, s, image, label)?;
        }
        cases.push(CaseEntry {
            case_id,
            slices: slices.len(),
        });
    }

    let ids: Vec<String> = cases.iter().map(|c| c.case_id.clone()).collect();
    let split = make_splits(&ids, ratios, derive_seed(config.seed, &["phantom", "split"], 0))?;

    let manifest = DatasetManifest {
        image_size: config.image_size,
        class_count: config.class_count,
        cases,
        split,
        phantom: config.clone(),
    };
    manifest.save(root)?;
    Ok(manifest)
}

/// Reads one slice pair back from the case layout.
pub fn read_slice_pair(
    root: &Path,
    case_id: &str,
    slice_index: usize,
) -> Result<(ImageSlice, LabelMap), PhantomError> {
    let img = calseg_core::io::read_tensor3_strict(&slice_dir(root, case_id, "image", slice_index))
        .map_err(|e| PhantomError::InvalidConfig(format!("image read: {e}")))?;
    let lbl = calseg_core::io::read_tensor3_strict(&slice_dir(root, case_id, "label", slice_index))
        .map_err(|e| PhantomError::InvalidConfig(format!("label read: {e}")))?;
    let image = ImageSlice::new(case_id, slice_index, img)
        .map_err(|e| PhantomError::InvalidConfig(format!("image validate: {e}")))?;
    let label = LabelMap::new(lbl)
        .map_err(|e| PhantomError::InvalidConfig(format!("label validate: {e}")))?;
    Ok((image, label))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let config = PhantomConfig {
            slices_per_case: 2,
            seed: 5,
            ..PhantomConfig::for_image_size(32)
        };
        let manifest = write_dataset(dir.path(), &config, 5, (0.6, 0.2, 0.2)).unwrap();
        assert_eq!(manifest.cases.len(), 5);
        assert_eq!(
            manifest.split.train.len() + manifest.split.validation.len()
                + manifest.split.test.len(),
            5
        );

        let reloaded = DatasetManifest::load(dir.path()).unwrap();
        assert_eq!(manifest, reloaded);

        let (image, label) = read_slice_pair(dir.path(), "case_000", 0).unwrap();
        let case_seed = derive_seed(5, &["phantom", "case"], 0);
        let regenerated = generate_case(&config, "case_000", case_seed).unwrap();
        assert_eq!(image.data(), regenerated[0].0.data());
        assert_eq!(label.data(), regenerated[0].1.data());
    }
}
