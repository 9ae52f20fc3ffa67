//! Portable tensor directory format and the on-disk case layout.
//!
//! A tensor lives in its own directory holding `header.json` and `data.bin`:
//!
//! ```text
//! header.json  {"shape":[C,M,N],"dtype":"float32","order":"row-major","endianness":"little"}
//! data.bin     raw little-endian f32 values, row-major
//! ```
//!
//! Round trips are bit-exact, including NaN payloads; reading only validates
//! structure (header vs payload size) and reports non-finite values through a
//! flag rather than failing.
//!
//! Cases are laid out as `<case_id>/image/slice_XXX` and
//! `<case_id>/label/slice_XXX`, one tensor directory per slice. Corrupted
//! copies live next to the originals under `image+<tag>/`.

use std::fs;
use std::path::{Path, PathBuf};

use byteorder::{ByteOrder, LittleEndian};
use ndarray::{Array3, ArrayD, ArrayViewD, IxDyn};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::Result;

pub const HEADER_FILE: &str = "header.json";
pub const DATA_FILE: &str = "data.bin";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorHeader {
    shape: Vec<usize>,
    dtype: String,
    order: String,
    endianness: String,
}

/// A tensor read back from disk plus its validation flag.
#[derive(Debug, Clone)]
pub struct LoadedTensor {
    pub data: ArrayD<f32>,
    /// False when the payload contains NaN or infinite values.
    pub finite: bool,
}

impl LoadedTensor {
    pub fn into_array3(self) -> Result<Array3<f32>> {
        let shape = self.data.shape().to_vec();
        self.data
            .into_dimensionality::<ndarray::Ix3>()
            .map_err(|_| CoreError::ShapeMismatch {
                expected: "rank-3 tensor".into(),
                actual: format!("{shape:?}"),
            })
    }
}

/// Writes `grid` as a tensor directory at `path`, creating it if needed.
pub fn write_tensor(path: &Path, grid: ArrayViewD<'_, f32>) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CoreError::io(path, e))?;
    let header = TensorHeader {
        shape: grid.shape().to_vec(),
        dtype: "float32".into(),
        order: "row-major".into(),
        endianness: "little".into(),
    };
    let header_path = path.join(HEADER_FILE);
    let header_json = serde_json::to_string_pretty(&header)
        .map_err(|e| CoreError::json(&header_path, e))?;
    fs::write(&header_path, header_json).map_err(|e| CoreError::io(&header_path, e))?;

    let mut bytes = vec![0u8; grid.len() * 4];
    // Row-major regardless of the in-memory layout of the view.
    for (i, v) in grid.iter().enumerate() {
        LittleEndian::write_u32(&mut bytes[i * 4..i * 4 + 4], v.to_bits());
    }
    let data_path = path.join(DATA_FILE);
    fs::write(&data_path, bytes).map_err(|e| CoreError::io(&data_path, e))?;
    Ok(())
}

/// Convenience wrapper for rank-3 grids.
pub fn write_tensor3(path: &Path, grid: &Array3<f32>) -> Result<()> {
    write_tensor(path, grid.view().into_dyn())
}

/// Reads a tensor directory. Structural problems (bad header, payload size
/// mismatch) are errors; non-finite payloads load fine with `finite = false`.
pub fn read_tensor(path: &Path) -> Result<LoadedTensor> {
    let header_path = path.join(HEADER_FILE);
    let header_json =
        fs::read_to_string(&header_path).map_err(|e| CoreError::io(&header_path, e))?;
    let header: TensorHeader =
        serde_json::from_str(&header_json).map_err(|e| CoreError::json(&header_path, e))?;
    if header.dtype != "float32" {
        return Err(CoreError::BadHeader(format!(
            "unsupported dtype {:?}",
            header.dtype
        )));
    }
    if header.order != "row-major" {
        return Err(CoreError::BadHeader(format!(
            "unsupported order {:?}",
            header.order
        )));
    }
    if header.endianness != "little" {
        return Err(CoreError::BadHeader(format!(
            "unsupported endianness {:?}",
            header.endianness
        )));
    }

    let data_path = path.join(DATA_FILE);
    let bytes = fs::read(&data_path).map_err(|e| CoreError::io(&data_path, e))?;
    let declared: usize = header.shape.iter().product();
    if bytes.len() % 4 != 0 || bytes.len() / 4 != declared {
        return Err(CoreError::PayloadSizeMismatch {
            expected: declared,
            actual: bytes.len() / 4,
        });
    }
    let mut values = Vec::with_capacity(declared);
    for chunk in bytes.chunks_exact(4) {
        values.push(f32::from_bits(LittleEndian::read_u32(chunk)));
    }
    let finite = values.iter().all(|v| v.is_finite());
    let data = ArrayD::from_shape_vec(IxDyn(&header.shape), values).map_err(|_| {
        CoreError::BadHeader(format!("shape {:?} does not match payload", header.shape))
    })?;
    Ok(LoadedTensor { data, finite })
}

/// Reads a rank-3 tensor, rejecting non-finite payloads.
pub fn read_tensor3_strict(path: &Path) -> Result<Array3<f32>> {
    let loaded = read_tensor(path)?;
    if !loaded.finite {
        return Err(CoreError::NonFinite(format!(
            "tensor at {}",
            path.display()
        )));
    }
    loaded.into_array3()
}

/// `slice_007`-style directory name.
pub fn slice_dir_name(slice_index: usize) -> String {
    format!("slice_{slice_index:03}")
}

/// `<root>/<case_id>/<channel>/slice_XXX` where `channel` is `image`,
/// `label`, or a tagged variant such as `image+ghosting_moderate`.
pub fn slice_dir(root: &Path, case_id: &str, channel: &str, slice_index: usize) -> PathBuf {
    root.join(case_id).join(channel).join(slice_dir_name(slice_index))
}

/// Lists slice indices present for a case channel, sorted ascending.
pub fn list_slices(root: &Path, case_id: &str, channel: &str) -> Result<Vec<usize>> {
    let dir = root.join(case_id).join(channel);
    let mut indices = Vec::new();
    let entries = fs::read_dir(&dir).map_err(|e| CoreError::io(&dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| CoreError::io(&dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stripped) = name.strip_prefix("slice_") {
            if let Ok(idx) = stripped.parse::<usize>() {
                indices.push(idx);
            }
        }
    }
    indices.sort_unstable();
    Ok(indices)
}
