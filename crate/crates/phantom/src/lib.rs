//! Synthetic short-axis cardiac phantom: background, right-ventricle
//! crescent, myocardium ring and left-ventricle disk, with per-class
//! intensities, texture noise and a smooth background gradient. Stands in
//! for real bSSFP cardiac data at desk scale; externally prepared slices in
//! the same tensor layout can be ingested instead.

mod dataset;
mod generate;
mod split;

pub use dataset::{write_dataset, CaseEntry, DatasetManifest, MANIFEST_FILE};
pub use generate::{generate_case, PhantomConfig, PhantomError};
pub use split::make_splits;

/// Class indices used by the phantom, mirroring the usual cardiac ordering.
pub mod classes {
    pub const BACKGROUND: usize = 0;
    pub const RIGHT_VENTRICLE: usize = 1;
    pub const MYOCARDIUM: usize = 2;
    pub const LEFT_VENTRICLE: usize = 3;
}
