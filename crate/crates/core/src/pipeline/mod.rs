//! Corpus runs: manifest in, feature store out, then evaluation or export.

mod manifest;
mod store;
pub mod wgdv;

pub use manifest::{DatasetManifest, ManifestEntry};
pub use store::{
    evaluate, export_dnn, extract, format_sig9, EvaluateOptions, ExportSummary, ExtractConfig, ExtractSummary,
    SampleFailure, StoreIndex, StoreSample, INDEX_FILE, MATRIX_DIR, VECTOR_TABLE,
};
