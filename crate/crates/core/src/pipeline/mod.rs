//! Batch processing: JSON-lines manifest in, archive directory out.
//!
//! ```text
//! out/
//!   index.jsonl    one ArchiveRecord per matrix, sorted by (id, shift)
//!   report.jsonl   one FailureRecord per utterance that failed
//!   feats/*.mwf    binary matrices
//! ```

mod archive;
mod manifest;
mod matrix;
mod text;

pub use archive::{
    process_dataset, read_index, variant_key, ArchiveRecord, FailureRecord, ProcessOptions, ProcessSummary,
    FEATS_DIR, INDEX_FILE, REPORT_FILE,
};
pub use manifest::{parse_manifest, read_manifest, ManifestEntry};
pub use matrix::{read_matrix, write_matrix, Matrix, MAGIC};
pub use text::{export_text_archive, read_text_archive, write_text_matrix};
