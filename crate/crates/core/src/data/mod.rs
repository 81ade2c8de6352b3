//! File formats: manifest, alignments, model, features, tokens and the F0 cache.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};

pub mod alignment;
pub mod f0_cache;
pub mod features_file;
pub mod manifest;
pub mod model_file;
pub mod tokens_file;

pub use alignment::{format_alignment, parse_alignment, read_alignment};
pub use f0_cache::{read_track, write_track};
pub use features_file::{load_features, save_features};
pub use manifest::{load_manifest, save_manifest};
pub use model_file::{load_model, model_from_json, model_to_json, save_model};
pub use tokens_file::{load_tokens, save_tokens};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}
