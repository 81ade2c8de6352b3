//! `model.json` persistence.
//!
//! Floats are written in their shortest round-trippable decimal form and
//! maps are key-ordered, so saving the same model always yields the same bytes.

use std::io::Write;
use std::path::Path;

use super::{create_file, read_to_string};
use crate::error::{Error, Result};
use crate::types::{ProsodyModel, MODEL_VERSION};

pub fn model_to_json(model: &ProsodyModel) -> Result<String> {
    model.validate()?;
    let mut s = serde_json::to_string_pretty(model).expect("validated model serializes");
    s.push('\n');
    Ok(s)
}

pub fn model_from_json(text: &str, path: &Path) -> Result<ProsodyModel> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| json_err(path, e))?;
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(MODEL_VERSION) => {}
        Some(v) => {
            return Err(Error::UnsupportedVersion {
                found: u32::try_from(v).unwrap_or(u32::MAX),
                expected: MODEL_VERSION,
            })
        }
        None => return Err(Error::parse(path, 1, "missing integer `version`")),
    }
    let model: ProsodyModel = serde_json::from_str(text).map_err(|e| json_err(path, e))?;
    model.validate()?;
    Ok(model)
}

fn json_err(path: &Path, e: serde_json::Error) -> Error {
    Error::parse(path, e.line(), e.to_string())
}

pub fn save_model(model: &ProsodyModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = model_to_json(model)?;
    let mut f = create_file(path)?;
    f.write_all(json.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ProsodyModel> {
    let path = path.as_ref();
    model_from_json(&read_to_string(path)?, path)
}
