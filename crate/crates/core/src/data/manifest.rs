//! `manifest.jsonl`: one utterance record per line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::alignment::read_alignment;
use super::{create_file, read_to_string};
use crate::error::{Error, Result};
use crate::types::{Origin, Utterance};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: String,
    speaker: String,
    audio: String,
    alignment: String,
    origin: OriginTag,
    #[serde(default)]
    transform: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OriginTag {
    Original,
    Augmented,
}

/// Reads a manifest, resolving and parsing every alignment file relative to
/// the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<Utterance>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new(""));

    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record =
            serde_json::from_str(line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if rec.id.is_empty() || rec.speaker.is_empty() {
            return Err(Error::parse(path, lineno, "empty id or speaker"));
        }
        let origin = match (rec.origin, rec.transform) {
            (OriginTag::Original, None) => Origin::Original,
            (OriginTag::Augmented, Some(t)) if !t.is_empty() => Origin::Augmented(t),
            (OriginTag::Original, Some(_)) => {
                return Err(Error::parse(
                    path,
                    lineno,
                    "original record with a transform",
                ))
            }
            (OriginTag::Augmented, _) => {
                return Err(Error::parse(
                    path,
                    lineno,
                    "augmented record without a transform",
                ))
            }
        };
        let alignment_path = base.join(&rec.alignment);
        let symbols = read_alignment(&alignment_path, &rec.id)?;
        let utt = Utterance {
            id: rec.id,
            speaker: rec.speaker,
            audio_path: base.join(&rec.audio),
            alignment_path,
            symbols,
            origin,
        };
        utt.validate()?;
        out.push(utt);
    }
    Ok(out)
}

/// Writes a manifest. Paths under the output directory are written relative to it.
pub fn save_manifest(path: impl AsRef<Path>, utterances: &[Utterance]) -> Result<()> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new(""));
    let mut buf = Vec::new();
    for u in utterances {
        let (origin, transform) = match &u.origin {
            Origin::Original => (OriginTag::Original, None),
            Origin::Augmented(t) => (OriginTag::Augmented, Some(t.clone())),
        };
        let rec = Record {
            id: u.id.clone(),
            speaker: u.speaker.clone(),
            audio: relative_to(&u.audio_path, base),
            alignment: relative_to(&u.alignment_path, base),
            origin,
            transform,
        };
        serde_json::to_writer(&mut buf, &rec).expect("manifest record serializes");
        buf.push(b'\n');
    }
    let mut f = create_file(path)?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

fn relative_to(path: &Path, base: &Path) -> String {
    let rel = if base.as_os_str().is_empty() || path.is_absolute() && !path.starts_with(base) {
        path.to_path_buf()
    } else if let Ok(stripped) = path.strip_prefix(base) {
        stripped.to_path_buf()
    } else {
        // relative path outside `base`
        absolute(path)
    };
    rel.to_string_lossy().into_owned()
}

fn absolute(path: &Path) -> PathBuf {
    fs::canonicalize(path).unwrap_or_else(|_| {
        std::env::current_dir()
            .map(|d| d.join(path))
            .unwrap_or_else(|_| path.to_path_buf())
    })
}
