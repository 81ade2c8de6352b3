//! `tokens.jsonl`: `{"id":…, "f0":[…], "dur":[…]}` per utterance.

use std::io::Write;
use std::path::Path;

use super::{create_file, read_to_string};
use crate::error::{Error, Result};
use crate::types::TokenSequence;

pub fn save_tokens(path: impl AsRef<Path>, seqs: &[TokenSequence]) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    for s in seqs {
        serde_json::to_writer(&mut buf, s).expect("token sequence serializes");
        buf.push(b'\n');
    }
    let mut f = create_file(path)?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

pub fn load_tokens(path: impl AsRef<Path>) -> Result<Vec<TokenSequence>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let seq: TokenSequence =
            serde_json::from_str(line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        if seq.f0_tokens.len() != seq.dur_tokens.len() {
            return Err(Error::parse(
                path,
                i + 1,
                format!(
                    "`{}` has {} f0 tokens but {} duration tokens",
                    seq.utterance_id,
                    seq.f0_tokens.len(),
                    seq.dur_tokens.len()
                ),
            ));
        }
        out.push(seq);
    }
    Ok(out)
}
