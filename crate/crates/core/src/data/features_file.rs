//! `features.tsv`: one row per phone.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::{create_file, read_to_string};
use crate::error::{Error, Result};
use crate::types::PhoneFeature;

pub const HEADER: &str = "utterance_id\tphone_index\tphone\tspeaker\tduration_s\tf0_hz";

pub fn format_features(features: &[PhoneFeature]) -> String {
    let mut out = String::with_capacity(64 * (features.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for f in features {
        write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t",
            f.utterance_id, f.phone_index, f.phone, f.speaker, f.duration_s
        )
        .unwrap();
        if let Some(hz) = f.f0_hz {
            write!(out, "{hz}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_features(text: &str, path: &Path) -> Result<Vec<PhoneFeature>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        _ => return Err(Error::parse(path, 1, format!("expected header `{HEADER}`"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [utt, idx, phone, speaker, dur, f0] = cols.as_slice() else {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 6 columns, got {}", cols.len()),
            ));
        };
        let bad = |what: &str, v: &str| Error::parse(path, lineno, format!("bad {what} `{v}`"));
        let phone_index = idx.parse().map_err(|_| bad("phone_index", idx))?;
        let duration_s: f64 = dur.parse().map_err(|_| bad("duration_s", dur))?;
        if !(duration_s.is_finite() && duration_s > 0.0) {
            return Err(bad("duration_s", dur));
        }
        let f0_hz = if f0.is_empty() {
            None
        } else {
            let v: f64 = f0.parse().map_err(|_| bad("f0_hz", f0))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(bad("f0_hz", f0));
            }
            Some(v)
        };
        if utt.is_empty() || phone.is_empty() || speaker.is_empty() {
            return Err(Error::parse(path, lineno, "empty identifier column"));
        }
        out.push(PhoneFeature {
            utterance_id: utt.to_string(),
            phone_index,
            phone: phone.to_string(),
            speaker: speaker.to_string(),
            duration_s,
            f0_hz,
        });
    }
    Ok(out)
}

pub fn save_features(path: impl AsRef<Path>, features: &[PhoneFeature]) -> Result<()> {
    let path = path.as_ref();
    let mut f = create_file(path)?;
    f.write_all(format_features(features).as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn load_features(path: impl AsRef<Path>) -> Result<Vec<PhoneFeature>> {
    let path = path.as_ref();
    parse_features(&read_to_string(path)?, path)
}
