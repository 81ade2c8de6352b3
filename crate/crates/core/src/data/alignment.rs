//! Per-utterance alignment TSV.
//!
//! ```text
//! P<TAB>label<TAB>start_s<TAB>end_s
//! B<TAB>#
//! X<TAB><mark>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::read_to_string;
use crate::error::{Error, Result};
use crate::types::{AlignedSymbol, SymbolKind};

pub fn read_alignment(path: &Path, utterance_id: &str) -> Result<Vec<AlignedSymbol>> {
    let text = read_to_string(path)?;
    parse_alignment(&text, path, utterance_id)
}

pub fn parse_alignment(text: &str, path: &Path, utterance_id: &str) -> Result<Vec<AlignedSymbol>> {
    let mut symbols = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let sym = match fields.as_slice() {
            ["P", label, start, end] => {
                let start: f64 = parse_seconds(start, path, lineno)?;
                let end: f64 = parse_seconds(end, path, lineno)?;
                AlignedSymbol::phone(*label, start, end).map_err(|e| {
                    Error::validation(utterance_id, format!("alignment line {lineno}: {e}"))
                })?
            }
            ["B", "#"] => AlignedSymbol::word_boundary(),
            ["X", mark] => AlignedSymbol::punctuation(*mark)
                .map_err(|e| Error::parse(path, lineno, e.to_string()))?,
            _ => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("unrecognised alignment row `{line}`"),
                ))
            }
        };
        symbols.push(sym);
    }
    Ok(symbols)
}

fn parse_seconds(s: &str, path: &Path, lineno: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::parse(path, lineno, format!("bad time `{s}`: {e}")))
}

/// Serializes symbols with microsecond-resolution times.
pub fn format_alignment(symbols: &[AlignedSymbol]) -> String {
    let mut out = String::new();
    for s in symbols {
        match s.kind() {
            SymbolKind::Phone => {
                let span = s.span().expect("phones carry a span");
                writeln!(
                    out,
                    "P\t{}\t{:.6}\t{:.6}",
                    s.label(),
                    span.start_s,
                    span.end_s
                )
            }
            SymbolKind::WordBoundary => writeln!(out, "B\t#"),
            SymbolKind::Punctuation => writeln!(out, "X\t{}", s.label()),
        }
        .expect("writing to a String");
    }
    out
}
