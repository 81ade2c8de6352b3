//! Domain types shared by every pipeline stage.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed between consecutive phone intervals, in seconds.
pub const OVERLAP_TOLERANCE_S: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Phone,
    WordBoundary,
    Punctuation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub start_s: f64,
    pub end_s: f64,
}

impl Span {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// One entry of an aligned symbol sequence. Only phones carry a time span.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSymbol {
    kind: SymbolKind,
    label: String,
    span: Option<Span>,
}

impl AlignedSymbol {
    pub fn phone(label: impl Into<String>, start_s: f64, end_s: f64) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::Config("empty phone label".into()));
        }
        if !(start_s.is_finite() && end_s.is_finite()) || end_s <= start_s {
            return Err(Error::Config(format!(
                "phone `{label}` has invalid interval [{start_s}, {end_s})"
            )));
        }
        Ok(Self {
            kind: SymbolKind::Phone,
            label,
            span: Some(Span { start_s, end_s }),
        })
    }

    pub fn word_boundary() -> Self {
        Self {
            kind: SymbolKind::WordBoundary,
            label: "#".into(),
            span: None,
        }
    }

    pub fn punctuation(mark: impl Into<String>) -> Result<Self> {
        let label = mark.into();
        if label.is_empty() {
            return Err(Error::Config("empty punctuation mark".into()));
        }
        Ok(Self {
            kind: SymbolKind::Punctuation,
            label,
            span: None,
        })
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn span(&self) -> Option<Span> {
        self.span
    }

    pub fn is_phone(&self) -> bool {
        self.kind == SymbolKind::Phone
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Original,
    Augmented(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub id: String,
    pub speaker: String,
    pub audio_path: PathBuf,
    pub alignment_path: PathBuf,
    pub symbols: Vec<AlignedSymbol>,
    pub origin: Origin,
}

impl Utterance {
    /// Checks the ordering invariants of the phone intervals.
    pub fn validate(&self) -> Result<()> {
        let mut prev_end: Option<f64> = None;
        let mut phones = 0usize;
        for sym in &self.symbols {
            let Some(span) = sym.span() else { continue };
            phones += 1;
            if let Some(end) = prev_end {
                if span.start_s < end - OVERLAP_TOLERANCE_S {
                    return Err(Error::validation(
                        &self.id,
                        format!(
                            "phone {} (`{}`) starts at {}s before the previous phone ends at {}s",
                            phones - 1,
                            sym.label(),
                            span.start_s,
                            end
                        ),
                    ));
                }
            }
            prev_end = Some(span.end_s);
        }
        if phones == 0 {
            return Err(Error::validation(&self.id, "no phones"));
        }
        Ok(())
    }

    pub fn phones(&self) -> impl Iterator<Item = (&str, Span)> + '_ {
        self.symbols
            .iter()
            .filter_map(|s| s.span().map(|span| (s.label(), span)))
    }

    pub fn phone_labels(&self) -> Vec<String> {
        self.phones().map(|(l, _)| l.to_string()).collect()
    }

    pub fn num_phones(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_phone()).count()
    }

    /// Sum of phone durations.
    pub fn speech_duration_s(&self) -> f64 {
        self.phones().map(|(_, s)| s.duration_s()).sum()
    }
}

/// Per-phone prosodic measurements: the values that get clustered.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneFeature {
    pub utterance_id: String,
    pub phone_index: usize,
    pub phone: String,
    pub speaker: String,
    pub duration_s: f64,
    /// Mean F0 over voiced frames, `None` when the phone is unvoiced.
    pub f0_hz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeakerStats {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationIntervals {
    pub boundaries: Vec<f64>,
    pub representatives: Vec<f64>,
}

impl DurationIntervals {
    pub fn k(&self) -> usize {
        self.representatives.len()
    }

    /// Interval index of a duration: the number of boundaries at or below it.
    pub fn index_of(&self, duration_s: f64) -> usize {
        self.boundaries.partition_point(|&b| b <= duration_s)
    }

    fn validate(&self, k: usize, what: &str) -> Result<()> {
        if self.representatives.len() != k || self.boundaries.len() + 1 != k {
            return Err(Error::Invariant(format!(
                "{what}: expected {k} representatives and {} boundaries, got {} and {}",
                k.saturating_sub(1),
                self.representatives.len(),
                self.boundaries.len()
            )));
        }
        let finite = self
            .representatives
            .iter()
            .chain(&self.boundaries)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Invariant(format!("{what}: non-finite value")));
        }
        if self.representatives.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Invariant(format!(
                "{what}: representatives not ascending"
            )));
        }
        if self.boundaries.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Invariant(format!(
                "{what}: boundaries not ascending"
            )));
        }
        Ok(())
    }
}

pub const MODEL_VERSION: u32 = 1;
pub const DEFAULT_K: usize = 15;

/// Universal F0 centroids, per-phone duration intervals and per-speaker statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProsodyModel {
    pub version: u32,
    pub k_f0: usize,
    pub k_dur: usize,
    pub f0_centroids: Vec<f64>,
    pub dur_intervals: BTreeMap<String, DurationIntervals>,
    pub dur_global: Option<DurationIntervals>,
    pub speakers: BTreeMap<String, SpeakerStats>,
}

impl ProsodyModel {
    pub fn validate(&self) -> Result<()> {
        if self.version != MODEL_VERSION {
            return Err(Error::UnsupportedVersion {
                found: self.version,
                expected: MODEL_VERSION,
            });
        }
        if self.k_f0 == 0 || self.k_dur == 0 {
            return Err(Error::Invariant("cluster counts must be positive".into()));
        }
        if self.f0_centroids.len() != self.k_f0 {
            return Err(Error::Invariant(format!(
                "k_f0 = {} but {} centroids",
                self.k_f0,
                self.f0_centroids.len()
            )));
        }
        if self.f0_centroids.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invariant("non-finite centroid".into()));
        }
        if self.f0_centroids.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invariant(
                "f0 centroids not strictly ascending".into(),
            ));
        }
        for (phone, iv) in &self.dur_intervals {
            iv.validate(self.k_dur, &format!("duration intervals of `{phone}`"))?;
        }
        if let Some(global) = &self.dur_global {
            global.validate(self.k_dur, "global duration intervals")?;
        }
        for (name, s) in &self.speakers {
            if !(s.mu.is_finite() && s.sigma.is_finite() && s.sigma > 0.0) {
                return Err(Error::Invariant(format!(
                    "speaker `{name}` has invalid stats (mu={}, sigma={})",
                    s.mu, s.sigma
                )));
            }
        }
        Ok(())
    }

    pub fn speaker(&self, name: &str) -> Result<&SpeakerStats> {
        self.speakers
            .get(name)
            .ok_or_else(|| Error::UnknownSpeaker(name.to_string()))
    }

    /// Duration intervals for a phone, falling back to the global intervals.
    pub fn intervals_for(&self, phone: &str) -> Result<&DurationIntervals> {
        self.dur_intervals
            .get(phone)
            .or(self.dur_global.as_ref())
            .ok_or_else(|| Error::UnknownPhone(phone.to_string()))
    }
}

/// Per-utterance F0 and duration tokens, one of each per phone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    #[serde(rename = "id")]
    pub utterance_id: String,
    #[serde(rename = "f0")]
    pub f0_tokens: Vec<usize>,
    #[serde(rename = "dur")]
    pub dur_tokens: Vec<usize>,
}
