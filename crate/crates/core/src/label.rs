//! Prosody tokens: labelling phones against a fitted model, decoding tokens
//! back to F0/duration, offset and fixed-cluster control, the ascending
//! cluster report and speaker adaptation.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cluster::nearest;
use crate::error::{Error, Result};
use crate::norm::{denormalize, normalize, stats_from_values};
use crate::par;
use crate::types::{PhoneFeature, ProsodyModel, TokenSequence, Utterance, DEFAULT_K};

/// Largest offset accepted by [`apply_control`].
pub const MAX_OFFSET: i32 = 11;

pub fn label_utterance(
    u: &Utterance,
    features: &[PhoneFeature],
    model: &ProsodyModel,
    speaker: &str,
) -> Result<TokenSequence> {
    let stats = model.speaker(speaker)?;
    let m = u.num_phones();
    if features.len() != m {
        return Err(Error::validation(
            &u.id,
            format!("{} phones but {} feature records", m, features.len()),
        ));
    }
    if let Some((i, _)) = features
        .iter()
        .enumerate()
        .find(|(i, f)| f.phone_index != *i)
    {
        return Err(Error::validation(
            &u.id,
            format!("feature records out of phone order at position {i}"),
        ));
    }

    let voiced: Vec<Option<usize>> = features
        .iter()
        .map(|f| {
            f.f0_hz
                .map(|hz| nearest(&model.f0_centroids, normalize(hz, stats)))
        })
        .collect();
    let zero_token = nearest(&model.f0_centroids, 0.0);
    let f0_tokens = (0..m)
        .map(|i| voiced[i].unwrap_or_else(|| nearest_voiced(&voiced, i).unwrap_or(zero_token)))
        .collect();

    let dur_tokens = features
        .iter()
        .map(|f| Ok(model.intervals_for(&f.phone)?.index_of(f.duration_s)))
        .collect::<Result<Vec<_>>>()?;

    Ok(TokenSequence {
        utterance_id: u.id.clone(),
        f0_tokens,
        dur_tokens,
    })
}

/// Token of the closest voiced phone; the earlier one wins a distance tie.
fn nearest_voiced(tokens: &[Option<usize>], i: usize) -> Option<usize> {
    (1..tokens.len()).find_map(|d| {
        let before = i.checked_sub(d).and_then(|j| tokens[j]);
        let after = tokens.get(i + d).copied().flatten();
        before.or(after)
    })
}

/// Labels every utterance, taking each one's features by utterance id.
/// `speaker` overrides the speaker recorded in the manifest.
pub fn label_corpus(
    utterances: &[Utterance],
    features: &[PhoneFeature],
    model: &ProsodyModel,
    speaker: Option<&str>,
) -> Result<Vec<TokenSequence>> {
    let mut by_utt: HashMap<&str, Vec<PhoneFeature>> = HashMap::new();
    for f in features {
        by_utt.entry(&f.utterance_id).or_default().push(f.clone());
    }
    for v in by_utt.values_mut() {
        v.sort_by_key(|f| f.phone_index);
    }
    par::try_map(utterances, |u| {
        let feats = by_utt.get(u.id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        label_utterance(u, feats, model, speaker.unwrap_or(&u.speaker))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoded {
    pub f0_hz: f64,
    pub duration_s: f64,
}

/// F0 from the speaker-denormalised centroid, duration from the phone's
/// interval representative.
pub fn decode_tokens(
    tokens: &TokenSequence,
    phones: &[String],
    model: &ProsodyModel,
    speaker: &str,
) -> Result<Vec<Decoded>> {
    let stats = model.speaker(speaker)?;
    if phones.len() != tokens.f0_tokens.len() || phones.len() != tokens.dur_tokens.len() {
        return Err(Error::validation(
            &tokens.utterance_id,
            format!(
                "{} phones but {} f0 / {} duration tokens",
                phones.len(),
                tokens.f0_tokens.len(),
                tokens.dur_tokens.len()
            ),
        ));
    }
    phones
        .iter()
        .zip(tokens.f0_tokens.iter().zip(&tokens.dur_tokens))
        .map(|(phone, (&f, &d))| {
            let z = *model.f0_centroids.get(f).ok_or(Error::TokenRange {
                feature: "f0",
                token: f as i64,
                max: model.k_f0 - 1,
            })?;
            let iv = model.intervals_for(phone)?;
            let duration_s = *iv.representatives.get(d).ok_or(Error::TokenRange {
                feature: "duration",
                token: d as i64,
                max: model.k_dur - 1,
            })?;
            Ok(Decoded {
                f0_hz: denormalize(z, stats),
                duration_s,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Offset(i32),
    Fixed(usize),
}

/// Per-feature control. Offset and fixed cluster exclude each other by
/// construction; `None` keeps the ground-truth tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ControlSpec {
    pub f0: Option<Control>,
    pub dur: Option<Control>,
}

impl ControlSpec {
    /// Builds a spec from the flag-style fields, rejecting offset and fixed
    /// cluster on the same feature.
    pub fn from_parts(
        f0_offset: Option<i32>,
        fixed_f0_cluster: Option<usize>,
        dur_offset: Option<i32>,
        fixed_dur_cluster: Option<usize>,
    ) -> Result<Self> {
        let one = |feature: &str, off: Option<i32>, fixed: Option<usize>| match (off, fixed) {
            (Some(_), Some(_)) => Err(Error::Config(format!(
                "{feature}: offset and fixed cluster are mutually exclusive"
            ))),
            (Some(o), None) => Ok(Some(Control::Offset(o))),
            (None, Some(c)) => Ok(Some(Control::Fixed(c))),
            (None, None) => Ok(None),
        };
        Ok(Self {
            f0: one("f0", f0_offset, fixed_f0_cluster)?,
            dur: one("duration", dur_offset, fixed_dur_cluster)?,
        })
    }
}

fn control_one(
    tokens: &[usize],
    control: Option<Control>,
    k: usize,
    feature: &'static str,
) -> Result<Vec<usize>> {
    let max = k - 1;
    if let Some(&bad) = tokens.iter().find(|&&t| t > max) {
        return Err(Error::TokenRange {
            feature,
            token: bad as i64,
            max,
        });
    }
    match control {
        None => Ok(tokens.to_vec()),
        Some(Control::Offset(o)) => {
            if o.abs() > MAX_OFFSET {
                return Err(Error::OffsetRange {
                    feature,
                    offset: o,
                    limit: MAX_OFFSET,
                });
            }
            Ok(tokens
                .iter()
                .map(|&t| (t as i64 + i64::from(o)).clamp(0, max as i64) as usize)
                .collect())
        }
        Some(Control::Fixed(c)) => {
            if c > max {
                return Err(Error::TokenRange {
                    feature,
                    token: c as i64,
                    max,
                });
            }
            Ok(vec![c; tokens.len()])
        }
    }
}

/// [`apply_control_k`] for the default 15-cluster token space.
pub fn apply_control(tokens: &TokenSequence, spec: &ControlSpec) -> Result<TokenSequence> {
    apply_control_k(tokens, spec, DEFAULT_K, DEFAULT_K)
}

/// Shifts tokens by an offset (clamped to the token range) or pins every
/// token of a feature to one cluster.
pub fn apply_control_k(
    tokens: &TokenSequence,
    spec: &ControlSpec,
    k_f0: usize,
    k_dur: usize,
) -> Result<TokenSequence> {
    Ok(TokenSequence {
        utterance_id: tokens.utterance_id.clone(),
        f0_tokens: control_one(&tokens.f0_tokens, spec.f0, k_f0, "f0")?,
        dur_tokens: control_one(&tokens.dur_tokens, spec.dur, k_dur, "duration")?,
    })
}

/// A held-out utterance with ground-truth tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct TestUtterance {
    pub speaker: String,
    pub phones: Vec<String>,
    pub tokens: TokenSequence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscendingRow {
    pub cluster_id: usize,
    /// Mean decoded F0 with every F0 token fixed to `cluster_id`.
    pub mean_f0_hz: Option<f64>,
    /// Mean decoded duration with every duration token fixed to `cluster_id`.
    pub mean_dur_s: Option<f64>,
}

/// For each cluster id, fixes one feature's tokens to that id (the other keeps
/// its ground truth), decodes, and averages over all phones. `speaker`
/// overrides each utterance's own speaker for decoding.
pub fn ascending_report(
    items: &[TestUtterance],
    model: &ProsodyModel,
    speaker: Option<&str>,
) -> Result<Vec<AscendingRow>> {
    let total: usize = items.iter().map(|t| t.phones.len()).sum();
    if total == 0 {
        return Ok(Vec::new());
    }
    let k = model.k_f0.max(model.k_dur);

    // per utterance: (sum of f0 per cluster, sum of durations per cluster)
    let partial = par::try_map(items, |item| -> Result<(Vec<f64>, Vec<f64>)> {
        let who = speaker.unwrap_or(&item.speaker);
        let mut f0 = vec![0.0; model.k_f0];
        let mut dur = vec![0.0; model.k_dur];
        for (c, slot) in f0.iter_mut().enumerate() {
            let spec = ControlSpec {
                f0: Some(Control::Fixed(c)),
                dur: None,
            };
            let t = apply_control_k(&item.tokens, &spec, model.k_f0, model.k_dur)?;
            *slot = decode_tokens(&t, &item.phones, model, who)?
                .iter()
                .map(|d| d.f0_hz)
                .sum();
        }
        for (c, slot) in dur.iter_mut().enumerate() {
            let spec = ControlSpec {
                f0: None,
                dur: Some(Control::Fixed(c)),
            };
            let t = apply_control_k(&item.tokens, &spec, model.k_f0, model.k_dur)?;
            *slot = decode_tokens(&t, &item.phones, model, who)?
                .iter()
                .map(|d| d.duration_s)
                .sum();
        }
        Ok((f0, dur))
    })?;

    let mut f0_sum = vec![0.0; model.k_f0];
    let mut dur_sum = vec![0.0; model.k_dur];
    for (f, d) in partial {
        f0_sum.iter_mut().zip(f).for_each(|(a, b)| *a += b);
        dur_sum.iter_mut().zip(d).for_each(|(a, b)| *a += b);
    }
    let n = total as f64;
    Ok((0..k)
        .map(|c| AscendingRow {
            cluster_id: c,
            mean_f0_hz: f0_sum.get(c).map(|s| s / n),
            mean_dur_s: dur_sum.get(c).map(|s| s / n),
        })
        .collect())
}

pub const REPORT_HEADER: &str = "cluster_id\tmean_f0_hz\tmean_dur_s";

pub fn report_to_tsv(rows: &[AscendingRow]) -> String {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}",
            r.cluster_id,
            opt(r.mean_f0_hz),
            opt(r.mean_dur_s)
        )
        .unwrap();
    }
    out
}

/// Adds a speaker to a fitted model. Centroids and intervals are carried over
/// untouched; only the new speaker's F0 statistics are fitted, over all voiced
/// records in `features`.
pub fn adapt_speaker(
    model: &ProsodyModel,
    features: &[PhoneFeature],
    speaker_id: &str,
    replace: bool,
) -> Result<ProsodyModel> {
    if !replace && model.speakers.contains_key(speaker_id) {
        return Err(Error::SpeakerExists(speaker_id.to_string()));
    }
    let values: Vec<f64> = features.iter().filter_map(|f| f.f0_hz).collect();
    let stats = stats_from_values(speaker_id, &values)?;
    let mut out = model.clone();
    out.speakers.insert(speaker_id.to_string(), stats);
    Ok(out)
}
