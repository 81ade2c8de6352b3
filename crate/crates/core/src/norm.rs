//! Per-speaker z-score normalisation of F0.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{PhoneFeature, SpeakerStats};

/// Mean and population standard deviation over a speaker's voiced F0 values.
pub fn stats_from_values(speaker: &str, values: &[f64]) -> Result<SpeakerStats> {
    if values.len() < 2 {
        return Err(Error::DegenerateSpeaker {
            speaker: speaker.to_string(),
            message: format!("{} voiced phone(s), need at least 2", values.len()),
        });
    }
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n;
    let sigma = var.sqrt();
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::DegenerateSpeaker {
            speaker: speaker.to_string(),
            message: "all voiced F0 values are identical".into(),
        });
    }
    Ok(SpeakerStats { mu, sigma })
}

pub fn fit_speaker_stats(features: &[PhoneFeature], speaker: &str) -> Result<SpeakerStats> {
    let values: Vec<f64> = features
        .iter()
        .filter(|f| f.speaker == speaker)
        .filter_map(|f| f.f0_hz)
        .collect();
    stats_from_values(speaker, &values)
}

/// Stats for every speaker present in `features`, keyed by name.
pub fn fit_all_speakers(features: &[PhoneFeature]) -> Result<BTreeMap<String, SpeakerStats>> {
    let mut by_speaker: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for f in features {
        let entry = by_speaker.entry(&f.speaker).or_default();
        if let Some(hz) = f.f0_hz {
            entry.push(hz);
        }
    }
    by_speaker
        .into_iter()
        .map(|(name, values)| Ok((name.to_string(), stats_from_values(name, &values)?)))
        .collect()
}

pub fn normalize(f0_hz: f64, s: &SpeakerStats) -> f64 {
    (f0_hz - s.mu) / s.sigma
}

pub fn denormalize(z: f64, s: &SpeakerStats) -> f64 {
    z * s.sigma + s.mu
}
