//! Fitting the universal prosody model: k-means over speaker-normalised F0
//! pooled across speakers, balanced duration intervals per phone.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::norm::normalize;
use crate::par;
use crate::types::{
    DurationIntervals, PhoneFeature, ProsodyModel, SpeakerStats, DEFAULT_K, MODEL_VERSION,
};

pub mod balanced;
pub mod kmeans;

pub use balanced::{balanced_intervals, group_sizes};
pub use kmeans::{kmeans_1d, nearest, KMeans, KMeansConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub k_f0: usize,
    pub k_dur: usize,
    pub kmeans: KMeansConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            k_f0: DEFAULT_K,
            k_dur: DEFAULT_K,
            kmeans: KMeansConfig::default(),
        }
    }
}

/// Fits F0 centroids and duration intervals over `features` (original and
/// augmented records together). Unvoiced phones do not enter the F0 pool.
/// Phones with fewer than `k_dur` samples get no entry of their own and are
/// labelled with the global intervals.
pub fn fit_model(
    features: &[PhoneFeature],
    stats: &BTreeMap<String, SpeakerStats>,
    cfg: &FitConfig,
) -> Result<ProsodyModel> {
    let mut z = Vec::with_capacity(features.len());
    for f in features {
        let s = stats
            .get(&f.speaker)
            .ok_or_else(|| Error::UnknownSpeaker(f.speaker.clone()))?;
        if let Some(hz) = f.f0_hz {
            z.push(normalize(hz, s));
        }
    }
    let f0_centroids = kmeans_1d(&z, cfg.k_f0, &cfg.kmeans)?.centroids;

    let all_durations: Vec<f64> = features.iter().map(|f| f.duration_s).collect();
    let dur_global = balanced_intervals(&all_durations, cfg.k_dur)?;

    let mut per_phone: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for f in features {
        per_phone.entry(&f.phone).or_default().push(f.duration_s);
    }
    let eligible: Vec<(&str, Vec<f64>)> = per_phone
        .into_iter()
        .filter(|(_, d)| d.len() >= cfg.k_dur)
        .collect();
    let fitted = par::try_map(&eligible, |(phone, durations)| {
        balanced_intervals(durations, cfg.k_dur).map(|iv| (phone.to_string(), iv))
    })?;
    let dur_intervals: BTreeMap<String, DurationIntervals> = fitted.into_iter().collect();

    let model = ProsodyModel {
        version: MODEL_VERSION,
        k_f0: cfg.k_f0,
        k_dur: cfg.k_dur,
        f0_centroids,
        dur_intervals,
        dur_global: Some(dur_global),
        speakers: stats.clone(),
    };
    model.validate()?;
    Ok(model)
}
