//! Feature-space augmentation: pitch shifts and speaking-rate changes applied
//! to per-phone F0 and duration, one randomly drawn transform per utterance.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;
use crate::types::{Origin, PhoneFeature, Utterance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// Shift F0 by a whole number of semitones.
    PitchShift(i32),
    /// Multiply the speaking rate; durations scale by `1 / rate`.
    Rate(f64),
}

pub const TRANSFORMS: [Transform; 12] = [
    Transform::PitchShift(-6),
    Transform::PitchShift(-4),
    Transform::PitchShift(-2),
    Transform::PitchShift(2),
    Transform::PitchShift(4),
    Transform::PitchShift(6),
    Transform::Rate(0.70),
    Transform::Rate(0.80),
    Transform::Rate(0.90),
    Transform::Rate(1.10),
    Transform::Rate(1.20),
    Transform::Rate(1.30),
];

impl Transform {
    pub fn id(&self) -> String {
        self.to_string()
    }

    pub fn from_id(id: &str) -> Option<Transform> {
        TRANSFORMS.iter().copied().find(|t| t.id() == id)
    }

    pub fn f0_factor(&self) -> f64 {
        match *self {
            Transform::PitchShift(k) => semitone_factor(k),
            Transform::Rate(_) => 1.0,
        }
    }

    pub fn apply_f0(&self, f0_hz: f64) -> f64 {
        match *self {
            Transform::PitchShift(k) => f0_hz * semitone_factor(k),
            Transform::Rate(_) => f0_hz,
        }
    }

    pub fn apply_duration(&self, duration_s: f64) -> f64 {
        match *self {
            Transform::PitchShift(_) => duration_s,
            Transform::Rate(r) => duration_s / r,
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::PitchShift(k) => write!(f, "pitch{k:+}"),
            Transform::Rate(r) => write!(f, "rate{r:.2}"),
        }
    }
}

/// Equal-temperament frequency ratio of `k` semitones.
pub fn semitone_factor(k: i32) -> f64 {
    2f64.powf(f64::from(k) / 12.0)
}

pub fn augmented_id(utterance_id: &str, t: &Transform) -> String {
    format!("{utterance_id}#{t}")
}

/// Applies `t` to one utterance's features and re-tags them with the derived id.
pub fn apply_transform(features: &[PhoneFeature], t: &Transform) -> Vec<PhoneFeature> {
    features
        .iter()
        .map(|f| PhoneFeature {
            utterance_id: augmented_id(&f.utterance_id, t),
            duration_s: t.apply_duration(f.duration_s),
            f0_hz: f.f0_hz.map(|hz| t.apply_f0(hz)),
            ..f.clone()
        })
        .collect()
}

/// Draws one transform per utterance from a seeded generator.
pub fn assign_transforms(n: usize, seed: u64) -> Vec<Transform> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| TRANSFORMS[rng.random_range(0..TRANSFORMS.len())])
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Augmented {
    pub utterances: Vec<Utterance>,
    pub features: Vec<PhoneFeature>,
}

/// Appends one transformed copy of every original utterance.
///
/// Output order is the input followed by the copies. Records that are already
/// augmented pass through unchanged. A copy refers to its source's audio and
/// alignment; only its features carry the transform.
pub fn augment_dataset(
    utterances: &[Utterance],
    features: &[PhoneFeature],
    seed: u64,
) -> Result<Augmented> {
    let mut by_utt: HashMap<&str, Vec<&PhoneFeature>> = HashMap::new();
    for f in features {
        by_utt.entry(f.utterance_id.as_str()).or_default().push(f);
    }
    let known: std::collections::HashSet<&str> = utterances.iter().map(|u| u.id.as_str()).collect();
    if let Some(f) = features
        .iter()
        .find(|f| !known.contains(f.utterance_id.as_str()))
    {
        return Err(Error::validation(
            &f.utterance_id,
            "features present for an utterance missing from the manifest",
        ));
    }

    let originals: Vec<&Utterance> = utterances
        .iter()
        .filter(|u| u.origin == Origin::Original)
        .collect();
    let assigned = assign_transforms(originals.len(), seed);
    let jobs: Vec<(&Utterance, Transform)> = originals.into_iter().zip(assigned).collect();

    let copies = par::map(&jobs, |(u, t)| {
        let own: Vec<PhoneFeature> = by_utt
            .get(u.id.as_str())
            .map(|v| v.iter().map(|f| (*f).clone()).collect())
            .unwrap_or_default();
        let utt = Utterance {
            id: augmented_id(&u.id, t),
            origin: Origin::Augmented(t.id()),
            ..(*u).clone()
        };
        (utt, apply_transform(&own, t))
    });

    let mut out_utts = utterances.to_vec();
    let mut out_feats = features.to_vec();
    for (u, f) in copies {
        out_utts.push(u);
        out_feats.extend(f);
    }
    Ok(Augmented {
        utterances: out_utts,
        features: out_feats,
    })
}
