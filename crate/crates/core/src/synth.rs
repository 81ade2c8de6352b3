//! Synthetic toy corpora: speakers with distinct F0 mean and spread, phones
//! with phone-dependent durations, and optionally sine-based audio.
//!
//! Used by the acceptance suite, the benches and for trying the CLI without
//! real recordings.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::data::{format_alignment, save_manifest};
use crate::error::{Error, Result};
use crate::pitch::{write_wav, Waveform};
use crate::types::{AlignedSymbol, Origin, PhoneFeature, Utterance};

#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerSpec {
    pub name: String,
    pub mu_hz: f64,
    pub sigma_hz: f64,
}

impl SpeakerSpec {
    pub fn new(name: &str, mu_hz: f64, sigma_hz: f64) -> Self {
        Self {
            name: name.to_string(),
            mu_hz,
            sigma_hz,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    pub speakers: Vec<SpeakerSpec>,
    pub utterances_per_speaker: usize,
    pub words_per_utterance: (usize, usize),
    pub sample_rate: u32,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            speakers: vec![
                SpeakerSpec::new("low", 95.0, 8.0),
                SpeakerSpec::new("mid", 165.0, 15.0),
                SpeakerSpec::new("high", 290.0, 22.0),
            ],
            utterances_per_speaker: 24,
            words_per_utterance: (3, 5),
            sample_rate: 16_000,
            seed: 1,
        }
    }
}

/// (label, voiced, mean duration in seconds)
const INVENTORY: &[(&str, bool, f64)] = &[
    ("aa", true, 0.120),
    ("ae", true, 0.110),
    ("iy", true, 0.095),
    ("uw", true, 0.105),
    ("eh", true, 0.085),
    ("m", true, 0.070),
    ("n", true, 0.065),
    ("l", true, 0.060),
    ("s", false, 0.090),
    ("t", false, 0.055),
    ("k", false, 0.060),
    ("f", false, 0.080),
];

const LEAD_IN_S: f64 = 0.05;
const MIN_PHONE_S: f64 = 0.04;

/// A generated utterance with the ground-truth F0 of each phone.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyUtterance {
    pub utterance: Utterance,
    pub target_f0: Vec<Option<f64>>,
}

fn round_us(t: f64) -> f64 {
    (t * 1e6).round() / 1e6
}

pub fn generate(cfg: &ToyConfig) -> Vec<ToyUtterance> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spread = LogNormal::new(0.0, 0.25).unwrap();
    let z = Normal::new(0.0, 1.0).unwrap();
    let mut out = Vec::new();
    for spk in &cfg.speakers {
        for n in 0..cfg.utterances_per_speaker {
            let id = format!("{}_{:03}", spk.name, n);
            let words = rng.random_range(cfg.words_per_utterance.0..=cfg.words_per_utterance.1);
            let mut symbols = Vec::new();
            let mut target_f0 = Vec::new();
            let mut t = LEAD_IN_S;
            for w in 0..words {
                if w > 0 {
                    symbols.push(AlignedSymbol::word_boundary());
                    if rng.random_bool(0.2) {
                        symbols.push(AlignedSymbol::punctuation(",").unwrap());
                    }
                }
                for _ in 0..rng.random_range(2..=4) {
                    let (label, voiced, mean) = INVENTORY[rng.random_range(0..INVENTORY.len())];
                    let dur = round_us((mean * spread.sample(&mut rng)).max(MIN_PHONE_S));
                    let start = round_us(t);
                    let end = round_us(t + dur);
                    symbols.push(AlignedSymbol::phone(label, start, end).unwrap());
                    t = end;
                    let f0 = voiced.then(|| {
                        (spk.mu_hz + spk.sigma_hz * z.sample(&mut rng)).clamp(60.0, 480.0)
                    });
                    target_f0.push(f0);
                }
            }
            symbols.push(AlignedSymbol::punctuation(".").unwrap());
            out.push(ToyUtterance {
                utterance: Utterance {
                    audio_path: PathBuf::from(format!("{id}.wav")),
                    alignment_path: PathBuf::from(format!("{id}.tsv")),
                    id,
                    speaker: spk.name.clone(),
                    symbols,
                    origin: Origin::Original,
                },
                target_f0,
            });
        }
    }
    out
}

/// Feature table straight from the generator, without audio.
pub fn toy_features(corpus: &[ToyUtterance]) -> Vec<PhoneFeature> {
    corpus
        .iter()
        .flat_map(|t| {
            t.utterance
                .phones()
                .zip(&t.target_f0)
                .enumerate()
                .map(|(i, ((label, span), f0))| PhoneFeature {
                    utterance_id: t.utterance.id.clone(),
                    phone_index: i,
                    phone: label.to_string(),
                    speaker: t.utterance.speaker.clone(),
                    duration_s: span.duration_s(),
                    f0_hz: *f0,
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Continuous-phase sine for voiced phones, silence elsewhere.
pub fn render(t: &ToyUtterance, sample_rate: u32) -> Waveform {
    let sr = f64::from(sample_rate);
    let end = t
        .utterance
        .phones()
        .last()
        .map(|(_, s)| s.end_s)
        .unwrap_or(0.0)
        + LEAD_IN_S;
    let mut samples = vec![0.0f32; (end * sr).ceil() as usize];
    let mut phase = 0.0f64;
    for ((_, span), f0) in t.utterance.phones().zip(&t.target_f0) {
        let a = (span.start_s * sr).round() as usize;
        let b = ((span.end_s * sr).round() as usize).min(samples.len());
        for s in &mut samples[a..b] {
            if let Some(hz) = f0 {
                phase += 2.0 * std::f64::consts::PI * hz / sr;
                *s = (0.6 * phase.sin()) as f32;
            }
        }
    }
    Waveform {
        samples,
        sample_rate,
    }
}

/// Writes WAVs, alignment TSVs and `manifest.jsonl` into `dir`.
pub fn write_corpus(dir: &Path, corpus: &[ToyUtterance], sample_rate: u32) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut utts = Vec::with_capacity(corpus.len());
    for t in corpus {
        let u = &t.utterance;
        let wav = dir.join(&u.audio_path);
        let tsv = dir.join(&u.alignment_path);
        write_wav(&wav, &render(t, sample_rate))?;
        fs::write(&tsv, format_alignment(&u.symbols)).map_err(|e| Error::io(&tsv, e))?;
        utts.push(Utterance {
            audio_path: wav,
            alignment_path: tsv,
            ..u.clone()
        });
    }
    let manifest = dir.join("manifest.jsonl");
    save_manifest(&manifest, &utts)?;
    Ok(manifest)
}
