//! Phoneme-level prosody tokens for multi-speaker speech corpora.
//!
//! The pipeline extracts per-phone mean F0 and duration from aligned audio,
//! z-normalises F0 per speaker, augments the feature set with pitch and rate
//! transforms, and fits a speaker-independent model: k-means centroids over the
//! pooled normalised F0 and balanced equal-count duration intervals per phone.
//! Utterances are then labelled with one F0 and one duration token per phone,
//! tokens can be shifted or pinned for control, and new speakers are added by
//! fitting only their F0 statistics against the frozen clusters.
//!
//! With the default `parallel` feature the data-parallel loops (F0 frames,
//! utterances, k-means restarts, per-phone fits) run on rayon; without it the
//! same code runs sequentially and produces identical output.

pub mod augment;
pub mod cluster;
pub mod data;
pub mod error;
pub mod features;
pub mod label;
pub mod norm;
pub mod par;
pub mod pipeline;
pub mod pitch;
pub mod select;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use types::*;
