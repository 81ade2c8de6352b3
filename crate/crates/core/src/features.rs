//! Per-phone mean F0 and duration from an alignment and an F0 track.

use crate::error::{Error, Result};
use crate::pitch::F0Track;
use crate::types::{PhoneFeature, Utterance};

/// One record per phone, in order. A frame belongs to a phone when its centre
/// lies in the half-open interval `[start_s, end_s)`.
///
/// Phones may end up to one hop past the last frame: the tail of the audio
/// shorter than a hop never gets a frame of its own.
pub fn phone_features(u: &Utterance, track: &F0Track) -> Result<Vec<PhoneFeature>> {
    let extent = track.extent_s();
    let slack = track.hop_s + 1e-6;
    let n = track.frames.len();

    u.phones()
        .enumerate()
        .map(|(phone_index, (label, span))| {
            if n == 0 || span.end_s > extent + slack {
                return Err(Error::TrackExtent {
                    utterance: u.id.clone(),
                    phone_index,
                    end_s: span.end_s,
                    extent_s: extent,
                });
            }
            let first = ((span.start_s - track.offset_s) / track.hop_s)
                .floor()
                .max(0.0) as usize;
            let (mut sum, mut count) = (0.0f64, 0usize);
            for i in first.saturating_sub(1)..n {
                let c = track.frame_center_s(i);
                if c >= span.end_s {
                    break;
                }
                if c < span.start_s {
                    continue;
                }
                if let Some(f0) = track.frames[i] {
                    sum += f64::from(f0);
                    count += 1;
                }
            }
            Ok(PhoneFeature {
                utterance_id: u.id.clone(),
                phone_index,
                phone: label.to_string(),
                speaker: u.speaker.clone(),
                duration_s: span.duration_s(),
                f0_hz: (count > 0).then(|| sum / count as f64),
            })
        })
        .collect()
}
