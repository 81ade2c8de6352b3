//! Framewise F0 estimation with a YIN-style detector.
//!
//! For each frame the squared difference function
//! `d(tau) = sum_j (x[j] - x[j + tau])^2` is normalised by its cumulative mean,
//! `d'(tau) = d(tau) * tau / sum_{i=1..tau} d(i)`. The first lag whose `d'`
//! drops below the threshold is followed down to its local minimum, refined
//! with a parabola through `d`, and converted to Hz. Frames with no such dip
//! are unvoiced.

use std::path::Path;

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Config("sample rate must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::Config("empty waveform".into()));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

/// Reads a mono PCM WAV file (integer or float samples).
pub fn read_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let audio_err = |message: String| Error::Audio {
        path: path.to_path_buf(),
        message,
    };
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => audio_err(other.to_string()),
    })?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(audio_err(format!(
            "expected mono audio, got {} channels",
            spec.channels
        )));
    }
    let samples: Vec<f32> = match spec.sample_format {
        hound::SampleFormat::Float => reader
            .into_samples::<f32>()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| audio_err(e.to_string()))?,
        hound::SampleFormat::Int => {
            let scale = 1.0 / (1u64 << (spec.bits_per_sample - 1)) as f32;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f32 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| audio_err(e.to_string()))?
        }
    };
    Waveform::new(samples, spec.sample_rate).map_err(|e| audio_err(e.to_string()))
}

/// Writes 16-bit mono PCM.
pub fn write_wav(path: impl AsRef<Path>, wave: &Waveform) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: wave.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let wrap = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Audio {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(wrap)?;
    for &s in &wave.samples {
        let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        w.write_sample(v).map_err(wrap)?;
    }
    w.finalize().map_err(wrap)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchConfig {
    pub f_min: f64,
    pub f_max: f64,
    pub frame_s: f64,
    pub hop_s: f64,
    pub yin_threshold: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            f_min: 50.0,
            f_max: 600.0,
            frame_s: 0.040,
            hop_s: 0.010,
            yin_threshold: 0.15,
        }
    }
}

/// Frame geometry in samples for a given sample rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Framing {
    pub frame: usize,
    pub hop: usize,
    pub tau_min: usize,
    pub tau_max: usize,
}

impl PitchConfig {
    pub fn framing(&self, sample_rate: u32) -> Result<Framing> {
        let sr = f64::from(sample_rate);
        let ok = self.f_min.is_finite()
            && self.f_max.is_finite()
            && self.f_min > 0.0
            && self.f_min < self.f_max
            && self.f_max < sr / 2.0;
        if !ok {
            return Err(Error::Config(format!(
                "need 0 < f_min < f_max < sample_rate/2, got f_min={} f_max={} sample_rate={}",
                self.f_min, self.f_max, sample_rate
            )));
        }
        if !(self.yin_threshold > 0.0 && self.yin_threshold < 1.0) {
            return Err(Error::Config(format!(
                "yin_threshold must be in (0, 1), got {}",
                self.yin_threshold
            )));
        }
        if !(self.hop_s > 0.0 && self.frame_s > 0.0) {
            return Err(Error::Config("frame_s and hop_s must be positive".into()));
        }
        let frame = (self.frame_s * sr).round() as usize;
        let hop = ((self.hop_s * sr).round() as usize).max(1);
        let min_frame = 2.0 * sr / self.f_min;
        if (frame as f64) < min_frame - 1e-9 {
            return Err(Error::Config(format!(
                "frame of {frame} samples is shorter than two periods of f_min ({} samples)",
                min_frame.ceil()
            )));
        }
        // one extra lag is needed on the right for the parabola
        let tau_max = ((sr / self.f_min).ceil() as usize).min(frame / 2);
        let tau_min = ((sr / self.f_max).floor() as usize).max(2);
        Ok(Framing {
            frame,
            hop,
            tau_min,
            tau_max,
        })
    }
}

/// Framewise F0 in Hz, `None` for unvoiced frames.
#[derive(Debug, Clone, PartialEq)]
pub struct F0Track {
    pub hop_s: f64,
    /// Time of the first frame's centre.
    pub offset_s: f64,
    pub frames: Vec<Option<f32>>,
}

impl F0Track {
    pub fn frame_center_s(&self, i: usize) -> f64 {
        self.offset_s + i as f64 * self.hop_s
    }

    /// End of the audio covered by the frames.
    pub fn extent_s(&self) -> f64 {
        if self.frames.is_empty() {
            0.0
        } else {
            self.frame_center_s(self.frames.len() - 1) + self.offset_s
        }
    }

    pub fn voiced_fraction(&self) -> f64 {
        if self.frames.is_empty() {
            return 0.0;
        }
        self.frames.iter().filter(|f| f.is_some()).count() as f64 / self.frames.len() as f64
    }
}

pub fn num_frames(len: usize, frame: usize, hop: usize) -> usize {
    if len < frame {
        0
    } else {
        (len - frame) / hop + 1
    }
}

pub fn extract_f0(wave: &Waveform, cfg: &PitchConfig) -> Result<F0Track> {
    let fr = cfg.framing(wave.sample_rate)?;
    let sr = f64::from(wave.sample_rate);
    let n = num_frames(wave.samples.len(), fr.frame, fr.hop);
    let samples: Vec<f64> = wave.samples.iter().map(|&s| f64::from(s)).collect();
    let frames = par::map_range(n, |i| {
        let start = i * fr.hop;
        frame_f0(&samples[start..start + fr.frame], sr, &fr, cfg)
    });
    Ok(F0Track {
        hop_s: fr.hop as f64 / sr,
        offset_s: fr.frame as f64 / (2.0 * sr),
        frames,
    })
}

fn frame_f0(x: &[f64], sr: f64, fr: &Framing, cfg: &PitchConfig) -> Option<f32> {
    let lags = fr.tau_max + 1;
    let window = x.len() - lags;
    let mut diff = vec![0.0f64; lags + 1];
    for (tau, d) in diff.iter_mut().enumerate().skip(1) {
        *d = x[..window]
            .iter()
            .zip(&x[tau..tau + window])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
    }

    let mut cmnd = vec![1.0f64; lags + 1];
    let mut running = 0.0;
    for tau in 1..=lags {
        running += diff[tau];
        cmnd[tau] = if running > 0.0 {
            diff[tau] * tau as f64 / running
        } else {
            1.0
        };
    }

    let mut tau = (fr.tau_min..=fr.tau_max).find(|&t| cmnd[t] < cfg.yin_threshold)?;
    while tau < fr.tau_max && cmnd[tau + 1] < cmnd[tau] {
        tau += 1;
    }

    let (a, b, c) = (diff[tau - 1], diff[tau], diff[tau + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom > 0.0 {
        (0.5 * (a - c) / denom).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let f0 = sr / (tau as f64 + shift);
    (f0 >= cfg.f_min && f0 <= cfg.f_max).then_some(f0 as f32)
}
