//! Binary F0 track cache, little-endian:
//!
//! ```text
//! magic  b"F0TK"
//! f64    hop_s
//! f64    offset_s   (centre of frame 0)
//! u32    frame count
//! f32 *  f0 per frame, NaN = unvoiced
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::create_file;
use crate::error::{Error, Result};
use crate::pitch::F0Track;

const MAGIC: &[u8; 4] = b"F0TK";
const HEADER_LEN: usize = 4 + 8 + 8 + 4;

pub fn encode_track(track: &F0Track) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 4 * track.frames.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&track.hop_s.to_le_bytes());
    buf.extend_from_slice(&track.offset_s.to_le_bytes());
    buf.extend_from_slice(&(track.frames.len() as u32).to_le_bytes());
    for f in &track.frames {
        buf.extend_from_slice(&f.unwrap_or(f32::NAN).to_le_bytes());
    }
    buf
}

pub fn decode_track(bytes: &[u8], path: &Path) -> Result<F0Track> {
    let bad = |m: &str| Error::parse(path, 0, m.to_string());
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("not an F0 track file"));
    }
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let hop_s = f64_at(4);
    let offset_s = f64_at(12);
    let n = u32::from_le_bytes(bytes[20..24].try_into().unwrap()) as usize;
    if bytes.len() != HEADER_LEN + 4 * n {
        return Err(bad("frame count does not match file length"));
    }
    if !(hop_s > 0.0 && offset_s >= 0.0) {
        return Err(bad("invalid track header"));
    }
    let frames = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| {
            let v = f32::from_le_bytes(c.try_into().unwrap());
            (!v.is_nan()).then_some(v)
        })
        .collect();
    Ok(F0Track {
        hop_s,
        offset_s,
        frames,
    })
}

pub fn write_track(path: impl AsRef<Path>, track: &F0Track) -> Result<()> {
    let path = path.as_ref();
    let mut f = create_file(path)?;
    f.write_all(&encode_track(track))
        .map_err(|e| Error::io(path, e))
}

pub fn read_track(path: impl AsRef<Path>) -> Result<F0Track> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_track(&bytes, path)
}
