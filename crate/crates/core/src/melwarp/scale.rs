//! Mel scale, natural-log form: `mel = 1127 ln(1 + f / 700)`.
//!
//! These constants reproduce the perturbed default-f0 set
//! {58.52, 72.10, ..., 143.74} Hz to two decimals, which pins them down.

use crate::error::{Error, Result};

const MEL_FACTOR: f64 = 1127.0;
const MEL_BREAK_HZ: f64 = 700.0;

/// Converts Hz to Mels. Negative (or NaN) frequencies are a domain error.
pub fn hz_to_mel(hz: f64) -> Result<f64> {
    if !(hz >= 0.0) || !hz.is_finite() {
        return Err(Error::Domain(format!("frequency must be >= 0 Hz, got {hz}")));
    }
    Ok(mel_unchecked(hz))
}

/// Converts Mels back to Hz. Exact inverse of [`hz_to_mel`].
pub fn mel_to_hz(mel: f64) -> Result<f64> {
    if !(mel >= 0.0) || !mel.is_finite() {
        return Err(Error::Domain(format!("Mel value must be >= 0, got {mel}")));
    }
    Ok(hz_unchecked(mel))
}

#[inline]
pub(crate) fn mel_unchecked(hz: f64) -> f64 {
    MEL_FACTOR * (hz / MEL_BREAK_HZ).ln_1p()
}

#[inline]
pub(crate) fn hz_unchecked(mel: f64) -> f64 {
    MEL_BREAK_HZ * (mel / MEL_FACTOR).exp_m1()
}
