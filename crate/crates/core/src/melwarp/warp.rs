//! The f0 warp: every DFT bin's Mel coordinate is shifted by
//! `-(mel(f0_utt) - mel(f0_def))`, so the speaker's median f0 lands where the
//! default f0 sits.

use serde::{Deserialize, Serialize};

use super::scale::{hz_to_mel, mel_unchecked};
use crate::error::{Error, Result};

/// Largest Mel shift the 6.2 kHz warped bandwidth keeps below Nyquist.
pub const MAX_SHIFT_MEL: f64 = 250.0;

/// Shifts are held on a 1e-9 Mel grid so that equivalent (f0_utt, f0_def)
/// pairs reached through different float paths produce identical features.
const SHIFTS_PER_MEL: f64 = 1e9;

/// An (f0_utt, f0_def) pair and the Mel shift it induces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpSpec {
    pub f0_utt: f64,
    pub f0_def: f64,
    pub delta_mel: f64,
    pub clamped: bool,
}

impl WarpSpec {
    /// The no-op warp (f0_utt == f0_def).
    pub fn identity(f0_def: f64) -> Self {
        Self {
            f0_utt: f0_def,
            f0_def,
            delta_mel: 0.0,
            clamped: false,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.delta_mel == 0.0
    }
}

pub(crate) fn quantize_shift(delta: f64) -> f64 {
    let q = (delta * SHIFTS_PER_MEL).round() / SHIFTS_PER_MEL;
    // normalize -0.0
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

/// Builds the warp for an utterance median `f0_utt` mapped onto `f0_def`.
pub fn compute_warp(f0_utt: f64, f0_def: f64) -> Result<WarpSpec> {
    for (name, f) in [("f0_utt", f0_utt), ("f0_def", f0_def)] {
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive, got {f}")));
        }
    }
    let raw = hz_to_mel(f0_utt)? - hz_to_mel(f0_def)?;
    Ok(from_raw_delta(f0_utt, f0_def, raw))
}

pub(crate) fn from_raw_delta(f0_utt: f64, f0_def: f64, raw: f64) -> WarpSpec {
    let clamped = raw.abs() > MAX_SHIFT_MEL;
    WarpSpec {
        f0_utt,
        f0_def,
        delta_mel: quantize_shift(raw.clamp(-MAX_SHIFT_MEL, MAX_SHIFT_MEL)),
        clamped,
    }
}

/// Mel coordinate of every one-sided DFT bin after the warp:
/// `mel(k * sample_rate / dft_size) - delta_mel` for `k = 0..=dft_size/2`.
pub fn warp_bin_mels(dft_size: usize, sample_rate: u32, warp: &WarpSpec) -> Vec<f64> {
    let bin_hz = f64::from(sample_rate) / dft_size as f64;
    (0..=dft_size / 2)
        .map(|k| mel_unchecked(k as f64 * bin_hz) - warp.delta_mel)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melwarp::scale::mel_to_hz;
    use proptest::prelude::*;

    #[test]
    fn identity_pair() {
        let w = compute_warp(100.0, 100.0).unwrap();
        assert_eq!(w.delta_mel, 0.0);
        assert!(!w.clamped);
    }

    #[test]
    fn child_to_adult() {
        let w = compute_warp(270.0, 100.0).unwrap();
        let expected = 1127.0 * (1.0 + 270.0f64 / 700.0).ln() - 1127.0 * (1.0 + 100.0f64 / 700.0).ln();
        assert!((w.delta_mel - expected).abs() < 1e-9);
        assert!((w.delta_mel - 217.2).abs() < 0.05);
        assert!(!w.clamped);
    }

    #[test]
    fn extreme_pair_is_clamped() {
        let w = compute_warp(1000.0, 100.0).unwrap();
        assert!(w.clamped);
        assert_eq!(w.delta_mel, 250.0);
        let w = compute_warp(100.0, 1000.0).unwrap();
        assert!(w.clamped);
        assert_eq!(w.delta_mel, -250.0);
    }

    #[test]
    fn non_positive_is_domain_error() {
        assert!(matches!(compute_warp(0.0, 100.0), Err(Error::Domain(_))));
        assert!(matches!(compute_warp(100.0, -5.0), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_warp_gives_plain_mel() {
        let mels = warp_bin_mels(512, 16_000, &WarpSpec::identity(100.0));
        assert_eq!(mels.len(), 257);
        for (k, m) in mels.iter().enumerate() {
            assert_eq!(*m, mel_unchecked(k as f64 * 31.25));
        }
    }

    #[test]
    fn child_f0_lands_on_default() {
        let w = compute_warp(270.0, 100.0).unwrap();
        let coord = mel_unchecked(270.0) - w.delta_mel;
        assert!((coord - mel_unchecked(100.0)).abs() < 1e-8);
        assert!((coord - 150.5).abs() < 0.05);
    }

    #[test]
    fn equivalent_pairs_share_a_shift() {
        let a = compute_warp(270.0, 100.0).unwrap();
        let d = mel_to_hz(mel_unchecked(400.0) - a.delta_mel).unwrap();
        let b = compute_warp(400.0, d).unwrap();
        assert_eq!(a.delta_mel.to_bits(), b.delta_mel.to_bits());
    }

    proptest! {
        #[test]
        fn coordinates_strictly_increasing(delta in -250.0f64..250.0) {
            let w = from_raw_delta(100.0, 100.0, delta);
            let mels = warp_bin_mels(512, 16_000, &w);
            prop_assert!(mels.windows(2).all(|p| p[0] < p[1]));
        }

        #[test]
        fn shift_is_mel_difference(u in 20.0f64..600.0, d in 20.0f64..600.0) {
            let w = compute_warp(u, d).unwrap();
            let raw = mel_unchecked(u) - mel_unchecked(d);
            prop_assert_eq!(w.clamped, raw.abs() > MAX_SHIFT_MEL);
            prop_assert!(w.delta_mel.abs() <= MAX_SHIFT_MEL);
            if !w.clamped {
                prop_assert!((w.delta_mel - raw).abs() <= 1e-9);
            }
        }
    }
}
