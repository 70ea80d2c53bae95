//! f0 perturbation: re-extract one utterance under several default-f0 values.
//!
//! A plan entry with Mel offset `s` uses `f0_def = mel_to_hz(mel(base) - s)`,
//! so the resulting warp is `mel(f0_utt) - mel(base) + s`. Raising the default
//! f0 therefore moves the shift negative.

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::melwarp::{compute_warp, hz_to_mel, mel_to_hz, Extractor, FeatureConfig, FeatureMatrix};
use crate::pitch::UtteranceF0;

/// Default f0 the acoustic space is mapped to (an adult male value).
pub const DEFAULT_F0_DEF: f64 = 100.0;

/// The seven offsets giving a x7 data multiplier.
pub const DEFAULT_SHIFTS_MEL: [f64; 7] = [0.0, 20.0, -20.0, 40.0, -40.0, 60.0, -60.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub shift_mel: f64,
    pub f0_def: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationPlan {
    pub base_f0_def: f64,
    pub entries: Vec<PlanEntry>,
}

impl AugmentationPlan {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Single zero-shift entry: plain extraction.
    pub fn single(base_f0_def: f64) -> Result<Self> {
        make_plan(base_f0_def, &[0.0])
    }

    /// True if any entry moves the bins.
    pub fn perturbs(&self) -> bool {
        self.entries.iter().any(|e| e.shift_mel != 0.0)
    }
}

impl Default for AugmentationPlan {
    fn default() -> Self {
        make_plan(DEFAULT_F0_DEF, &DEFAULT_SHIFTS_MEL).expect("default plan is valid")
    }
}

pub fn make_plan(base_f0_def: f64, shifts_mel: &[f64]) -> Result<AugmentationPlan> {
    if !(base_f0_def > 0.0) || !base_f0_def.is_finite() {
        return Err(Error::Domain(format!("base f0_def must be positive, got {base_f0_def}")));
    }
    let base_mel = hz_to_mel(base_f0_def)?;
    let mut entries = Vec::with_capacity(shifts_mel.len());
    for (i, &shift) in shifts_mel.iter().enumerate() {
        if !shift.is_finite() {
            return Err(Error::Domain(format!("shift {shift} is not finite")));
        }
        if shifts_mel[..i].contains(&shift) {
            return Err(Error::DuplicateShift(shift));
        }
        let f0_def = if shift == 0.0 {
            base_f0_def
        } else {
            let target = base_mel - shift;
            if !(target > 0.0) {
                return Err(Error::Domain(format!(
                    "shift {shift} Mel pushes f0_def to or below 0 Hz"
                )));
            }
            mel_to_hz(target)?
        };
        entries.push(PlanEntry { shift_mel: shift, f0_def });
    }
    if !shifts_mel.contains(&0.0) {
        return Err(Error::MissingZeroShift);
    }
    Ok(AugmentationPlan {
        base_f0_def,
        entries,
    })
}

/// Extracts one feature matrix per plan entry.
///
/// With `normalize`, the warp source is the utterance median f0; otherwise the
/// base default, so only the perturbation offset remains. Clamped variants
/// are kept and flagged in their metadata.
pub fn augment_utterance(
    buffer: &AudioBuffer,
    cfg: &FeatureConfig,
    plan: &AugmentationPlan,
    normalize: bool,
    f0: &UtteranceF0,
) -> Result<Vec<FeatureMatrix>> {
    let mut extractor = Extractor::new(cfg.clone())?;
    augment_with(&mut extractor, buffer, plan, normalize, f0)
}

pub(crate) fn augment_with(
    extractor: &mut Extractor,
    buffer: &AudioBuffer,
    plan: &AugmentationPlan,
    normalize: bool,
    f0: &UtteranceF0,
) -> Result<Vec<FeatureMatrix>> {
    let f0_utt = if normalize { f0.f0_utt } else { plan.base_f0_def };
    plan.entries
        .iter()
        .map(|entry| {
            let warp = compute_warp(f0_utt, entry.f0_def)?;
            let mut m = extractor.extract(buffer, &warp)?;
            m.meta.shift_mel = entry.shift_mel;
            Ok(m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melwarp::{extract_features, WarpSpec};
    use crate::synth::synth_harmonic;

    const PAPER_SET: [(f64, f64); 7] = [
        (60.0, 58.52),
        (40.0, 72.10),
        (20.0, 85.93),
        (0.0, 100.00),
        (-20.0, 114.32),
        (-40.0, 128.90),
        (-60.0, 143.74),
    ];

    #[test]
    fn default_plan_reproduces_the_default_f0_set() {
        let plan = AugmentationPlan::default();
        assert_eq!(plan.len(), 7);
        for (shift, hz) in PAPER_SET {
            let e = plan.entries.iter().find(|e| e.shift_mel == shift).unwrap();
            assert!((e.f0_def - hz).abs() <= 0.02, "shift {shift}: {} vs {hz}", e.f0_def);
        }
    }

    #[test]
    fn zero_only_plan() {
        let plan = make_plan(100.0, &[0.0]).unwrap();
        assert_eq!(plan.entries, vec![PlanEntry { shift_mel: 0.0, f0_def: 100.0 }]);
        assert!(!plan.perturbs());
    }

    #[test]
    fn validation() {
        assert!(matches!(make_plan(100.0, &[0.0, 20.0, 20.0]), Err(Error::DuplicateShift(s)) if s == 20.0));
        assert!(matches!(make_plan(100.0, &[20.0, -20.0]), Err(Error::MissingZeroShift)));
        assert!(make_plan(100.0, &[0.0, 200.0]).is_err());
        assert!(make_plan(-1.0, &[0.0]).is_err());
    }

    fn voiced(f0_utt: f64) -> UtteranceF0 {
        UtteranceF0 { f0_utt, voiced_count: 10, fallback_used: false }
    }

    #[test]
    fn fan_out_matches_plan() {
        let audio = synth_harmonic(150.0, 0.3, 0.5).unwrap();
        let out = augment_utterance(&audio, &FeatureConfig::warped(), &AugmentationPlan::default(), true, &voiced(150.0)).unwrap();
        assert_eq!(out.len(), 7);
        let shifts: Vec<f64> = out.iter().map(|m| m.meta.shift_mel).collect();
        assert_eq!(shifts, DEFAULT_SHIFTS_MEL.to_vec());
    }

    #[test]
    fn unnormalized_zero_shift_is_plain_extraction() {
        let cfg = FeatureConfig::warped();
        let audio = synth_harmonic(150.0, 0.3, 0.5).unwrap();
        let out = augment_utterance(&audio, &cfg, &AugmentationPlan::default(), false, &voiced(270.0)).unwrap();
        let plain = extract_features(&audio, &cfg, &WarpSpec::identity(100.0)).unwrap();
        assert!(out[0].same_values(&plain));
        assert_eq!(out[0].meta.warp.delta_mel, 0.0);
    }

    #[test]
    fn normalized_zero_shift_is_plain_normalization() {
        let cfg = FeatureConfig::warped();
        let audio = synth_harmonic(150.0, 0.3, 0.5).unwrap();
        let out = augment_utterance(&audio, &cfg, &AugmentationPlan::default(), true, &voiced(270.0)).unwrap();
        let plain = extract_features(&audio, &cfg, &compute_warp(270.0, 100.0).unwrap()).unwrap();
        assert!(out[0].same_values(&plain));
    }

    #[test]
    fn composition_with_normalization() {
        let cfg = FeatureConfig::warped();
        let audio = synth_harmonic(150.0, 0.3, 0.5).unwrap();
        let out = augment_utterance(&audio, &cfg, &AugmentationPlan::default(), true, &voiced(270.0)).unwrap();
        let base = hz_to_mel(270.0).unwrap() - hz_to_mel(100.0).unwrap();
        assert!((out[0].meta.warp.delta_mel - 217.2).abs() < 0.05);
        for m in &out {
            let expected = base + m.meta.shift_mel;
            if expected.abs() <= 250.0 {
                assert!(!m.meta.warp.clamped);
                assert!((m.meta.warp.delta_mel - expected).abs() <= 1e-9);
            } else {
                assert!(m.meta.warp.clamped);
                assert_eq!(m.meta.warp.delta_mel, 250.0);
            }
        }
        // f0_def = 143.74 Hz entry sits 60 Mel lower
        let high = out.iter().find(|m| m.meta.shift_mel == -60.0).unwrap();
        assert!((high.meta.warp.f0_def - 143.74).abs() < 0.01);
        assert!((high.meta.warp.delta_mel - 157.2).abs() < 0.05);
    }

    #[test]
    fn extreme_f0_keeps_clamped_variants() {
        let cfg = FeatureConfig::warped();
        let audio = synth_harmonic(150.0, 0.3, 0.5).unwrap();
        let out = augment_utterance(&audio, &cfg, &AugmentationPlan::default(), true, &voiced(480.0)).unwrap();
        assert_eq!(out.len(), 7);
        assert!(out.iter().any(|m| m.meta.warp.clamped));
        assert!(out.iter().all(|m| m.meta.warp.delta_mel <= 250.0));
    }

    #[test]
    fn fallback_utterance_gets_shift_only() {
        let cfg = FeatureConfig::warped();
        let audio = AudioBuffer::new(vec![0.0; 4_000], 16_000, "quiet").unwrap();
        let f0 = UtteranceF0 { f0_utt: 100.0, voiced_count: 0, fallback_used: true };
        let out = augment_utterance(&audio, &cfg, &AugmentationPlan::default(), true, &f0).unwrap();
        for m in &out {
            assert!((m.meta.warp.delta_mel - m.meta.shift_mel).abs() <= 1e-9);
        }
    }
}
