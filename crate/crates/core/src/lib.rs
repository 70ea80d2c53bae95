//! f0-based frequency normalization and f0-perturbation augmentation for
//! Mel filterbank and MFCC features.
//!
//! Both operations are a constant shift of every DFT bin's Mel coordinate by
//! `mel(f0_utt) - mel(f0_def)`: normalization sets `f0_utt` to the utterance's
//! median f0 and holds `f0_def` fixed; perturbation varies `f0_def` around its
//! default to produce extra training variants.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audio;
pub mod augment;
pub mod error;
pub mod melwarp;
pub mod pipeline;
pub mod pitch;
pub mod synth;

pub use audio::{read_wav, write_wav, AudioBuffer, SAMPLE_RATE};
pub use augment::{augment_utterance, make_plan, AugmentationPlan, PlanEntry, DEFAULT_F0_DEF, DEFAULT_SHIFTS_MEL};
pub use error::{Error, Result};
pub use melwarp::{
    build_filterbank, compute_warp, extract_features, hz_to_mel, mel_to_hz, warp_bin_mels, FeatureConfig,
    FeatureKind, FeatureMatrix, MelFilterbank, WarpSpec,
};
pub use pitch::{detect_pitch, median_f0, PitchConfig, PitchDetector, PitchTrack, UtteranceF0};
pub use synth::{shift_vowel_for_f0, synth_harmonic, synth_vowel, VowelSpec};
