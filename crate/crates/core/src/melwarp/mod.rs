//! Mel-domain f0 warping and feature extraction.
//!
//! The warp never resamples the spectrum: each DFT bin keeps its power and
//! only its Mel coordinate moves by `-delta_mel`, after which fixed triangular
//! filters are evaluated at the moved coordinates.

mod config;
mod dct;
mod features;
mod filterbank;
mod frames;
mod scale;
mod warp;

pub use config::{FeatureConfig, FeatureKind, BASELINE_HI_FREQ, WARPED_HI_FREQ};
pub use dct::Dct;
pub use features::{extract_features, mean_frame_distance, Extractor, FeatureMatrix, FeatureMeta};
pub use filterbank::{build_filterbank, MelFilterbank};
pub use frames::{frame_and_window, hamming, power_spectrum, PowerSpectrum};
pub use scale::{hz_to_mel, mel_to_hz};
pub use warp::{compute_warp, warp_bin_mels, WarpSpec, MAX_SHIFT_MEL};
