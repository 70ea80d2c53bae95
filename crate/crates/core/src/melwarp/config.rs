use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::audio::SAMPLE_RATE;
use crate::error::{Error, Result};

/// Upper band edge for unwarped extraction.
pub const BASELINE_HI_FREQ: f64 = 8_000.0;
/// Upper band edge whenever any warp (normalization or perturbation) is active.
pub const WARPED_HI_FREQ: f64 = 6_200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    LogMel,
    Mfcc,
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeatureKind::LogMel => "log-mel",
            FeatureKind::Mfcc => "mfcc",
        })
    }
}

/// Front-end parameters. Defaults: 25 ms Hamming window, 10 ms hop,
/// 512-point DFT, 23 filters over 20 Hz - 8 kHz, 13 cepstra including c0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub sample_rate: u32,
    /// Seconds.
    pub window: f64,
    /// Seconds.
    pub hop: f64,
    pub dft_size: usize,
    pub num_filters: usize,
    pub lo_freq: f64,
    pub hi_freq: f64,
    pub num_ceps: usize,
    pub preemphasis: f64,
    pub log_floor: f64,
    pub kind: FeatureKind,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self::baseline()
    }
}

impl FeatureConfig {
    pub fn baseline() -> Self {
        Self {
            sample_rate: SAMPLE_RATE,
            window: 0.025,
            hop: 0.010,
            dft_size: 512,
            num_filters: 23,
            lo_freq: 20.0,
            hi_freq: BASELINE_HI_FREQ,
            num_ceps: 13,
            preemphasis: 0.97,
            log_floor: 1e-10,
            kind: FeatureKind::Mfcc,
        }
    }

    /// Baseline parameters with the band limited to 6.2 kHz.
    pub fn warped() -> Self {
        Self {
            hi_freq: WARPED_HI_FREQ,
            ..Self::baseline()
        }
    }

    /// The 15-filter, 20 Hz - 6 kHz log-Mel filterbank used for the vowel
    /// alignment demonstration.
    pub fn vowel_demo() -> Self {
        Self {
            num_filters: 15,
            hi_freq: 6_000.0,
            kind: FeatureKind::LogMel,
            ..Self::baseline()
        }
    }

    pub fn with_kind(mut self, kind: FeatureKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn window_samples(&self) -> usize {
        (self.window * f64::from(self.sample_rate)).round() as usize
    }

    pub fn hop_samples(&self) -> usize {
        (self.hop * f64::from(self.sample_rate)).round() as usize
    }

    /// Output dimensionality for the configured feature kind.
    pub fn dims(&self) -> usize {
        match self.kind {
            FeatureKind::LogMel => self.num_filters,
            FeatureKind::Mfcc => self.num_ceps,
        }
    }

    /// Frames produced from `n` samples (no padding, partial tail dropped).
    pub fn num_frames(&self, n: usize) -> usize {
        let w = self.window_samples();
        if n < w {
            0
        } else {
            1 + (n - w) / self.hop_samples()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let nyquist = f64::from(self.sample_rate) / 2.0;
        if self.sample_rate == 0 {
            return bad("sample rate must be positive".into());
        }
        if !(self.lo_freq >= 0.0 && self.lo_freq < self.hi_freq && self.hi_freq <= nyquist) {
            return bad(format!(
                "need 0 <= lo_freq < hi_freq <= {nyquist} Hz, got lo {} hi {}",
                self.lo_freq, self.hi_freq
            ));
        }
        if self.num_filters == 0 {
            return bad("num_filters must be positive".into());
        }
        if self.num_ceps == 0 || self.num_ceps > self.num_filters {
            return bad(format!(
                "num_ceps must be in 1..={}, got {}",
                self.num_filters, self.num_ceps
            ));
        }
        let w = self.window_samples();
        if w == 0 || self.hop_samples() == 0 {
            return bad("window and hop must span at least one sample".into());
        }
        if self.dft_size < w {
            return bad(format!("dft_size {} is shorter than the {w}-sample window", self.dft_size));
        }
        if !(0.0..1.0).contains(&self.preemphasis) {
            return bad(format!("preemphasis must be in [0, 1), got {}", self.preemphasis));
        }
        if !(self.log_floor > 0.0) {
            return bad("log_floor must be positive".into());
        }
        Ok(())
    }

    /// Short stable hash of every parameter, recorded with each feature matrix.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&canonical)[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sample_counts() {
        let cfg = FeatureConfig::default();
        assert_eq!(cfg.window_samples(), 400);
        assert_eq!(cfg.hop_samples(), 160);
        assert_eq!(cfg.num_frames(16_000), 98);
        assert_eq!(cfg.num_frames(400), 1);
        assert_eq!(cfg.num_frames(399), 0);
        cfg.validate().unwrap();
        FeatureConfig::warped().validate().unwrap();
        FeatureConfig::vowel_demo().validate().unwrap();
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = FeatureConfig::default();
        cfg.hi_freq = 9_000.0;
        assert!(cfg.validate().is_err());
        let mut cfg = FeatureConfig::default();
        cfg.num_ceps = 30;
        assert!(cfg.validate().is_err());
        let mut cfg = FeatureConfig::default();
        cfg.dft_size = 256;
        assert!(cfg.validate().is_err());
        let mut cfg = FeatureConfig::default();
        cfg.lo_freq = 8_000.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn fingerprint_tracks_parameters() {
        let a = FeatureConfig::baseline();
        assert_eq!(a.fingerprint(), FeatureConfig::baseline().fingerprint());
        assert_ne!(a.fingerprint(), FeatureConfig::warped().fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
    }
}
