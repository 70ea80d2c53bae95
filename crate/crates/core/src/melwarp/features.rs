use serde::{Deserialize, Serialize};

use super::config::{FeatureConfig, FeatureKind};
use super::dct::Dct;
use super::filterbank::build_filterbank;
use super::frames::{frame_and_window, PowerSpectrum};
use super::warp::{warp_bin_mels, WarpSpec};
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Provenance carried with every feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub source_id: String,
    pub warp: WarpSpec,
    /// Perturbation offset this variant was extracted with (0 when unperturbed).
    pub shift_mel: f64,
    pub kind: FeatureKind,
    pub hi_freq: f64,
    pub config_fingerprint: String,
}

/// Row-major `frames x dims` matrix of log-Mel energies or cepstra.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    pub meta: FeatureMeta,
}

impl FeatureMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    /// Bitwise equality of the values, ignoring metadata.
    pub fn same_values(&self, other: &FeatureMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Reusable extraction state: FFT plan and DCT basis for one config.
///
/// Not `Sync` because the FFT scratch is mutable; build one per worker.
pub struct Extractor {
    cfg: FeatureConfig,
    power: PowerSpectrum,
    dct: Dct,
}

impl Extractor {
    pub fn new(cfg: FeatureConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            power: PowerSpectrum::new(cfg.dft_size),
            dct: Dct::new(cfg.num_filters, cfg.num_ceps),
            cfg,
        })
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.cfg
    }

    pub fn extract(&mut self, buffer: &AudioBuffer, warp: &WarpSpec) -> Result<FeatureMatrix> {
        let cfg = &self.cfg;
        if buffer.sample_rate() != cfg.sample_rate {
            return Err(Error::RateMismatch {
                expected: cfg.sample_rate,
                found: buffer.sample_rate(),
            });
        }
        let bin_mels = warp_bin_mels(cfg.dft_size, cfg.sample_rate, warp);
        let bank = build_filterbank(cfg, &bin_mels)?;
        let frames = frame_and_window(buffer, cfg)?;

        let dims = cfg.dims();
        let mut values = Vec::with_capacity(frames.len() * dims);
        let mut spectrum = vec![0.0; cfg.dft_size / 2 + 1];
        let mut energies = vec![0.0; cfg.num_filters];
        let mut ceps = vec![0.0; cfg.num_ceps];
        for frame in &frames {
            self.power.compute(frame, &mut spectrum);
            bank.apply(&spectrum, &mut energies);
            for e in energies.iter_mut() {
                *e = e.max(cfg.log_floor).ln();
            }
            match cfg.kind {
                FeatureKind::LogMel => values.extend_from_slice(&energies),
                FeatureKind::Mfcc => {
                    self.dct.forward(&energies, &mut ceps);
                    values.extend_from_slice(&ceps);
                }
            }
        }
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Ok(FeatureMatrix {
            rows: frames.len(),
            cols: dims,
            values,
            meta: FeatureMeta {
                source_id: buffer.source_id().to_owned(),
                warp: *warp,
                shift_mel: 0.0,
                kind: cfg.kind,
                hi_freq: cfg.hi_freq,
                config_fingerprint: cfg.fingerprint(),
            },
        })
    }
}

/// Power spectrum, warped filterbank, log floor and (for MFCC) orthonormal
/// DCT-II, per frame.
pub fn extract_features(
    buffer: &AudioBuffer,
    cfg: &FeatureConfig,
    warp: &WarpSpec,
) -> Result<FeatureMatrix> {
    Extractor::new(cfg.clone())?.extract(buffer, warp)
}

/// Mean per-frame Euclidean distance between two equally sized matrices
/// (extra trailing frames of the longer one are ignored).
pub fn mean_frame_distance(a: &FeatureMatrix, b: &FeatureMatrix) -> f64 {
    assert_eq!(a.cols(), b.cols(), "dimension mismatch");
    let n = a.rows().min(b.rows());
    if n == 0 {
        return 0.0;
    }
    let total: f64 = a
        .iter_rows()
        .zip(b.iter_rows())
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt())
        .sum();
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melwarp::warp::compute_warp;
    use crate::melwarp::scale::{hz_to_mel, mel_to_hz};

    fn noise(n: usize, seed: u64) -> AudioBuffer {
        // small LCG; only needs to be deterministic and broadband
        let mut s = seed;
        let samples = (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect();
        AudioBuffer::new(samples, 16_000, "noise").unwrap()
    }

    #[test]
    fn one_second_gives_98_by_13() {
        let m = extract_features(&noise(16_000, 1), &FeatureConfig::default(), &WarpSpec::identity(100.0)).unwrap();
        assert_eq!((m.rows(), m.cols()), (98, 13));
        assert!(m.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn silence_hits_the_floor() {
        let cfg = FeatureConfig::default().with_kind(FeatureKind::LogMel);
        let m = extract_features(&AudioBuffer::new(vec![0.0; 800], 16_000, "s").unwrap(), &cfg, &WarpSpec::identity(100.0)).unwrap();
        assert!(m.values().iter().all(|&v| v == 1e-10f64.ln()));
    }

    #[test]
    fn zero_shift_matches_identity() {
        let cfg = FeatureConfig::default();
        let audio = noise(8_000, 2);
        let a = extract_features(&audio, &cfg, &WarpSpec::identity(100.0)).unwrap();
        let b = extract_features(&audio, &cfg, &compute_warp(137.5, 137.5).unwrap()).unwrap();
        assert!(a.same_values(&b));
    }

    #[test]
    fn normalization_and_perturbation_paths_agree() {
        let cfg = FeatureConfig::warped();
        let audio = noise(8_000, 3);
        let norm = compute_warp(270.0, 100.0).unwrap();
        // mel(100) < 217 Mel, so the equivalent pair needs a higher f0_utt
        let d = mel_to_hz(hz_to_mel(400.0).unwrap() - norm.delta_mel).unwrap();
        let pert = compute_warp(400.0, d).unwrap();
        assert_eq!(norm.delta_mel.to_bits(), pert.delta_mel.to_bits());
        let a = extract_features(&audio, &cfg, &norm).unwrap();
        let b = extract_features(&audio, &cfg, &pert).unwrap();
        assert!(a.same_values(&b));
    }

    #[test]
    fn meta_records_warp_and_config() {
        let cfg = FeatureConfig::warped();
        let w = compute_warp(200.0, 100.0).unwrap();
        let m = extract_features(&noise(4_000, 4), &cfg, &w).unwrap();
        assert_eq!(m.meta.warp, w);
        assert_eq!(m.meta.hi_freq, 6_200.0);
        assert_eq!(m.meta.config_fingerprint, cfg.fingerprint());
        assert_eq!(m.meta.source_id, "noise");
    }

    #[test]
    fn wrong_rate_rejected() {
        let audio = AudioBuffer::new(vec![0.0; 1000], 8_000, "x").unwrap();
        assert!(matches!(
            extract_features(&audio, &FeatureConfig::default(), &WarpSpec::identity(100.0)),
            Err(Error::RateMismatch { .. })
        ));
    }

    #[test]
    fn doubling_length_roughly_doubles_frames() {
        let cfg = FeatureConfig::default();
        let a = extract_features(&noise(16_000, 5), &cfg, &WarpSpec::identity(100.0)).unwrap();
        let b = extract_features(&noise(32_000, 5), &cfg, &WarpSpec::identity(100.0)).unwrap();
        assert_eq!(a.rows(), 98);
        assert_eq!(b.rows(), 198);
    }
}
