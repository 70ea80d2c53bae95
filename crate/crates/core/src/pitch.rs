//! Frame-level f0 estimation and the utterance median used as the
//! normalization factor.
//!
//! [`PitchDetector`] is the plug-in point. The shipped [`DifferenceDetector`]
//! uses the cumulative-mean-normalized squared difference function with
//! parabolic refinement of the chosen lag. Its periodicity score is
//! `1 - d'(lag)`, clipped to `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchConfig {
    pub f0_min: f64,
    pub f0_max: f64,
    pub voicing_threshold: f64,
    /// Seconds.
    pub window: f64,
    /// Seconds.
    pub shift: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            f0_min: 50.0,
            f0_max: 500.0,
            voicing_threshold: 0.5,
            window: 0.040,
            shift: 0.010,
        }
    }
}

impl PitchConfig {
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = f64::from(sample_rate) / 2.0;
        if !(self.f0_min > 0.0 && self.f0_min < self.f0_max && self.f0_max < nyquist) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < f0_min < f0_max < {nyquist} Hz, got {} and {}",
                self.f0_min, self.f0_max
            )));
        }
        if !(0.0..=1.0).contains(&self.voicing_threshold) {
            return Err(Error::InvalidConfig("voicing_threshold must be in [0, 1]".into()));
        }
        if !(self.window > 0.0 && self.shift > 0.0) {
            return Err(Error::InvalidConfig("pitch window and shift must be positive".into()));
        }
        let window = self.window_samples(sample_rate);
        let max_lag = (f64::from(sample_rate) / self.f0_min).ceil() as usize;
        if window <= max_lag + 1 {
            return Err(Error::InvalidConfig(format!(
                "pitch window of {window} samples cannot resolve f0_min = {} Hz",
                self.f0_min
            )));
        }
        Ok(())
    }

    pub fn window_samples(&self, sample_rate: u32) -> usize {
        (self.window * f64::from(sample_rate)).round() as usize
    }

    pub fn shift_samples(&self, sample_rate: u32) -> usize {
        ((self.shift * f64::from(sample_rate)).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchFrame {
    /// Frame center, seconds.
    pub time: f64,
    /// `None` when unvoiced.
    pub f0: Option<f64>,
    pub periodicity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchTrack {
    pub frames: Vec<PitchFrame>,
    pub frame_shift: f64,
}

impl PitchTrack {
    pub fn voiced(&self) -> impl Iterator<Item = f64> + '_ {
        self.frames.iter().filter_map(|f| f.f0)
    }

    pub fn voiced_count(&self) -> usize {
        self.voiced().count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtteranceF0 {
    pub f0_utt: f64,
    pub voiced_count: usize,
    pub fallback_used: bool,
}

/// Per-frame f0 estimation over a whole buffer.
pub trait PitchDetector {
    fn detect(&self, buffer: &AudioBuffer, cfg: &PitchConfig) -> Result<PitchTrack>;
}

/// Reference detector. See the module docs.
#[derive(Debug, Clone, Copy, Default)]
pub struct DifferenceDetector;

/// Candidate lags are the first dip of the normalized difference below this
/// value; otherwise the global minimum in range.
const DIP_THRESHOLD: f64 = 0.15;

impl DifferenceDetector {
    fn analyze(frame: &[f64], min_lag: usize, max_lag: usize, sample_rate: f64) -> (Option<f64>, f64) {
        let span = frame.len() - max_lag - 1;
        // d(tau) for tau in 0..=max_lag+1; the extra lag feeds interpolation
        let mut diff = vec![0.0; max_lag + 2];
        for (tau, d) in diff.iter_mut().enumerate().skip(1) {
            *d = frame[..span]
                .iter()
                .zip(&frame[tau..tau + span])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        }
        // cumulative mean normalization
        let mut cmnd = vec![1.0; diff.len()];
        let mut running = 0.0;
        for tau in 1..diff.len() {
            running += diff[tau];
            cmnd[tau] = if running > 0.0 {
                diff[tau] * tau as f64 / running
            } else {
                1.0
            };
        }

        let mut best = None;
        let mut tau = min_lag;
        while tau <= max_lag {
            if cmnd[tau] < DIP_THRESHOLD {
                while tau < max_lag && cmnd[tau + 1] < cmnd[tau] {
                    tau += 1;
                }
                best = Some(tau);
                break;
            }
            tau += 1;
        }
        let lag = best.unwrap_or_else(|| {
            (min_lag..=max_lag)
                .min_by(|&a, &b| cmnd[a].total_cmp(&cmnd[b]))
                .expect("non-empty lag range")
        });
        let periodicity = (1.0 - cmnd[lag]).clamp(0.0, 1.0);
        if periodicity == 0.0 {
            return (None, 0.0);
        }

        let (a, b, c) = (cmnd[lag - 1], cmnd[lag], cmnd[lag + 1]);
        let denom = a - 2.0 * b + c;
        let offset = if denom > 0.0 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        (Some(sample_rate / (lag as f64 + offset)), periodicity)
    }
}

impl PitchDetector for DifferenceDetector {
    fn detect(&self, buffer: &AudioBuffer, cfg: &PitchConfig) -> Result<PitchTrack> {
        let sr = buffer.sample_rate();
        cfg.validate(sr)?;
        let window = cfg.window_samples(sr);
        let shift = cfg.shift_samples(sr);
        let x = buffer.samples();
        if x.len() < window {
            return Err(Error::TooShort {
                samples: x.len(),
                required: window,
            });
        }
        let rate = f64::from(sr);
        let min_lag = ((rate / cfg.f0_max).floor() as usize).max(2);
        let max_lag = (rate / cfg.f0_min).ceil() as usize;
        let count = 1 + (x.len() - window) / shift;
        let frames = (0..count)
            .map(|t| {
                let start = t * shift;
                let (f0, periodicity) = Self::analyze(&x[start..start + window], min_lag, max_lag, rate);
                let f0 = f0.filter(|&f| {
                    periodicity >= cfg.voicing_threshold && f >= cfg.f0_min && f <= cfg.f0_max
                });
                PitchFrame {
                    time: (start as f64 + window as f64 / 2.0) / rate,
                    f0,
                    periodicity,
                }
            })
            .collect();
        Ok(PitchTrack {
            frames,
            frame_shift: shift as f64 / rate,
        })
    }
}

/// Runs the reference detector.
pub fn detect_pitch(buffer: &AudioBuffer, cfg: &PitchConfig) -> Result<PitchTrack> {
    DifferenceDetector.detect(buffer, cfg)
}

/// Median f0 over voiced frames (lower middle for even counts). With no voiced
/// frame the result is `default_f0` and `fallback_used` is set.
pub fn median_f0(track: &PitchTrack, default_f0: f64) -> UtteranceF0 {
    let mut voiced: Vec<f64> = track.voiced().collect();
    if voiced.is_empty() {
        return UtteranceF0 {
            f0_utt: default_f0,
            voiced_count: 0,
            fallback_used: true,
        };
    }
    voiced.sort_by(f64::total_cmp);
    UtteranceF0 {
        f0_utt: voiced[(voiced.len() - 1) / 2],
        voiced_count: voiced.len(),
        fallback_used: false,
    }
}
