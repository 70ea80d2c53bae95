use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::config::FeatureConfig;
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = (len - 1) as f64;
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / denom).cos())
        .collect()
}

/// Cuts the buffer into `window`-sample frames every `hop` samples (partial
/// tail dropped), pre-emphasizes each frame and applies a Hamming window.
///
/// The first sample of a frame is pre-emphasized against the sample that
/// precedes the frame in the buffer, or 0 at the start of the utterance.
pub fn frame_and_window(buffer: &AudioBuffer, cfg: &FeatureConfig) -> Result<Vec<Vec<f64>>> {
    let window = cfg.window_samples();
    let hop = cfg.hop_samples();
    let x = buffer.samples();
    if x.len() < window {
        return Err(Error::TooShort {
            samples: x.len(),
            required: window,
        });
    }
    let taper = hamming(window);
    let frames = (0..cfg.num_frames(x.len()))
        .map(|t| {
            let start = t * hop;
            (0..window)
                .map(|n| {
                    let i = start + n;
                    let prev = if i == 0 { 0.0 } else { x[i - 1] };
                    (x[i] - cfg.preemphasis * prev) * taper[n]
                })
                .collect()
        })
        .collect();
    Ok(frames)
}

/// `|DFT|^2` of a zero-padded real frame; one plan reused across frames.
pub struct PowerSpectrum {
    fft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex<f64>>,
    buf: Vec<Complex<f64>>,
}

impl PowerSpectrum {
    pub fn new(dft_size: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(dft_size);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self {
            fft,
            scratch,
            buf: vec![Complex::default(); dft_size],
        }
    }

    pub fn dft_size(&self) -> usize {
        self.buf.len()
    }

    /// Writes `dft_size/2 + 1` power values into `out`.
    pub fn compute(&mut self, frame: &[f64], out: &mut [f64]) {
        let n = self.buf.len();
        assert!(frame.len() <= n, "frame longer than the DFT");
        assert_eq!(out.len(), n / 2 + 1);
        for (dst, i) in self.buf.iter_mut().zip(0..) {
            *dst = Complex::new(frame.get(i).copied().unwrap_or(0.0), 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (o, c) in out.iter_mut().zip(&self.buf) {
            *o = c.norm_sqr();
        }
    }
}

/// One-shot power spectrum of `frame` zero-padded to `dft_size`.
pub fn power_spectrum(frame: &[f64], dft_size: usize) -> Vec<f64> {
    let mut out = vec![0.0; dft_size / 2 + 1];
    PowerSpectrum::new(dft_size).compute(frame, &mut out);
    out
}
