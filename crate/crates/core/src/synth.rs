//! Deterministic test signals: band-limited harmonic trains and
//! source-filter vowels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::audio::{AudioBuffer, SAMPLE_RATE};
use crate::error::{Error, Result};
use crate::melwarp::{hz_to_mel, mel_to_hz};

/// Equal-amplitude cosine harmonics of `f0` below Nyquist, scaled so the
/// peak magnitude equals `amplitude`.
pub fn synth_harmonic(f0: f64, duration: f64, amplitude: f64) -> Result<AudioBuffer> {
    let samples = harmonic_source(f0, num_samples(duration)?, 0)?;
    AudioBuffer::new(scale_to_peak(samples, amplitude)?, SAMPLE_RATE, format!("harmonic_{f0}"))
}

fn num_samples(duration: f64) -> Result<usize> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::Domain(format!("duration must be positive, got {duration}")));
    }
    Ok((duration * f64::from(SAMPLE_RATE)).round() as usize)
}

fn harmonic_source(f0: f64, len: usize, offset: usize) -> Result<Vec<f64>> {
    let nyquist = f64::from(SAMPLE_RATE) / 2.0;
    if !(f0 > 0.0 && f0 < nyquist) {
        return Err(Error::Domain(format!("f0 must be in (0, {nyquist}) Hz, got {f0}")));
    }
    // every h with h * f0 strictly below Nyquist
    let harmonics = (nyquist / f0).ceil() as usize - 1;
    let w = 2.0 * PI * f0 / f64::from(SAMPLE_RATE);
    Ok((offset..offset + len)
        .map(|n| {
            let phase = w * n as f64;
            (1..=harmonics).map(|h| (h as f64 * phase).cos()).sum()
        })
        .collect())
}

fn scale_to_peak(mut samples: Vec<f64>, amplitude: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::Domain(format!("amplitude must be in [0, 1], got {amplitude}")));
    }
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let gain = if peak > 0.0 { amplitude / peak } else { 0.0 };
    samples.iter_mut().for_each(|s| *s *= gain);
    Ok(samples)
}

/// Source-filter vowel description. Frequencies and bandwidths in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VowelSpec {
    pub f0: f64,
    pub formants: [f64; 3],
    pub bandwidths: [f64; 3],
    pub duration: f64,
    pub amplitude: f64,
}

impl VowelSpec {
    /// A close front vowel as produced by an adult male.
    pub fn adult_i() -> Self {
        Self {
            f0: 106.0,
            formants: [300.0, 2300.0, 3000.0],
            bandwidths: [60.0, 100.0, 120.0],
            duration: 1.0,
            amplitude: 0.8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nyquist = f64::from(SAMPLE_RATE) / 2.0;
        let [f1, f2, f3] = self.formants;
        if !(self.f0 > 0.0 && self.f0 < f1 && f1 < f2 && f2 < f3 && f3 < nyquist) {
            return Err(Error::Domain(format!(
                "need 0 < f0 < F1 < F2 < F3 < {nyquist} Hz, got f0 {} and formants {:?}",
                self.f0, self.formants
            )));
        }
        if self.bandwidths.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::Domain("bandwidths must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.amplitude) {
            return Err(Error::Domain("amplitude must be in [0, 1]".into()));
        }
        num_samples(self.duration).map(|_| ())
    }
}

/// Two-pole resonator with unity gain at DC.
#[derive(Debug, Clone, Copy)]
struct Resonator {
    a: f64,
    b: f64,
    c: f64,
}

impl Resonator {
    fn new(freq: f64, bandwidth: f64) -> Self {
        let sr = f64::from(SAMPLE_RATE);
        let r = (-PI * bandwidth / sr).exp();
        let b = 2.0 * r * (2.0 * PI * freq / sr).cos();
        let c = -r * r;
        Self { a: 1.0 - b - c, b, c }
    }

    fn run(&self, input: &mut [f64]) {
        let (mut y1, mut y2) = (0.0, 0.0);
        for x in input.iter_mut() {
            let y = self.a * *x + self.b * y1 + self.c * y2;
            y2 = y1;
            y1 = y;
            *x = y;
        }
    }
}

/// Discarded lead-in so the resonators reach steady state.
const WARMUP: usize = 1_600;

/// Harmonic source through three cascaded resonators, peak-normalized.
pub fn synth_vowel(spec: &VowelSpec) -> Result<AudioBuffer> {
    spec.validate()?;
    let len = num_samples(spec.duration)?;
    let mut signal = harmonic_source(spec.f0, len + WARMUP, 0)?;
    for (&f, &bw) in spec.formants.iter().zip(&spec.bandwidths) {
        Resonator::new(f, bw).run(&mut signal);
    }
    let samples = scale_to_peak(signal.split_off(WARMUP), spec.amplitude)?;
    AudioBuffer::new(samples, SAMPLE_RATE, format!("vowel_{}", spec.f0))
}

/// Impulse response of the resonator cascade, `len` samples long.
pub fn vowel_impulse_response(spec: &VowelSpec, len: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut h = vec![0.0; len];
    if let Some(first) = h.first_mut() {
        *first = 1.0;
    }
    for (&f, &bw) in spec.formants.iter().zip(&spec.bandwidths) {
        Resonator::new(f, bw).run(&mut h);
    }
    Ok(h)
}

/// Moves every formant by the Mel distance between the two f0 values, so the
/// Mel-scale gaps `Fx - f0` are preserved. Bandwidths follow each formant's
/// own Hz ratio.
pub fn shift_vowel_for_f0(reference: &VowelSpec, target_f0: f64) -> Result<VowelSpec> {
    reference.validate()?;
    if !(target_f0 > 0.0) {
        return Err(Error::Domain(format!("target f0 must be positive, got {target_f0}")));
    }
    if target_f0 == reference.f0 {
        return Ok(reference.clone());
    }
    let shift = hz_to_mel(target_f0)? - hz_to_mel(reference.f0)?;
    let nyquist = f64::from(SAMPLE_RATE) / 2.0;
    let mut out = reference.clone();
    out.f0 = target_f0;
    for i in 0..3 {
        let old = reference.formants[i];
        let new = mel_to_hz(hz_to_mel(old)? + shift)?;
        if new >= nyquist {
            return Err(Error::Domain(format!("shifted F{} = {new:.1} Hz reaches Nyquist", i + 1)));
        }
        out.formants[i] = new;
        out.bandwidths[i] = reference.bandwidths[i] * new / old;
    }
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melwarp::power_spectrum;

    #[test]
    fn harmonic_period_peak() {
        let audio = synth_harmonic(100.0, 1.0, 0.9).unwrap();
        let x = audio.samples();
        assert_eq!(x.len(), 16_000);
        let peak = x.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!((peak - 0.9).abs() < 1e-12);
        // raw autocorrelation over lags shorter than two periods
        let n = 8_000;
        let ac = |lag: usize| -> f64 { (0..n).map(|i| x[i] * x[i + lag]).sum() };
        let best = (40..240).max_by(|&a, &b| ac(a).total_cmp(&ac(b))).unwrap();
        assert_eq!(best, 160);
    }

    #[test]
    fn zero_amplitude_is_silence() {
        let audio = synth_harmonic(200.0, 0.1, 0.0).unwrap();
        assert!(audio.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn harmonic_domain_errors() {
        assert!(synth_harmonic(0.0, 1.0, 0.5).is_err());
        assert!(synth_harmonic(9_000.0, 1.0, 0.5).is_err());
        assert!(synth_harmonic(100.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn vowel_envelope_peaks_at_formants() {
        let spec = VowelSpec::adult_i();
        let h = vowel_impulse_response(&spec, 4_096).unwrap();
        let p = power_spectrum(&h, 4_096);
        let bin_hz = 16_000.0 / 4_096.0;
        let local_max: Vec<usize> = (1..p.len() - 1)
            .filter(|&k| p[k] > p[k - 1] && p[k] > p[k + 1])
            .collect();
        assert_eq!(local_max.len(), 3, "{local_max:?}");
        for (k, f) in local_max.iter().zip(&spec.formants[..2]) {
            let expected = f / bin_hz;
            assert!((*k as f64 - expected).abs() <= 1.0, "peak bin {k}, formant bin {expected}");
        }
        // F2's skirt pulls the joint F3 peak ~8 Hz low; compare F3 against the
        // maximum of the analytic cascade response instead.
        let analytic_f3 = analytic_peak(&spec, 2_900.0, 3_100.0);
        assert!((analytic_f3 - 3_000.0).abs() < 10.0);
        assert!((local_max[2] as f64 - analytic_f3 / bin_hz).abs() <= 1.0);
    }

    /// Dense search for the maximum of |H(e^jw)| of the resonator cascade.
    fn analytic_peak(spec: &VowelSpec, lo: f64, hi: f64) -> f64 {
        let sr = 16_000.0;
        let gain = |f: f64| -> f64 {
            let w = 2.0 * PI * f / sr;
            spec.formants
                .iter()
                .zip(&spec.bandwidths)
                .map(|(&fx, &bx)| {
                    let r = (-PI * bx / sr).exp();
                    let b = 2.0 * r * (2.0 * PI * fx / sr).cos();
                    let c = -r * r;
                    // |1 - b e^{-jw} - c e^{-2jw}|
                    let re = 1.0 - b * w.cos() - c * (2.0 * w).cos();
                    let im = b * w.sin() + c * (2.0 * w).sin();
                    (1.0 - b - c).abs() / re.hypot(im)
                })
                .product()
        };
        (0..=20_000)
            .map(|i| lo + (hi - lo) * i as f64 / 20_000.0)
            .max_by(|a, b| gain(*a).total_cmp(&gain(*b)))
            .unwrap()
    }

    #[test]
    fn vowel_is_deterministic_and_bounded() {
        let a = synth_vowel(&VowelSpec::adult_i()).unwrap();
        let b = synth_vowel(&VowelSpec::adult_i()).unwrap();
        assert_eq!(a, b);
        let peak = a.samples().iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!((peak - 0.8).abs() < 1e-12);
    }

    #[test]
    fn f0_above_f1_rejected() {
        let spec = VowelSpec { f0: 350.0, ..VowelSpec::adult_i() };
        assert!(matches!(synth_vowel(&spec), Err(Error::Domain(_))));
    }

    #[test]
    fn same_f0_is_identity() {
        let spec = VowelSpec::adult_i();
        assert_eq!(shift_vowel_for_f0(&spec, spec.f0).unwrap(), spec);
    }

    #[test]
    fn shift_preserves_mel_gaps() {
        let a = VowelSpec::adult_i();
        let b = shift_vowel_for_f0(&a, 270.0).unwrap();
        let mel = |f: f64| hz_to_mel(f).unwrap();
        let shift = mel(270.0) - mel(106.0);
        for i in 0..3 {
            assert!((mel(b.formants[i]) - mel(a.formants[i]) - shift).abs() < 1e-9);
            let gap_a = mel(a.formants[i]) - mel(a.f0);
            let gap_b = mel(b.formants[i]) - mel(b.f0);
            assert!((gap_a - gap_b).abs() < 1e-9);
            assert!((b.bandwidths[i] / a.bandwidths[i] - b.formants[i] / a.formants[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_past_nyquist_rejected() {
        let spec = VowelSpec { formants: [300.0, 2300.0, 7000.0], ..VowelSpec::adult_i() };
        assert!(matches!(shift_vowel_for_f0(&spec, 400.0), Err(Error::Domain(_))));
    }
}
