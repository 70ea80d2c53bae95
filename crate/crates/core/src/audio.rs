//! Waveform ingestion.
//!
//! Only 16-bit linear PCM, mono, 16 kHz RIFF/WAVE is accepted. There is no
//! resampling or channel mixing: anything else is rejected with a typed error.

use std::io::{Read, Seek, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// The only sample rate the feature pipeline accepts.
pub const SAMPLE_RATE: u32 = 16_000;

/// Dequantization scale for 16-bit PCM. Symmetric: -32768 maps to -1.0.
pub const PCM_SCALE: f64 = 32_768.0;

/// Mono PCM samples at a fixed rate, tagged with the utterance they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate: u32,
    source_id: String,
}

impl AudioBuffer {
    /// Wraps raw samples. Fails if any sample is non-finite or the rate is zero.
    pub fn new(samples: Vec<f64>, sample_rate: u32, source_id: impl Into<String>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Domain("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Domain(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// True when the buffer holds fewer than `window` samples.
    pub fn is_too_short(&self, window: usize) -> bool {
        self.samples.len() < window
    }

    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }
}

/// Reads a 16-bit mono 16 kHz PCM WAV file. The source id is the file stem.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_wav_from(std::io::BufReader::new(file), id)
}

/// Reads WAV data from any seekable reader.
pub fn read_wav_from<R: Read>(reader: R, source_id: impl Into<String>) -> Result<AudioBuffer> {
    let mut wav = hound::WavReader::new(reader).map_err(map_hound)?;
    let spec = wav.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "{:?} with {} bits per sample",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    if spec.channels != 1 {
        return Err(Error::ChannelMismatch(spec.channels));
    }
    if spec.sample_rate != SAMPLE_RATE {
        return Err(Error::RateMismatch {
            expected: SAMPLE_RATE,
            found: spec.sample_rate,
        });
    }
    let samples = wav
        .samples::<i16>()
        .map(|s| s.map(|v| f64::from(v) / PCM_SCALE))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(map_hound)?;
    AudioBuffer::new(samples, spec.sample_rate, source_id)
}

// The file is already open here, so read failures mean truncated or malformed data.
fn map_hound(err: hound::Error) -> Error {
    match err {
        hound::Error::Unsupported => Error::UnsupportedFormat("non-PCM or unsupported encoding".into()),
        other => Error::CorruptFile(other.to_string()),
    }
}

fn map_hound_write(err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) => Error::Io(e),
        other => Error::InvalidConfig(other.to_string()),
    }
}

/// Quantizes one amplitude to 16-bit PCM, saturating at the rails.
pub fn quantize(sample: f64) -> i16 {
    (sample * PCM_SCALE).round().clamp(-32_768.0, 32_767.0) as i16
}

/// Writes the buffer as 16-bit mono PCM. This is the inverse of [`read_wav`]
/// up to one quantization step.
pub fn write_wav(path: impl AsRef<Path>, buffer: &AudioBuffer) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_wav_to(file, buffer)
}

pub fn write_wav_to<W: Write + Seek>(writer: W, buffer: &AudioBuffer) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut wav = hound::WavWriter::new(writer, spec).map_err(map_hound_write)?;
    for &s in buffer.samples() {
        wav.write_sample(quantize(s)).map_err(map_hound_write)?;
    }
    wav.finalize().map_err(map_hound_write)
}
