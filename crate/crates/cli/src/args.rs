use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use f0warp::melwarp::{BASELINE_HI_FREQ, WARPED_HI_FREQ};
use f0warp::{FeatureConfig, FeatureKind, PitchConfig};

use crate::UsageError;

/// f0-normalized and f0-perturbed speech features.
#[derive(Debug, Parser)]
#[command(name = "f0warp", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-frame f0 track and utterance median
    Pitch(PitchCmd),
    /// MFCC matrix for one utterance
    Extract(ExtractCmd),
    /// Log-Mel filterbank matrix for one utterance
    Fbank(ExtractCmd),
    /// Batch extraction over a JSON-lines manifest
    Process(ProcessCmd),
    /// Convert an archive directory to a Kaldi-style text archive
    ExportArk(ExportCmd),
    /// Print the header and summary statistics of a matrix file or archive
    Inspect(InspectCmd),
    /// Write a band-limited harmonic train as WAV
    SynthHarmonic(SynthHarmonicCmd),
    /// Write a three-formant source-filter vowel as WAV
    SynthVowel(SynthVowelCmd),
    /// Compare adult and child /i/ filterbank outputs with and without normalization
    DemoFig1(DemoCmd),
}

#[derive(Debug, Clone, Args)]
pub struct FeatureArgs {
    /// Analysis window in milliseconds
    #[arg(long, default_value_t = 25.0)]
    pub window_ms: f64,
    /// Frame shift in milliseconds
    #[arg(long, default_value_t = 10.0)]
    pub hop_ms: f64,
    /// DFT length in points
    #[arg(long, default_value_t = 512)]
    pub dft_size: usize,
    /// Number of triangular Mel filters
    #[arg(long, default_value_t = 23)]
    pub num_filters: usize,
    /// Lower band edge in Hz
    #[arg(long, default_value_t = 20.0)]
    pub lo_freq: f64,
    /// Upper band edge in Hz [default: 8000, or 6200 when warping]
    #[arg(long)]
    pub hi_freq: Option<f64>,
    /// Cepstral coefficients kept (c0 included)
    #[arg(long, default_value_t = 13)]
    pub num_ceps: usize,
    /// Pre-emphasis coefficient
    #[arg(long, default_value_t = 0.97)]
    pub preemphasis: f64,
    /// Energy floor applied before the log
    #[arg(long, default_value_t = 1e-10)]
    pub log_floor: f64,
}

impl FeatureArgs {
    /// Resolves the band ceiling for the mode and validates the result.
    pub fn config(&self, kind: FeatureKind, warping: bool) -> Result<FeatureConfig, UsageError> {
        let hi_freq = match self.hi_freq {
            Some(hi) if warping && hi > WARPED_HI_FREQ => {
                return Err(UsageError(format!(
                    "--hi-freq {hi} conflicts with warping: shifted bins need the band limited to {WARPED_HI_FREQ} Hz or less"
                )))
            }
            Some(hi) => hi,
            None if warping => WARPED_HI_FREQ,
            None => BASELINE_HI_FREQ,
        };
        let cfg = FeatureConfig {
            window: self.window_ms / 1000.0,
            hop: self.hop_ms / 1000.0,
            dft_size: self.dft_size,
            num_filters: self.num_filters,
            lo_freq: self.lo_freq,
            hi_freq,
            num_ceps: self.num_ceps,
            preemphasis: self.preemphasis,
            log_floor: self.log_floor,
            kind,
            ..FeatureConfig::baseline()
        };
        cfg.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PitchArgs {
    /// Lowest f0 searched, Hz
    #[arg(long, default_value_t = 50.0)]
    pub f0_min: f64,
    /// Highest f0 searched, Hz
    #[arg(long, default_value_t = 500.0)]
    pub f0_max: f64,
    /// Minimum periodicity for a voiced frame
    #[arg(long, default_value_t = 0.5)]
    pub voicing_threshold: f64,
    /// Pitch analysis window in milliseconds
    #[arg(long, default_value_t = 40.0)]
    pub pitch_window_ms: f64,
    /// Pitch frame shift in milliseconds
    #[arg(long, default_value_t = 10.0)]
    pub pitch_shift_ms: f64,
}

impl PitchArgs {
    pub fn config(&self) -> Result<PitchConfig, UsageError> {
        let cfg = PitchConfig {
            f0_min: self.f0_min,
            f0_max: self.f0_max,
            voicing_threshold: self.voicing_threshold,
            window: self.pitch_window_ms / 1000.0,
            shift: self.pitch_shift_ms / 1000.0,
        };
        cfg.validate(f0warp::SAMPLE_RATE).map_err(|e| UsageError(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct PitchCmd {
    /// Input WAV (16 kHz, mono, 16-bit)
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Write per-frame CSV here ("-" for standard output)
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Default f0 used when no frame is voiced, Hz
    #[arg(long, default_value_t = 100.0)]
    pub f0_def: f64,
    #[command(flatten)]
    pub pitch: PitchArgs,
}

#[derive(Debug, Args)]
pub struct ExtractCmd {
    /// Input WAV (16 kHz, mono, 16-bit)
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output MWF1 matrix file [default: text matrix on standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Normalize by the utterance median f0
    #[arg(long)]
    pub normalize: bool,
    /// Default (target) f0, Hz
    #[arg(long, default_value_t = 100.0)]
    pub f0_def: f64,
    /// Perturbation offset in Mels added to the warp
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub shift: f64,
    #[command(flatten)]
    pub features: FeatureArgs,
    #[command(flatten)]
    pub pitch: PitchArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Mfcc,
    LogMel,
}

impl From<KindArg> for FeatureKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Mfcc => FeatureKind::Mfcc,
            KindArg::LogMel => FeatureKind::LogMel,
        }
    }
}

#[derive(Debug, Args)]
pub struct ProcessCmd {
    /// JSON-lines manifest with `id`, `audio` and optional `text` keys
    #[arg(long)]
    pub manifest: PathBuf,
    /// Archive output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Normalize each utterance by its median f0
    #[arg(long)]
    pub normalize: bool,
    /// Comma-separated perturbation offsets in Mels (must include 0)
    #[arg(long, default_value = "0", value_delimiter = ',', allow_hyphen_values = true)]
    pub augment_shifts: Vec<f64>,
    /// Default (target) f0, Hz
    #[arg(long, default_value_t = 100.0)]
    pub f0_def: f64,
    /// Feature type
    #[arg(long, value_enum, default_value_t = KindArg::Mfcc)]
    pub kind: KindArg,
    /// Worker threads (0 = one per core)
    #[arg(long, env = "F0WARP_WORKERS", hide_env_values = true, default_value_t = 0)]
    pub workers: usize,
    /// Abort on the first failing utterance
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub features: FeatureArgs,
    #[command(flatten)]
    pub pitch: PitchArgs,
}

#[derive(Debug, Args)]
pub struct ExportCmd {
    /// Archive directory written by `process`
    #[arg(long)]
    pub archive: PathBuf,
    /// Output text archive
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectCmd {
    /// MWF1 matrix file or archive directory
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthHarmonicCmd {
    /// Fundamental frequency, Hz
    #[arg(long)]
    pub f0: f64,
    /// Duration in seconds
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    /// Peak amplitude in [0, 1]
    #[arg(long, default_value_t = 0.8)]
    pub amplitude: f64,
    /// Output WAV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthVowelCmd {
    /// Fundamental frequency, Hz
    #[arg(long, default_value_t = 106.0)]
    pub f0: f64,
    /// F1,F2,F3 in Hz
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [300.0, 2300.0, 3000.0])]
    pub formants: Vec<f64>,
    /// B1,B2,B3 in Hz
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [60.0, 100.0, 120.0])]
    pub bandwidths: Vec<f64>,
    /// Move the formants to keep their Mel distance from this f0
    #[arg(long)]
    pub shift_to_f0: Option<f64>,
    /// Duration in seconds
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    /// Peak amplitude in [0, 1]
    #[arg(long, default_value_t = 0.8)]
    pub amplitude: f64,
    /// Output WAV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoCmd {
    /// Adult speaker f0, Hz
    #[arg(long, default_value_t = 106.0)]
    pub adult_f0: f64,
    /// Child speaker f0, Hz
    #[arg(long, default_value_t = 270.0)]
    pub child_f0: f64,
    /// Default (target) f0, Hz
    #[arg(long, default_value_t = 100.0)]
    pub f0_def: f64,
}
