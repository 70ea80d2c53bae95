use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::ManifestEntry;
use super::matrix::{write_matrix, Matrix};
use crate::audio::read_wav;
use crate::augment::{augment_with, AugmentationPlan};
use crate::error::{Error, Result};
use crate::melwarp::{Extractor, FeatureConfig, WARPED_HI_FREQ};
use crate::pitch::{detect_pitch, median_f0, PitchConfig, UtteranceF0};

pub const INDEX_FILE: &str = "index.jsonl";
pub const REPORT_FILE: &str = "report.jsonl";
pub const FEATS_DIR: &str = "feats";

/// One feature matrix in an archive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveRecord {
    pub id: String,
    pub key: String,
    pub variant_shift_mel: f64,
    pub f0_utt: f64,
    pub f0_def: f64,
    pub delta_mel: f64,
    pub clamped: bool,
    pub fallback_used: bool,
    pub voiced_count: usize,
    pub rows: usize,
    pub cols: usize,
    pub path: String,
}

/// An utterance that could not be processed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub id: String,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct ProcessOptions {
    pub features: FeatureConfig,
    pub pitch: PitchConfig,
    pub plan: AugmentationPlan,
    pub normalize: bool,
    pub workers: usize,
    pub strict: bool,
}

impl ProcessOptions {
    pub fn new(features: FeatureConfig, plan: AugmentationPlan, normalize: bool) -> Self {
        Self {
            features,
            pitch: PitchConfig::default(),
            plan,
            normalize,
            workers: 1,
            strict: false,
        }
    }

    /// Whether any bin shift can occur: normalization or a nonzero offset.
    pub fn warping(&self) -> bool {
        self.normalize || self.plan.perturbs()
    }

    /// Applies the band policy: warped modes use the 6.2 kHz ceiling.
    pub fn with_bandwidth_policy(mut self) -> Self {
        if self.warping() {
            self.features.hi_freq = WARPED_HI_FREQ;
        }
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProcessSummary {
    pub records: Vec<ArchiveRecord>,
    pub failures: Vec<FailureRecord>,
}

/// Archive key of one variant, e.g. `utt1_shift+20`.
pub fn variant_key(id: &str, shift_mel: f64) -> String {
    format!("{id}_shift{shift_mel:+}")
}

/// Extracts every plan variant of every manifest entry into `out_dir`.
///
/// Each utterance is handled end to end by one worker, which writes its own
/// matrix files. The index is written afterwards, sorted by (id, shift), so
/// the archive does not depend on worker count or scheduling. In lenient mode
/// failures go to `report.jsonl`; in strict mode the first failure (in
/// manifest order) is returned and no index is written.
pub fn process_dataset(
    entries: &[ManifestEntry],
    opts: &ProcessOptions,
    out_dir: impl AsRef<Path>,
) -> Result<ProcessSummary> {
    let out_dir = out_dir.as_ref();
    opts.features.validate()?;
    if opts.normalize {
        opts.pitch.validate(opts.features.sample_rate)?;
    }
    fs::create_dir_all(out_dir.join(FEATS_DIR))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let results: Vec<Result<Vec<ArchiveRecord>>> = pool.install(|| {
        entries
            .par_iter()
            .map(|entry| {
                process_one(entry, opts, out_dir).map_err(|e| Error::Utterance {
                    id: entry.id.clone(),
                    source: Box::new(e),
                })
            })
            .collect()
    });

    let mut summary = ProcessSummary::default();
    for (entry, result) in entries.iter().zip(results) {
        match result {
            Ok(records) => summary.records.extend(records),
            Err(e) if opts.strict => return Err(e),
            Err(e) => {
                warn!("{e}");
                let error = match e {
                    Error::Utterance { source, .. } => source.to_string(),
                    other => other.to_string(),
                };
                summary.failures.push(FailureRecord {
                    id: entry.id.clone(),
                    error,
                });
            }
        }
    }
    summary
        .records
        .sort_by(|a, b| a.id.cmp(&b.id).then(a.variant_shift_mel.total_cmp(&b.variant_shift_mel)));

    write_jsonl(&out_dir.join(INDEX_FILE), &summary.records)?;
    write_jsonl(&out_dir.join(REPORT_FILE), &summary.failures)?;
    Ok(summary)
}

fn process_one(entry: &ManifestEntry, opts: &ProcessOptions, out_dir: &Path) -> Result<Vec<ArchiveRecord>> {
    let audio = read_wav(&entry.audio_path)
        .map_err(|e| match e {
            Error::Io(io) => Error::Io(std::io::Error::new(
                io.kind(),
                format!("{}: {io}", entry.audio_path.display()),
            )),
            other => other,
        })?
        .with_source_id(entry.id.clone());
    let base = opts.plan.base_f0_def;
    let f0 = if opts.normalize {
        median_f0(&detect_pitch(&audio, &opts.pitch)?, base)
    } else {
        UtteranceF0 {
            f0_utt: base,
            voiced_count: 0,
            fallback_used: false,
        }
    };
    debug!("{}: f0_utt {:.2} Hz ({} voiced frames)", entry.id, f0.f0_utt, f0.voiced_count);

    let mut extractor = Extractor::new(opts.features.clone())?;
    let variants = augment_with(&mut extractor, &audio, &opts.plan, opts.normalize, &f0)?;
    variants
        .iter()
        .map(|m| {
            let key = variant_key(&entry.id, m.meta.shift_mel);
            let rel = format!("{FEATS_DIR}/{key}.mwf");
            write_matrix(out_dir.join(&rel), &Matrix::from(m))?;
            Ok(ArchiveRecord {
                id: entry.id.clone(),
                key,
                variant_shift_mel: m.meta.shift_mel,
                f0_utt: m.meta.warp.f0_utt,
                f0_def: m.meta.warp.f0_def,
                delta_mel: m.meta.warp.delta_mel,
                clamped: m.meta.warp.clamped,
                fallback_used: f0.fallback_used,
                voiced_count: f0.voiced_count,
                rows: m.rows(),
                cols: m.cols(),
                path: rel,
            })
        })
        .collect()
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Loads `index.jsonl` from an archive directory.
pub fn read_index(archive: impl AsRef<Path>) -> Result<Vec<ArchiveRecord>> {
    let path: PathBuf = archive.as_ref().join(INDEX_FILE);
    let reader = std::io::BufReader::new(fs::File::open(&path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.clone(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}
