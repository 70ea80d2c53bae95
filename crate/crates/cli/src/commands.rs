use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use f0warp::melwarp::{mean_frame_distance, WARPED_HI_FREQ};
use f0warp::pipeline::{
    export_text_archive, process_dataset, read_index, read_manifest, read_matrix, write_matrix,
    write_text_matrix, Matrix, ProcessOptions,
};
use f0warp::{
    compute_warp, detect_pitch, extract_features, make_plan, median_f0, read_wav, shift_vowel_for_f0,
    synth_harmonic, synth_vowel, write_wav, AugmentationPlan, FeatureConfig, FeatureKind, PitchTrack,
    VowelSpec, WarpSpec,
};
use log::{info, warn};
use serde_json::json;

use crate::args::*;
use crate::{UsageError, EXIT_PARTIAL};

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Pitch(c) => pitch(c),
        Command::Extract(c) => extract(c, FeatureKind::Mfcc),
        Command::Fbank(c) => extract(c, FeatureKind::LogMel),
        Command::Process(c) => process(c),
        Command::ExportArk(c) => export(c),
        Command::Inspect(c) => inspect(c),
        Command::SynthHarmonic(c) => synth_harmonic_cmd(c),
        Command::SynthVowel(c) => synth_vowel_cmd(c),
        Command::DemoFig1(c) => demo(c),
    }
}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn write_pitch_csv<W: Write>(mut w: W, track: &PitchTrack) -> io::Result<()> {
    writeln!(w, "time,f0,periodicity")?;
    for f in &track.frames {
        let f0 = f.f0.map(|v| format!("{v:.3}")).unwrap_or_default();
        writeln!(w, "{:.3},{f0},{:.4}", f.time, f.periodicity)?;
    }
    w.flush()
}

fn pitch(c: PitchCmd) -> Result<u8> {
    let cfg = c.pitch.config()?;
    if !(c.f0_def > 0.0) {
        return Err(usage("--f0-def must be positive"));
    }
    let audio = read_wav(&c.input).with_context(|| format!("reading {}", c.input.display()))?;
    let track = detect_pitch(&audio, &cfg)?;
    let utt = median_f0(&track, c.f0_def);
    let summary = json!({
        "id": audio.source_id(),
        "frames": track.frames.len(),
        "voiced_count": utt.voiced_count,
        "f0_utt": utt.f0_utt,
        "fallback_used": utt.fallback_used,
    });
    match c.csv.as_deref() {
        Some(p) if p == Path::new("-") => {
            write_pitch_csv(io::stdout().lock(), &track)?;
            eprintln!("{summary}");
        }
        Some(p) => {
            write_pitch_csv(BufWriter::new(File::create(p)?), &track)?;
            println!("{summary}");
        }
        None => println!("{summary}"),
    }
    if utt.fallback_used {
        warn!("no voiced frames; falling back to f0_def = {} Hz", c.f0_def);
    }
    Ok(0)
}

/// The warp for a single extraction: median (or default) f0 against the
/// default f0 moved by `shift` Mels.
fn single_warp(c: &ExtractCmd, audio: &f0warp::AudioBuffer) -> Result<WarpSpec> {
    let plan = if c.shift == 0.0 {
        AugmentationPlan::single(c.f0_def)
    } else {
        make_plan(c.f0_def, &[0.0, c.shift])
    }
    .map_err(usage)?;
    let entry = *plan.entries.last().expect("non-empty plan");
    let f0_utt = if c.normalize {
        let utt = median_f0(&detect_pitch(audio, &c.pitch.config()?)?, c.f0_def);
        if utt.fallback_used {
            warn!("no voiced frames; normalization falls back to zero shift");
        }
        info!("median f0 {:.2} Hz over {} voiced frames", utt.f0_utt, utt.voiced_count);
        utt.f0_utt
    } else {
        c.f0_def
    };
    Ok(compute_warp(f0_utt, entry.f0_def)?)
}

fn extract(c: ExtractCmd, kind: FeatureKind) -> Result<u8> {
    let warping = c.normalize || c.shift != 0.0;
    let cfg = c.features.config(kind, warping)?;
    if !(c.f0_def > 0.0) {
        return Err(usage("--f0-def must be positive"));
    }
    let audio = read_wav(&c.input).with_context(|| format!("reading {}", c.input.display()))?;
    let warp = single_warp(&c, &audio)?;
    let m = extract_features(&audio, &cfg, &warp)?;
    info!(
        "{}: {}x{} {kind}, delta {:.3} Mel{}, band {}-{} Hz",
        audio.source_id(),
        m.rows(),
        m.cols(),
        warp.delta_mel,
        if warp.clamped { " (clamped)" } else { "" },
        cfg.lo_freq,
        cfg.hi_freq
    );
    let matrix = Matrix::from(&m);
    match &c.out {
        Some(path) => write_matrix(path, &matrix)?,
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            write_text_matrix(&mut out, audio.source_id(), &matrix)?;
            out.flush()?;
        }
    }
    Ok(0)
}

fn process(c: ProcessCmd) -> Result<u8> {
    let plan = make_plan(c.f0_def, &c.augment_shifts).map_err(usage)?;
    let warping = c.normalize || plan.perturbs();
    let features = c.features.config(c.kind.into(), warping)?;
    let mut opts = ProcessOptions::new(features, plan, c.normalize);
    opts.pitch = c.pitch.config()?;
    opts.strict = c.strict;
    opts.workers = if c.workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        c.workers
    };
    let manifest = read_manifest(&c.manifest).with_context(|| format!("reading {}", c.manifest.display()))?;
    info!(
        "{} utterances x {} variants, {} workers, band {}-{} Hz",
        manifest.len(),
        opts.plan.len(),
        opts.workers,
        opts.features.lo_freq,
        opts.features.hi_freq
    );
    let summary = process_dataset(&manifest, &opts, &c.out)?;
    info!(
        "wrote {} matrices to {}; {} utterances failed",
        summary.records.len(),
        c.out.display(),
        summary.failures.len()
    );
    Ok(if summary.failures.is_empty() { 0 } else { EXIT_PARTIAL })
}

fn export(c: ExportCmd) -> Result<u8> {
    let n = export_text_archive(&c.archive, &c.out)?;
    info!("exported {n} matrices to {}", c.out.display());
    Ok(0)
}

fn inspect(c: InspectCmd) -> Result<u8> {
    if c.input.is_dir() {
        let index = read_index(&c.input)?;
        let mut ids: Vec<&str> = index.iter().map(|r| r.id.as_str()).collect();
        ids.dedup();
        let dims: Vec<usize> = {
            let mut d: Vec<usize> = index.iter().map(|r| r.cols).collect();
            d.sort_unstable();
            d.dedup();
            d
        };
        println!("archive {}", c.input.display());
        println!("records {}", index.len());
        println!("utterances {}", ids.len());
        println!("dims {dims:?}");
        println!("frames {}", index.iter().map(|r| r.rows).sum::<usize>());
        println!("clamped {}", index.iter().filter(|r| r.clamped).count());
        println!("fallback {}", index.iter().filter(|r| r.fallback_used && r.variant_shift_mel == 0.0).count());
        return Ok(0);
    }
    let m = read_matrix(&c.input)?;
    println!("rows {}", m.rows);
    println!("cols {}", m.cols);
    if !m.data.is_empty() {
        let min = m.data.iter().copied().fold(f32::INFINITY, f32::min);
        let max = m.data.iter().copied().fold(f32::NEG_INFINITY, f32::max);
        let mean = m.data.iter().map(|&v| f64::from(v)).sum::<f64>() / m.data.len() as f64;
        println!("min {min}");
        println!("max {max}");
        println!("mean {mean:.6}");
        let cols: Vec<String> = m.column_means().iter().map(|v| format!("{v:.4}")).collect();
        println!("column_means {}", cols.join(" "));
    }
    Ok(0)
}

fn synth_harmonic_cmd(c: SynthHarmonicCmd) -> Result<u8> {
    let audio = synth_harmonic(c.f0, c.duration, c.amplitude).map_err(usage)?;
    write_wav(&c.out, &audio)?;
    info!("wrote {} samples to {}", audio.len(), c.out.display());
    Ok(0)
}

fn synth_vowel_cmd(c: SynthVowelCmd) -> Result<u8> {
    let mut spec = VowelSpec {
        f0: c.f0,
        formants: [c.formants[0], c.formants[1], c.formants[2]],
        bandwidths: [c.bandwidths[0], c.bandwidths[1], c.bandwidths[2]],
        duration: c.duration,
        amplitude: c.amplitude,
    };
    spec.validate().map_err(usage)?;
    if let Some(target) = c.shift_to_f0 {
        spec = shift_vowel_for_f0(&spec, target).map_err(usage)?;
        info!(
            "formants moved to {:.1}/{:.1}/{:.1} Hz",
            spec.formants[0], spec.formants[1], spec.formants[2]
        );
    }
    let audio = synth_vowel(&spec)?;
    write_wav(&c.out, &audio)?;
    info!("wrote {} samples to {}", audio.len(), c.out.display());
    Ok(0)
}

fn demo(c: DemoCmd) -> Result<u8> {
    let adult = VowelSpec {
        f0: c.adult_f0,
        ..VowelSpec::adult_i()
    };
    let child = shift_vowel_for_f0(&adult, c.child_f0).map_err(usage)?;
    let a = synth_vowel(&adult)?;
    let b = synth_vowel(&child)?;
    let cfg = FeatureConfig::vowel_demo();
    debug_assert!(cfg.hi_freq <= WARPED_HI_FREQ);
    let pitch_cfg = f0warp::PitchConfig::default();

    let none = WarpSpec::identity(c.f0_def);
    let raw = mean_frame_distance(
        &extract_features(&a, &cfg, &none)?,
        &extract_features(&b, &cfg, &none)?,
    );
    let fa = median_f0(&detect_pitch(&a, &pitch_cfg)?, c.f0_def);
    let fb = median_f0(&detect_pitch(&b, &pitch_cfg)?, c.f0_def);
    let wa = compute_warp(fa.f0_utt, c.f0_def)?;
    let wb = compute_warp(fb.f0_utt, c.f0_def)?;
    let normalized = mean_frame_distance(&extract_features(&a, &cfg, &wa)?, &extract_features(&b, &cfg, &wb)?);

    println!("filterbank: {} filters, {}-{} Hz, log-Mel", cfg.num_filters, cfg.lo_freq, cfg.hi_freq);
    println!(
        "adult  f0 {:>6.1} Hz  formants {:.0}/{:.0}/{:.0} Hz  median f0 {:.2} Hz  delta {:+.2} Mel",
        adult.f0, adult.formants[0], adult.formants[1], adult.formants[2], fa.f0_utt, wa.delta_mel
    );
    println!(
        "child  f0 {:>6.1} Hz  formants {:.0}/{:.0}/{:.0} Hz  median f0 {:.2} Hz  delta {:+.2} Mel",
        child.f0, child.formants[0], child.formants[1], child.formants[2], fb.f0_utt, wb.delta_mel
    );
    println!("mean frame distance without normalization: {raw:.4}");
    println!("mean frame distance with normalization:    {normalized:.4}");
    println!("ratio: {:.4}", normalized / raw);
    Ok(0)
}
