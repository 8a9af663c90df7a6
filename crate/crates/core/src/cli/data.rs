use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use speechseg::chunker::{
    labels_from_segments, merge_window_probs, split_windows, window_training_examples,
};
use speechseg::formats::{
    format_segments, read_probs_file, read_segments_file, stride_s_of, write_label_windows,
    write_prob_records, write_trace, SegmentFormat,
};
use speechseg::stats::corpus_stats;
use speechseg::{segment as run_segmenter, segment_stats, synth_probs, FrameProbabilities};
use speechseg::{SegmenterConfig, SynthParams};

use super::{emit, to_json_line, write_manifest, AlgorithmArg, Ctx};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Jsonl,
    Tsv,
}

impl From<FormatArg> for SegmentFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => SegmentFormat::Jsonl,
            FormatArg::Tsv => SegmentFormat::Tsv,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SegmentArgs {
    /// Probability JSONL, or raw little-endian f32 (`.f32`/`.bin`) with a `.json` sidecar.
    #[arg(long)]
    pub probs: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Proposed)]
    pub algorithm: AlgorithmArg,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Seconds.
    #[arg(long, default_value_t = 0.2)]
    pub min_len: f64,
    /// Seconds.
    #[arg(long)]
    pub max_len: f64,
    /// Seconds added to each side of every segment.
    #[arg(long, default_value_t = 0.06)]
    pub expand: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write one JSON object per split.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
    pub format: FormatArg,
}

pub fn segment(ctx: &Ctx, a: SegmentArgs) -> Result<()> {
    let config = SegmenterConfig {
        algorithm: a.algorithm.into(),
        threshold: a.threshold,
        minlen_s: a.min_len,
        maxlen_s: a.max_len,
        expand_s: a.expand,
    };
    config.validate()?;
    let streams =
        read_probs_file(&a.probs).with_context(|| format!("reading {}", a.probs.display()))?;
    let results = streams
        .par_iter()
        .map(|p| run_segmenter(p, &config).with_context(|| format!("segmenting {}", p.audio_id())))
        .collect::<Result<Vec<_>>>()?;

    let sets: Vec<_> = results.iter().map(|r| r.segments.clone()).collect();
    emit(
        a.out.as_deref(),
        format_segments(&sets, a.format.into()).as_bytes(),
    )?;
    if let Some(trace_path) = &a.trace {
        let mut buf = Vec::new();
        for r in &results {
            write_trace(&mut buf, r.segments.audio_id(), &r.trace.records)?;
        }
        emit(Some(trace_path), &buf)?;
    }
    write_manifest(ctx, "segment", &a, &[&a.probs], a.out.as_deref())
}

#[derive(Debug, Args, Serialize)]
pub struct MergeArgs {
    /// Probability JSONL with one record per window, in window order per audio.
    #[arg(long)]
    pub chunks: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    pub window: f64,
    #[arg(long, default_value_t = 2.0)]
    pub overlap: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Groups records by audio id in order of first appearance.
fn group_by_audio(records: Vec<FrameProbabilities>) -> Vec<(String, Vec<FrameProbabilities>)> {
    let mut groups: Vec<(String, Vec<FrameProbabilities>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(id, _)| id == r.audio_id()) {
            Some((_, g)) => g.push(r),
            None => groups.push((r.audio_id().to_string(), vec![r])),
        }
    }
    groups
}

pub fn merge(ctx: &Ctx, a: MergeArgs) -> Result<()> {
    let hop = a.window - a.overlap;
    let records =
        read_probs_file(&a.chunks).with_context(|| format!("reading {}", a.chunks.display()))?;
    let mut merged = Vec::new();
    for (audio_id, chunks) in group_by_audio(records) {
        let stride = chunks[0].stride_s();
        if let Some(bad) = chunks
            .iter()
            .find(|c| (c.stride_s() - stride).abs() > 1e-12)
        {
            bail!(
                "{audio_id}: chunks disagree on stride ({} s vs {} s)",
                stride,
                bad.stride_s()
            );
        }
        let last = chunks.last().expect("groups are non-empty");
        let audio_len = (chunks.len() - 1) as f64 * hop + last.len() as f64 * stride;
        let windows = split_windows(audio_len, a.window, a.overlap)?;
        let per_window: Vec<Vec<f64>> = chunks.iter().map(|c| c.probs().to_vec()).collect();
        merged.push(
            merge_window_probs(&audio_id, &per_window, &windows, stride)
                .with_context(|| format!("merging {audio_id}"))?,
        );
    }
    let mut buf = Vec::new();
    write_prob_records(&mut buf, &merged)?;
    emit(a.out.as_deref(), &buf)?;
    write_manifest(ctx, "merge", &a, &[&a.chunks], a.out.as_deref())
}

#[derive(Debug, Args, Serialize)]
pub struct LabelsArgs {
    #[arg(long)]
    pub segments: PathBuf,
    /// Seconds; applied to every audio in the file.
    #[arg(long)]
    pub audio_len: f64,
    #[arg(long, default_value_t = 40)]
    pub stride_ms: u64,
    #[arg(long, default_value_t = 20.0)]
    pub window: f64,
    /// Defaults to the window length.
    #[arg(long)]
    pub hop: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn labels(ctx: &Ctx, a: LabelsArgs) -> Result<()> {
    let stride = stride_s_of(a.stride_ms);
    let sets = read_segments_file(&a.segments)
        .with_context(|| format!("reading {}", a.segments.display()))?;
    let mut buf = Vec::new();
    for set in &sets {
        let labels = labels_from_segments(set, a.audio_len, stride)
            .with_context(|| format!("labelling {}", set.audio_id()))?;
        let windows = window_training_examples(&labels, a.window, a.hop.unwrap_or(a.window))?;
        write_label_windows(&mut buf, set.audio_id(), stride, &windows)?;
    }
    emit(a.out.as_deref(), &buf)?;
    write_manifest(ctx, "labels", &a, &[&a.segments], a.out.as_deref())
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub segments: PathBuf,
    /// Seconds; applied to every audio in the file.
    #[arg(long)]
    pub audio_len: f64,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    /// Boundary ramp width in frames (0 for hard edges).
    #[arg(long, default_value_t = 3.0)]
    pub slope: f64,
    /// Audio `i` in the file uses `seed + i`.
    #[arg(long, default_value_t = 17)]
    pub seed: u64,
    #[arg(long, default_value_t = 40)]
    pub stride_ms: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn synth(ctx: &Ctx, a: SynthArgs) -> Result<()> {
    let sets = read_segments_file(&a.segments)
        .with_context(|| format!("reading {}", a.segments.display()))?;
    let mut streams = Vec::with_capacity(sets.len());
    for (i, set) in sets.into_iter().enumerate() {
        let id = set.audio_id().to_string();
        let set = set
            .with_audio_len(Some(a.audio_len))
            .with_context(|| format!("{id} does not fit in {} s", a.audio_len))?;
        let params = SynthParams {
            stride_s: stride_s_of(a.stride_ms),
            noise_sigma: a.sigma,
            boundary_slope_frames: a.slope,
            seed: a.seed.wrapping_add(i as u64),
        };
        streams.push(synth_probs(&set, &params)?);
    }
    let mut buf = Vec::new();
    write_prob_records(&mut buf, &streams)?;
    emit(a.out.as_deref(), &buf)?;
    write_manifest(ctx, "synth", &a, &[&a.segments], a.out.as_deref())
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[arg(long)]
    pub segments: PathBuf,
    /// Also report each audio separately.
    #[arg(long)]
    pub per_audio: bool,
}

#[derive(Serialize)]
struct PerAudio<'a> {
    audio_id: &'a str,
    #[serde(flatten)]
    stats: speechseg::SegmentStats,
}

pub fn stats(a: StatsArgs) -> Result<()> {
    let sets = read_segments_file(&a.segments)
        .with_context(|| format!("reading {}", a.segments.display()))?;
    let corpus = corpus_stats(&sets);
    let bytes = if a.per_audio {
        let per: Vec<_> = sets
            .iter()
            .map(|s| PerAudio {
                audio_id: s.audio_id(),
                stats: segment_stats(s),
            })
            .collect();
        to_json_line(&serde_json::json!({ "corpus": corpus, "per_audio": per }))?
    } else {
        to_json_line(&corpus)?
    };
    emit(None::<&Path>, &bytes)
}
