//! Command-line surface. Every command reads its inputs, writes one primary
//! output (a file given by `--out`, or stdout) and, for file outputs, a
//! `<out>.manifest.json` describing the run.

mod data;
mod eval;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use speechseg::manifest::RunManifest;
use speechseg::Algorithm;

#[derive(Debug, Parser)]
#[command(
    name = "speechseg",
    version,
    about = "Speech segmentation and long-form evaluation"
)]
pub struct Cli {
    /// Worker threads for multi-audio inputs (0 = one per core).
    #[arg(long, global = true, env = "SPEECHSEG_WORKERS", default_value_t = 0)]
    pub workers: usize,

    /// Do not write `<out>.manifest.json` next to outputs.
    #[arg(long, global = true)]
    pub no_manifest: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn frame probabilities into segments.
    Segment(data::SegmentArgs),
    /// Average overlapping per-window probabilities into one stream per audio.
    Merge(data::MergeArgs),
    /// Frame labels for training windows from oracle segments.
    Labels(data::LabelsArgs),
    /// Transcript and translation scoring.
    #[command(subcommand)]
    Eval(eval::EvalCommand),
    /// Grid search over maxlen (and optionally threshold).
    Sweep(sweep::SweepArgs),
    /// Synthetic probability streams from oracle segments.
    Synth(data::SynthArgs),
    /// Duration statistics of a segment file.
    Stats(data::StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmArg {
    Proposed,
    Pdac,
    Pthr,
    Fixed,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Proposed => Algorithm::Proposed,
            AlgorithmArg::Pdac => Algorithm::Pdac,
            AlgorithmArg::Pthr => Algorithm::Pthr,
            AlgorithmArg::Fixed => Algorithm::Fixed,
        }
    }
}

pub struct Ctx {
    pub workers: usize,
    pub manifest: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        workers: cli.workers,
        manifest: !cli.no_manifest,
    };
    // the global pool can only be built once per process
    rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.workers)
        .build_global()
        .context("building worker pool")?;
    match cli.command {
        Command::Segment(a) => data::segment(&ctx, a),
        Command::Merge(a) => data::merge(&ctx, a),
        Command::Labels(a) => data::labels(&ctx, a),
        Command::Eval(c) => eval::run(&ctx, c),
        Command::Sweep(a) => sweep::run(&ctx, a),
        Command::Synth(a) => data::synth(&ctx, a),
        Command::Stats(a) => data::stats(a),
    }
}

/// Writes `bytes` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            w.write_all(bytes)?;
            w.flush()
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)?;
            lock.flush()?;
        }
    }
    Ok(())
}

pub fn write_manifest<C: Serialize>(
    ctx: &Ctx,
    command: &str,
    config: &C,
    inputs: &[&Path],
    out: Option<&Path>,
) -> Result<()> {
    let Some(out) = out else { return Ok(()) };
    if !ctx.manifest {
        return Ok(());
    }
    let config = serde_json::to_value(config)?;
    let manifest = RunManifest::new(command, config, inputs).context("hashing inputs")?;
    manifest
        .write_for(out)
        .with_context(|| format!("writing manifest for {}", out.display()))?;
    Ok(())
}

pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::to_string).collect())
}

pub fn to_json_line<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}
