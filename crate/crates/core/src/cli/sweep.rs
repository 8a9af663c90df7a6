use std::path::PathBuf;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use speechseg::formats::read_probs_file;
use speechseg::sweep::{
    format_table, run_sweep, ExternalScorer, Objective, Scorer, SweepConfig, TextMetric,
    TextScorer, DEFAULT_MAX_LENS,
};
use speechseg::SegmenterConfig;

use super::{emit, read_lines, to_json_line, write_manifest, AlgorithmArg, Ctx};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum BuiltinScorer {
    BuiltinWer,
    BuiltinBleu,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveArg {
    Minimize,
    Maximize,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub probs: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_MAX_LENS.to_vec())]
    pub max_lens: Vec<f64>,
    /// Threshold grid; defaults to the single `--threshold`.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Proposed)]
    pub algorithm: AlgorithmArg,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0.2)]
    pub min_len: f64,
    #[arg(long, default_value_t = 0.06)]
    pub expand: f64,
    /// Shell command; `{}` is replaced by the segment file of each grid point.
    /// The last non-empty stdout line must be the metric.
    #[arg(long, required_unless_present = "scorer", conflicts_with = "scorer")]
    pub scorer_cmd: Option<String>,
    /// Score `<hyp-dir>/maxlen_<m>_thr_<t>.txt` against `--ref` after resegmentation.
    #[arg(long, value_enum, requires_all = ["reference", "hyp_dir"])]
    pub scorer: Option<BuiltinScorer>,
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub hyp_dir: Option<PathBuf>,
    /// Required with --scorer-cmd; builtin scorers pick their own.
    #[arg(long, value_enum, required_unless_present = "scorer")]
    pub objective: Option<ObjectiveArg>,
    /// Where segment files for the external scorer are written.
    #[arg(long)]
    pub workdir: Option<PathBuf>,
    /// Seconds per external scorer call.
    #[arg(long, default_value_t = 600.0)]
    pub timeout: f64,
    /// JSON report with every row.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, a: SweepArgs) -> Result<()> {
    let corpus =
        read_probs_file(&a.probs).with_context(|| format!("reading {}", a.probs.display()))?;
    let base = SegmenterConfig {
        algorithm: a.algorithm.into(),
        threshold: a.threshold,
        minlen_s: a.min_len,
        // replaced per grid point
        maxlen_s: a.max_lens.iter().copied().fold(f64::NAN, f64::max),
        expand_s: a.expand,
    };

    let mut temp_workdir = None;
    let (scorer, default_objective): (Box<dyn Scorer>, Objective) = match (&a.scorer, &a.scorer_cmd)
    {
        (Some(builtin), _) => {
            let reference = read_lines(a.reference.as_ref().expect("clap requires --ref"))?;
            let hyp_dir = a.hyp_dir.clone().expect("clap requires --hyp-dir");
            let (metric, objective) = match builtin {
                BuiltinScorer::BuiltinWer => (TextMetric::Wer, Objective::Minimize),
                BuiltinScorer::BuiltinBleu => (TextMetric::Bleu, Objective::Maximize),
            };
            (
                Box::new(TextScorer::new(metric, reference, hyp_dir)),
                objective,
            )
        }
        (None, Some(template)) => {
            let workdir = match &a.workdir {
                Some(d) => d.clone(),
                None => {
                    let d = std::env::temp_dir()
                        .join(format!("speechseg-sweep-{}", std::process::id()));
                    temp_workdir = Some(d.clone());
                    d
                }
            };
            std::fs::create_dir_all(&workdir)
                .with_context(|| format!("creating {}", workdir.display()))?;
            let timeout = Duration::try_from_secs_f64(a.timeout)
                .with_context(|| format!("bad --timeout {}", a.timeout))?;
            (
                Box::new(ExternalScorer::new(template.clone(), workdir, timeout)),
                Objective::Maximize,
            )
        }
        (None, None) => unreachable!("clap requires a scorer"),
    };

    let cfg = SweepConfig {
        max_lens: a.max_lens.clone(),
        thresholds: a.thresholds.clone(),
        objective: match a.objective {
            Some(ObjectiveArg::Minimize) => Objective::Minimize,
            Some(ObjectiveArg::Maximize) => Objective::Maximize,
            None => default_objective,
        },
        workers: ctx.workers,
    };
    let report = run_sweep(&corpus, &base, &cfg, scorer.as_ref());
    if let Some(d) = temp_workdir {
        let _ = std::fs::remove_dir_all(d);
    }
    let report = report?;

    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: {}: {}",
            row.point.tag(),
            row.error.as_deref().unwrap_or_default()
        );
    }
    emit(None, format_table(&report).as_bytes())?;
    if let Some(out) = &a.out {
        emit(Some(out), &to_json_line(&report)?)?;
    }
    let mut inputs = vec![a.probs.as_path()];
    if let Some(r) = &a.reference {
        inputs.push(r.as_path());
    }
    write_manifest(ctx, "sweep", &a, &inputs, a.out.as_deref())
}
