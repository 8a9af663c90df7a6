//! Scorers used by the sweep: an external command, built-in WER/BLEU over
//! pre-computed hypothesis files, and boundary F1 against an oracle.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::eval::{bleu, resegment, tokenize_lines, wer_corpus};
use crate::formats::{format_segments, SegmentFormat};
use crate::types::SegmentSet;

use super::GridPoint;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("scorer timed out after {0:?}")]
    Timeout(Duration),
    #[error("scorer exited with {status}: {stderr}")]
    NonZeroExit { status: String, stderr: String },
    #[error("could not parse a number from scorer output {0:?}")]
    Parse(String),
    #[error("command template has no {{}} placeholder: {0:?}")]
    NoPlaceholder(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

pub trait Scorer: Sync {
    fn name(&self) -> String;
    fn score(&self, point: &GridPoint, segments: &[SegmentSet]) -> Result<f64, ScorerError>;
}

/// Wraps a closure as a scorer.
pub struct FnScorer<F> {
    name: String,
    f: F,
}

impl<F> FnScorer<F>
where
    F: Fn(&GridPoint, &[SegmentSet]) -> Result<f64, ScorerError> + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self {
            name: name.into(),
            f,
        }
    }
}

impl<F> Scorer for FnScorer<F>
where
    F: Fn(&GridPoint, &[SegmentSet]) -> Result<f64, ScorerError> + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn score(&self, point: &GridPoint, segments: &[SegmentSet]) -> Result<f64, ScorerError> {
        (self.f)(point, segments)
    }
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "'\\''"))
}

/// Last non-empty line of `output`, parsed as a decimal number.
pub fn parse_metric(output: &str) -> Result<f64, ScorerError> {
    let last = output
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| ScorerError::Parse(output.to_string()))?;
    match last.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ScorerError::Parse(last.to_string())),
    }
}

/// Runs `template` through `sh -c` in `workdir`, with every `{}` replaced by
/// the quoted segment file path, and reads the metric from the last line of
/// standard output.
pub fn external_scorer(
    template: &str,
    segment_file: &Path,
    workdir: &Path,
    timeout: Duration,
) -> Result<f64, ScorerError> {
    if !template.contains("{}") {
        return Err(ScorerError::NoPlaceholder(template.to_string()));
    }
    let cmd = template.replace("{}", &shell_quote(&segment_file.to_string_lossy()));
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .current_dir(workdir)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;

    let mut stdout = child.stdout.take().expect("stdout is piped");
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        stderr.read_to_string(&mut s).map(|_| s)
    });

    let started = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if started.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(ScorerError::Timeout(timeout));
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let out = out_reader
        .join()
        .map_err(|_| ScorerError::Other("stdout reader panicked".into()))??;
    let err = err_reader
        .join()
        .map_err(|_| ScorerError::Other("stderr reader panicked".into()))??;
    if !status.success() {
        return Err(ScorerError::NonZeroExit {
            status: status.to_string(),
            stderr: err.trim().to_string(),
        });
    }
    parse_metric(&out)
}

/// Scores each grid point by writing its segments to
/// `<workdir>/segments_<point>.jsonl` and running an external command on it.
/// Invocations are serialized.
pub struct ExternalScorer {
    template: String,
    workdir: PathBuf,
    timeout: Duration,
    lock: Mutex<()>,
}

impl ExternalScorer {
    pub fn new(
        template: impl Into<String>,
        workdir: impl Into<PathBuf>,
        timeout: Duration,
    ) -> Self {
        Self {
            template: template.into(),
            workdir: workdir.into(),
            timeout,
            lock: Mutex::new(()),
        }
    }
}

impl Scorer for ExternalScorer {
    fn name(&self) -> String {
        format!("external:{}", self.template)
    }

    fn score(&self, point: &GridPoint, segments: &[SegmentSet]) -> Result<f64, ScorerError> {
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let path = self.workdir.join(format!("segments_{}.jsonl", point.tag()));
        std::fs::write(&path, format_segments(segments, SegmentFormat::Jsonl))?;
        external_scorer(&self.template, &path, &self.workdir, self.timeout)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextMetric {
    Wer,
    Bleu,
}

/// Scores the hypothesis text produced for each grid point, found at
/// `<hyp_dir>/<point tag>.txt`, against one reference segment per line.
/// The hypothesis is resegmented onto the reference before scoring.
pub struct TextScorer {
    metric: TextMetric,
    reference: Vec<String>,
    hyp_dir: PathBuf,
}

impl TextScorer {
    pub fn new(metric: TextMetric, reference: Vec<String>, hyp_dir: impl Into<PathBuf>) -> Self {
        Self {
            metric,
            reference,
            hyp_dir: hyp_dir.into(),
        }
    }

    pub fn hyp_path(&self, point: &GridPoint) -> PathBuf {
        self.hyp_dir.join(format!("{}.txt", point.tag()))
    }
}

impl Scorer for TextScorer {
    fn name(&self) -> String {
        match self.metric {
            TextMetric::Wer => "builtin-wer".into(),
            TextMetric::Bleu => "builtin-bleu".into(),
        }
    }

    fn score(&self, point: &GridPoint, _segments: &[SegmentSet]) -> Result<f64, ScorerError> {
        let text = std::fs::read_to_string(self.hyp_path(point))?;
        let words: Vec<&str> = text.split_whitespace().collect();
        let refs = tokenize_lines(&self.reference);
        let reseg = resegment(&words, &refs).map_err(|e| ScorerError::Other(e.to_string()))?;
        let hyp_lines = reseg.lines(&words);
        let value = match self.metric {
            TextMetric::Wer => wer_corpus(&self.reference, &hyp_lines).map(|r| 100.0 * r.wer),
            TextMetric::Bleu => bleu(&self.reference, &hyp_lines).map(|r| r.score),
        };
        value.map_err(|e| ScorerError::Other(e.to_string()))
    }
}

/// Boundary F1 (0 to 1) against oracle segmentations. Segment starts and
/// ends are matched one-to-one, start to start and end to end, within
/// `tolerance_s`.
pub struct BoundaryF1Scorer {
    oracle: Vec<SegmentSet>,
    tolerance_s: f64,
}

impl BoundaryF1Scorer {
    pub fn new(oracle: Vec<SegmentSet>, tolerance_s: f64) -> Self {
        Self {
            oracle,
            tolerance_s,
        }
    }
}

/// Greedy one-to-one matching of two sorted point lists within `tol`.
fn count_matches(a: &[f64], b: &[f64], tol: f64) -> usize {
    let (mut i, mut j, mut hits) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        if (a[i] - b[j]).abs() <= tol + 1e-9 {
            hits += 1;
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    hits
}

pub fn boundary_f1(oracle: &[SegmentSet], predicted: &[SegmentSet], tolerance_s: f64) -> f64 {
    let (mut hits, mut n_oracle, mut n_pred) = (0usize, 0usize, 0usize);
    for o in oracle {
        let p = predicted.iter().find(|p| p.audio_id() == o.audio_id());
        let o_starts: Vec<f64> = o.segments().iter().map(|s| s.start_s).collect();
        let o_ends: Vec<f64> = o.segments().iter().map(|s| s.end_s).collect();
        n_oracle += 2 * o.len();
        if let Some(p) = p {
            let p_starts: Vec<f64> = p.segments().iter().map(|s| s.start_s).collect();
            let p_ends: Vec<f64> = p.segments().iter().map(|s| s.end_s).collect();
            n_pred += 2 * p.len();
            hits += count_matches(&o_starts, &p_starts, tolerance_s);
            hits += count_matches(&o_ends, &p_ends, tolerance_s);
        }
    }
    if n_oracle == 0 || n_pred == 0 {
        return 0.0;
    }
    let precision = hits as f64 / n_pred as f64;
    let recall = hits as f64 / n_oracle as f64;
    if hits == 0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl Scorer for BoundaryF1Scorer {
    fn name(&self) -> String {
        "boundary-f1".into()
    }

    fn score(&self, _point: &GridPoint, segments: &[SegmentSet]) -> Result<f64, ScorerError> {
        Ok(boundary_f1(&self.oracle, segments, self.tolerance_s))
    }
}
