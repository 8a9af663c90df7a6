//! Grid sweep over `maxlen` (and optionally the threshold): segment the
//! whole corpus at every grid point, score it, and keep the best row.

mod scorer;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segmenters::{segment, SegmentError};
use crate::stats::{corpus_stats, SegmentStats};
use crate::types::{FrameProbabilities, SegmentSet, SegmenterConfig};

pub use scorer::{
    boundary_f1, external_scorer, parse_metric, BoundaryF1Scorer, ExternalScorer, FnScorer, Scorer,
    ScorerError, TextMetric, TextScorer,
};

pub const DEFAULT_MAX_LENS: [f64; 5] = [8.0, 10.0, 15.0, 20.0, 30.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Minimize,
    Maximize,
}

impl Objective {
    fn better(&self, a: f64, b: f64) -> bool {
        match self {
            Objective::Minimize => a < b,
            Objective::Maximize => a > b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub max_lens: Vec<f64>,
    /// When absent the base config's threshold is used.
    pub thresholds: Option<Vec<f64>>,
    pub objective: Objective,
    /// Grid points evaluated concurrently; 0 means rayon's default.
    pub workers: usize,
}

impl SweepConfig {
    pub fn new(objective: Objective) -> Self {
        Self {
            max_lens: DEFAULT_MAX_LENS.to_vec(),
            thresholds: None,
            objective,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub maxlen_s: f64,
    pub threshold: f64,
}

impl GridPoint {
    /// File-name friendly label, e.g. `maxlen_10_thr_0.5`.
    pub fn tag(&self) -> String {
        format!("maxlen_{}_thr_{}", self.maxlen_s, self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: GridPoint,
    pub config: SegmenterConfig,
    pub stats: SegmentStats,
    pub metric: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestEntry {
    pub row: usize,
    pub point: GridPoint,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scorer: String,
    pub objective: Objective,
    pub rows: Vec<SweepRow>,
    pub best: Option<BestEntry>,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error("segmentation failed for {audio_id}")]
    Segment {
        audio_id: String,
        #[source]
        source: SegmentError,
    },
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

fn grid(base: &SegmenterConfig, cfg: &SweepConfig) -> Result<Vec<GridPoint>, SweepError> {
    if cfg.max_lens.is_empty() {
        return Err(SweepError::Config("maxlen grid is empty".into()));
    }
    let thresholds = match &cfg.thresholds {
        Some(t) if t.is_empty() => {
            return Err(SweepError::Config("threshold grid is empty".into()))
        }
        Some(t) => t.clone(),
        None => vec![base.threshold],
    };
    let mut points = Vec::new();
    for &maxlen_s in &cfg.max_lens {
        if maxlen_s <= base.minlen_s {
            return Err(SweepError::Config(format!(
                "maxlen {maxlen_s} must exceed minlen {}",
                base.minlen_s
            )));
        }
        for &threshold in &thresholds {
            points.push(GridPoint {
                maxlen_s,
                threshold,
            });
        }
    }
    Ok(points)
}

/// Segments every stream of the corpus with one configuration.
pub fn segment_corpus(
    corpus: &[FrameProbabilities],
    config: &SegmenterConfig,
) -> Result<Vec<SegmentSet>, SweepError> {
    corpus
        .par_iter()
        .map(|probs| {
            segment(probs, config)
                .map(|s| s.segments)
                .map_err(|source| SweepError::Segment {
                    audio_id: probs.audio_id().to_string(),
                    source,
                })
        })
        .collect()
}

/// Evaluates a single grid point. Rows are independent, so this reproduces
/// the corresponding row of [`run_sweep`].
pub fn run_point(
    corpus: &[FrameProbabilities],
    base: &SegmenterConfig,
    point: GridPoint,
    scorer: &dyn Scorer,
) -> Result<SweepRow, SweepError> {
    let config = SegmenterConfig {
        maxlen_s: point.maxlen_s,
        threshold: point.threshold,
        ..*base
    };
    config
        .validate()
        .map_err(|e| SweepError::Config(e.to_string()))?;
    let sets = segment_corpus(corpus, &config)?;
    let stats = corpus_stats(&sets);
    let (metric, error) = match scorer.score(&point, &sets) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(SweepRow {
        point,
        config,
        stats,
        metric,
        error,
    })
}

/// Picks the optimum over rows with a metric. Ties go to the smaller maxlen,
/// then the smaller threshold.
pub fn select_best(rows: &[SweepRow], objective: Objective) -> Option<BestEntry> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (rows[a].point, rows[b].point);
        pa.maxlen_s
            .total_cmp(&pb.maxlen_s)
            .then(pa.threshold.total_cmp(&pb.threshold))
    });
    let mut best: Option<BestEntry> = None;
    for i in order {
        let Some(v) = rows[i].metric else { continue };
        if best.as_ref().is_none_or(|b| objective.better(v, b.metric)) {
            best = Some(BestEntry {
                row: i,
                point: rows[i].point,
                metric: v,
            });
        }
    }
    best
}

pub fn run_sweep(
    corpus: &[FrameProbabilities],
    base: &SegmenterConfig,
    cfg: &SweepConfig,
    scorer: &dyn Scorer,
) -> Result<SweepReport, SweepError> {
    let points = grid(base, cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(|&p| run_point(corpus, base, p, scorer))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let best = select_best(&rows, cfg.objective);
    Ok(SweepReport {
        scorer: scorer.name(),
        objective: cfg.objective,
        rows,
        best,
    })
}

/// Plain-text table of a sweep report.
pub fn format_table(report: &SweepReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8} {:>9} {:>7} {:>9} {:>12}  note",
        "maxlen", "threshold", "count", "mean_s", "metric"
    );
    for (i, row) in report.rows.iter().enumerate() {
        let metric = row
            .metric
            .map(|m| format!("{m:.4}"))
            .unwrap_or_else(|| "-".into());
        let mean = row
            .stats
            .mean_s
            .map(|m| format!("{m:.3}"))
            .unwrap_or_else(|| "-".into());
        let note = match (&row.error, &report.best) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(b)) if b.row == i => "best".to_string(),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "{:>8} {:>9} {:>7} {:>9} {:>12}  {}",
            row.point.maxlen_s, row.point.threshold, row.stats.count, mean, metric, note
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Algorithm;

    fn corpus() -> Vec<FrameProbabilities> {
        // a 24 s run with dips at 6 s and 14 s
        let mut v = vec![0.05; 700];
        for x in &mut v[25..625] {
            *x = 0.9;
        }
        v[150] = 0.6;
        v[350] = 0.55;
        vec![FrameProbabilities::new("a", 0.04, v).unwrap()]
    }

    fn by_maxlen(
        table: &'static [(f64, f64)],
    ) -> impl Fn(&GridPoint, &[SegmentSet]) -> Result<f64, ScorerError> + Sync {
        move |p, _| {
            table
                .iter()
                .find(|(m, _)| *m == p.maxlen_s)
                .map(|(_, v)| *v)
                .ok_or_else(|| ScorerError::Other("no value".into()))
        }
    }

    #[test]
    fn lower_wer_wins_when_minimizing() {
        let scorer = FnScorer::new("table", by_maxlen(&[(10.0, 12.85), (20.0, 15.51)]));
        let cfg = SweepConfig {
            max_lens: vec![10.0, 20.0],
            ..SweepConfig::new(Objective::Minimize)
        };
        let base = SegmenterConfig::new(Algorithm::Proposed, 20.0);
        let rep = run_sweep(&corpus(), &base, &cfg, &scorer).unwrap();
        assert_eq!(rep.best.unwrap().point.maxlen_s, 10.0);
    }

    #[test]
    fn single_point_is_best() {
        let scorer = FnScorer::new("const", |_: &GridPoint, _: &[SegmentSet]| Ok(1.0));
        let cfg = SweepConfig {
            max_lens: vec![15.0],
            ..SweepConfig::new(Objective::Maximize)
        };
        let base = SegmenterConfig::new(Algorithm::Proposed, 20.0);
        let rep = run_sweep(&corpus(), &base, &cfg, &scorer).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.best.unwrap().row, 0);
    }

    #[test]
    fn ties_prefer_smaller_maxlen() {
        let scorer = FnScorer::new("const", |_: &GridPoint, _: &[SegmentSet]| Ok(3.0));
        let cfg = SweepConfig {
            max_lens: vec![30.0, 8.0, 15.0],
            ..SweepConfig::new(Objective::Maximize)
        };
        let base = SegmenterConfig::new(Algorithm::Proposed, 20.0);
        let rep = run_sweep(&corpus(), &base, &cfg, &scorer).unwrap();
        assert_eq!(rep.best.unwrap().point.maxlen_s, 8.0);
    }

    #[test]
    fn failing_rows_are_excluded() {
        let scorer = FnScorer::new("table", by_maxlen(&[(20.0, 40.0), (30.0, 20.0)]));
        let cfg = SweepConfig::new(Objective::Minimize);
        let base = SegmenterConfig::new(Algorithm::Proposed, 20.0);
        let rep = run_sweep(&corpus(), &base, &cfg, &scorer).unwrap();
        assert_eq!(rep.rows.len(), 5);
        assert_eq!(rep.rows.iter().filter(|r| r.error.is_some()).count(), 3);
        assert_eq!(rep.best.as_ref().unwrap().point.maxlen_s, 30.0);
        assert!(format_table(&rep).contains("error: no value"));
    }

    #[test]
    fn rows_reproduce_in_isolation() {
        let scorer = FnScorer::new("count", |_: &GridPoint, s: &[SegmentSet]| {
            Ok(s.iter().map(SegmentSet::len).sum::<usize>() as f64)
        });
        let cfg = SweepConfig {
            thresholds: Some(vec![0.5, 0.58]),
            ..SweepConfig::new(Objective::Maximize)
        };
        let base = SegmenterConfig::new(Algorithm::Proposed, 20.0);
        let c = corpus();
        let rep = run_sweep(&c, &base, &cfg, &scorer).unwrap();
        assert_eq!(rep.rows.len(), 10);
        for row in &rep.rows {
            assert_eq!(&run_point(&c, &base, row.point, &scorer).unwrap(), row);
        }
        let means: Vec<f64> = rep
            .rows
            .iter()
            .filter(|r| r.point.threshold == 0.5)
            .map(|r| r.stats.mean_s.unwrap())
            .collect();
        assert!(means.windows(2).all(|w| w[0] <= w[1] + 1e-9));
    }

    #[test]
    fn bad_grids_are_rejected() {
        let scorer = FnScorer::new("const", |_: &GridPoint, _: &[SegmentSet]| Ok(0.0));
        let base = SegmenterConfig::new(Algorithm::Proposed, 20.0);
        let empty = SweepConfig {
            max_lens: vec![],
            ..SweepConfig::new(Objective::Minimize)
        };
        assert!(matches!(
            run_sweep(&corpus(), &base, &empty, &scorer),
            Err(SweepError::Config(_))
        ));
        let too_small = SweepConfig {
            max_lens: vec![0.1],
            ..SweepConfig::new(Objective::Minimize)
        };
        assert!(matches!(
            run_sweep(&corpus(), &base, &too_small, &scorer),
            Err(SweepError::Config(_))
        ));
    }
}
