//! Duration statistics over a segmentation.

use serde::{Deserialize, Serialize};

use crate::types::{Segment, SegmentSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
}

/// `mean_s`, `min_s`, `max_s` and `percentiles` are absent for an empty set.
/// `histogram[i]` counts segments with duration in `[i, i + 1)` seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub count: usize,
    pub total_s: f64,
    pub mean_s: Option<f64>,
    pub min_s: Option<f64>,
    pub max_s: Option<f64>,
    pub percentiles: Option<Percentiles>,
    pub histogram: Vec<usize>,
}

pub fn segment_stats(set: &SegmentSet) -> SegmentStats {
    stats_of(set.segments().iter())
}

/// Pools the segments of several audios into one set of statistics.
pub fn corpus_stats<'a>(sets: impl IntoIterator<Item = &'a SegmentSet>) -> SegmentStats {
    stats_of(sets.into_iter().flat_map(|s| s.segments().iter()))
}

fn stats_of<'a>(segments: impl Iterator<Item = &'a Segment>) -> SegmentStats {
    let mut durations: Vec<f64> = segments.map(Segment::duration).collect();
    let count = durations.len();
    let total_s: f64 = durations.iter().sum();
    if count == 0 {
        return SegmentStats {
            count,
            total_s,
            mean_s: None,
            min_s: None,
            max_s: None,
            percentiles: None,
            histogram: Vec::new(),
        };
    }
    durations.sort_by(f64::total_cmp);
    let max = durations[count - 1];
    let mut histogram = vec![0usize; max.floor() as usize + 1];
    for d in &durations {
        histogram[d.floor() as usize] += 1;
    }
    SegmentStats {
        count,
        total_s,
        mean_s: Some(total_s / count as f64),
        min_s: Some(durations[0]),
        max_s: Some(max),
        percentiles: Some(Percentiles {
            p50: nearest_rank(&durations, 50.0),
            p90: nearest_rank(&durations, 90.0),
            p99: nearest_rank(&durations, 99.0),
        }),
        histogram,
    }
}

// nearest-rank percentile on sorted, non-empty data
fn nearest_rank(sorted: &[f64], pct: f64) -> f64 {
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}
