//! Building blocks shared by the segmentation algorithms.

use crate::types::{frame_index, FrameProbabilities, LabelSequence, Segment, SegmentSet, TIME_EPS};

use super::rmq::RangeArgMin;
use super::{SegmentError, SplitRecord, SplitTrace};

/// `l_t = 1` iff `p_t > threshold` (strict).
pub fn binarize(probs: &FrameProbabilities, threshold: f64) -> LabelSequence {
    let labels = probs
        .probs()
        .iter()
        .map(|&p| u8::from(p > threshold))
        .collect();
    LabelSequence::new(probs.audio_id(), probs.stride_s(), labels)
        .expect("labels are binary and stride was validated")
}

/// Maximal runs of positive labels as half-open frame ranges.
pub(crate) fn runs(labels: &[u8]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (t, &l) in labels.iter().enumerate() {
        match (l == 1, start) {
            (true, None) => start = Some(t),
            (false, Some(s)) => {
                out.push((s, t));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, labels.len()));
    }
    out
}

pub(crate) fn frames_to_set(
    audio_id: &str,
    spans: &[(usize, usize)],
    stride_s: f64,
    audio_len_s: f64,
) -> SegmentSet {
    let segments = spans
        .iter()
        .map(|&(s, e)| Segment {
            start_s: s as f64 * stride_s,
            end_s: e as f64 * stride_s,
        })
        .collect();
    SegmentSet::from_parts(audio_id.to_string(), segments, Some(audio_len_s))
}

/// One segment per maximal run of 1s, spanning `[first * stride, (last + 1) * stride]`.
pub fn runs_to_segments(labels: &LabelSequence) -> SegmentSet {
    let stride = labels.stride_s();
    frames_to_set(
        labels.audio_id(),
        &runs(labels.labels()),
        stride,
        labels.len() as f64 * stride,
    )
}

/// Keeps segments whose duration is at least `minlen_s`.
pub fn discard_short(set: &SegmentSet, minlen_s: f64) -> SegmentSet {
    let kept = set
        .segments()
        .iter()
        .filter(|s| s.duration() >= minlen_s - TIME_EPS)
        .copied()
        .collect();
    SegmentSet::from_parts(set.audio_id().to_string(), kept, set.audio_len_s())
}

/// Recursively splits segments longer than `maxlen_s` at the earliest
/// minimum-probability frame strictly inside them. The split frame opens the
/// right part, so the parts always tile the original segment.
///
/// A single-frame part cannot be split further, so parts may exceed
/// `maxlen_s` only when `maxlen_s` is shorter than one stride.
pub fn split_long(
    set: &SegmentSet,
    probs: &FrameProbabilities,
    maxlen_s: f64,
) -> Result<(SegmentSet, SplitTrace), SegmentError> {
    let rmq = RangeArgMin::new(probs.probs());
    split_long_with(set, probs, &rmq, maxlen_s)
}

pub(crate) fn split_long_with(
    set: &SegmentSet,
    probs: &FrameProbabilities,
    rmq: &RangeArgMin<'_>,
    maxlen_s: f64,
) -> Result<(SegmentSet, SplitTrace), SegmentError> {
    let stride = probs.stride_s();
    let values = probs.probs();
    let mut out = Vec::with_capacity(set.len());
    let mut trace = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for seg in set.segments() {
        if seg.duration() <= maxlen_s + TIME_EPS {
            out.push(*seg);
            continue;
        }
        let first = frame_index(seg.start_s, stride);
        let last = frame_index(seg.end_s, stride);
        if last > values.len() {
            return Err(SegmentError::BeyondStream {
                start_s: seg.start_s,
                end_s: seg.end_s,
                stream_s: probs.duration_s(),
            });
        }
        // outer edges keep their original times; inner cuts sit on the grid
        let time_of = |f: usize| {
            if f == first {
                seg.start_s
            } else if f == last {
                seg.end_s
            } else {
                f as f64 * stride
            }
        };
        stack.push((first, last));
        while let Some((lo, hi)) = stack.pop() {
            let part = Segment {
                start_s: time_of(lo),
                end_s: time_of(hi),
            };
            if part.duration() > maxlen_s + TIME_EPS && hi - lo >= 2 {
                let t_hat = rmq.argmin(lo + 1, hi);
                trace.push(SplitRecord {
                    segment: part,
                    t_hat,
                    t_hat_s: t_hat as f64 * stride,
                    p_min: values[t_hat],
                });
                stack.push((t_hat, hi));
                stack.push((lo, t_hat));
            } else {
                out.push(part);
            }
        }
    }
    Ok((
        SegmentSet::from_parts(set.audio_id().to_string(), out, set.audio_len_s()),
        SplitTrace { records: trace },
    ))
}

/// Widens every segment by `expand_s` on both sides, clipped to
/// `[0, audio_len_s]`. Neighbours that would overlap are both cut at the
/// midpoint of their original gap.
pub fn expand(set: &SegmentSet, expand_s: f64, audio_len_s: f64) -> SegmentSet {
    let segs = set.segments();
    let mut out: Vec<Segment> = Vec::with_capacity(segs.len());
    for (i, seg) in segs.iter().enumerate() {
        let upper = audio_len_s.max(seg.end_s);
        let mut start = (seg.start_s - expand_s).max(0.0);
        let end = (seg.end_s + expand_s).min(upper);
        if let Some(prev) = out.last_mut() {
            if prev.end_s > start {
                let mid = 0.5 * (segs[i - 1].end_s + seg.start_s);
                prev.end_s = mid;
                start = mid;
            }
        }
        out.push(Segment {
            start_s: start,
            end_s: end,
        });
    }
    let len = set
        .audio_len_s()
        .map(|l| l.max(audio_len_s))
        .or(Some(audio_len_s));
    SegmentSet::from_parts(set.audio_id().to_string(), out, len)
}
