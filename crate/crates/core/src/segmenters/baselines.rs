//! Reference baselines: probabilistic divide-and-conquer (pDAC), threshold
//! segmentation with fixed-size chopping (pTHR), and plain fixed-length tiling.
//!
//! These are reimplementations of the published descriptions and are not
//! bit-compatible with the original tools.

use crate::types::{FrameProbabilities, Segment, SegmentSet, SegmenterConfig, TIME_EPS};

use super::rmq::RangeArgMin;
use super::stages::{expand, frames_to_set, runs};
use super::SegmentError;

/// pDAC: start from the stream trimmed to its first and last frame above the
/// threshold. A candidate longer than `maxlen_s` is split at its interior
/// probability minimum, and each part is trimmed of leading and trailing
/// frames at or below the threshold. Parts in `[minlen_s, maxlen_s]` are
/// accepted as they are, shorter parts are dropped, longer ones recurse.
pub fn segment_pdac(
    probs: &FrameProbabilities,
    config: &SegmenterConfig,
) -> Result<SegmentSet, SegmentError> {
    config.validate()?;
    let values = probs.probs();
    let stride = probs.stride_s();
    let audio_len = probs.duration_s();
    let thr = config.threshold;
    let rmq = RangeArgMin::new(values);

    let trim = |mut lo: usize, mut hi: usize| -> Option<(usize, usize)> {
        while lo < hi && values[lo] <= thr {
            lo += 1;
        }
        while hi > lo && values[hi - 1] <= thr {
            hi -= 1;
        }
        (lo < hi).then_some((lo, hi))
    };

    let mut accepted = Vec::new();
    let mut stack: Vec<(usize, usize)> = trim(0, values.len()).into_iter().collect();
    while let Some((lo, hi)) = stack.pop() {
        let dur = (hi - lo) as f64 * stride;
        if dur <= config.maxlen_s + TIME_EPS || hi - lo < 2 {
            if dur >= config.minlen_s - TIME_EPS {
                accepted.push((lo, hi));
            }
            continue;
        }
        let t_hat = rmq.argmin(lo + 1, hi);
        if let Some(right) = trim(t_hat, hi) {
            stack.push(right);
        }
        if let Some(left) = trim(lo, t_hat) {
            stack.push(left);
        }
    }
    let set = frames_to_set(probs.audio_id(), &accepted, stride, audio_len);
    Ok(expand(&set, config.expand_s, audio_len))
}

/// pTHR: threshold runs, drop runs shorter than `minlen_s`, then chop any run
/// longer than `maxlen_s` into consecutive `maxlen_s` pieces (the remainder
/// is kept whatever its length).
pub fn segment_pthr(
    probs: &FrameProbabilities,
    config: &SegmenterConfig,
) -> Result<SegmentSet, SegmentError> {
    config.validate()?;
    let stride = probs.stride_s();
    let audio_len = probs.duration_s();
    let labels: Vec<u8> = probs
        .probs()
        .iter()
        .map(|&p| u8::from(p > config.threshold))
        .collect();
    let piece = ((config.maxlen_s / stride + 1e-6).floor() as usize).max(1);

    let mut spans = Vec::new();
    for (lo, hi) in runs(&labels) {
        if ((hi - lo) as f64 * stride) < config.minlen_s - TIME_EPS {
            continue;
        }
        let mut s = lo;
        while s < hi {
            let e = (s + piece).min(hi);
            spans.push((s, e));
            s = e;
        }
    }
    let set = frames_to_set(probs.audio_id(), &spans, stride, audio_len);
    Ok(expand(&set, config.expand_s, audio_len))
}

/// Contiguous `piece_s` pieces covering `[0, audio_len_s]`; the last piece is
/// the remainder.
pub fn segment_fixed(
    audio_id: &str,
    audio_len_s: f64,
    piece_s: f64,
) -> Result<SegmentSet, SegmentError> {
    if !(piece_s > 0.0 && piece_s.is_finite()) {
        return Err(SegmentError::BadPiece(piece_s));
    }
    if !(audio_len_s >= 0.0 && audio_len_s.is_finite()) {
        return Err(SegmentError::BadAudioLength(audio_len_s));
    }
    let mut segments = Vec::new();
    let mut i = 0usize;
    loop {
        let start = i as f64 * piece_s;
        if start >= audio_len_s - TIME_EPS {
            break;
        }
        segments.push(Segment {
            start_s: start,
            end_s: ((i + 1) as f64 * piece_s).min(audio_len_s),
        });
        i += 1;
    }
    Ok(SegmentSet::from_parts(
        audio_id.to_string(),
        segments,
        Some(audio_len_s),
    ))
}
