//! Fixed-size windowing of long audio, overlap averaging of per-window
//! probabilities, and frame-label generation for training data.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{frames_for, FrameProbabilities, LabelSequence, SegmentSet, ValidationError};

pub const DEFAULT_WINDOW_S: f64 = 20.0;
pub const DEFAULT_OVERLAP_S: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChunkError {
    #[error("audio length must be finite and non-negative, got {0}")]
    NegativeAudioLength(f64),
    #[error("overlap {overlap} must be in [0, window {window})")]
    BadOverlap { window: f64, overlap: f64 },
    #[error("hop must be positive, got {0}")]
    BadHop(f64),
    #[error("window {index} covers {expected} frames but its sequence has {actual}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("got {sequences} probability sequences for {windows} windows")]
    WindowCount { windows: usize, sequences: usize },
    #[error("frame {0} is not covered by any window")]
    Uncovered(usize),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub index: usize,
    pub start_s: f64,
    pub end_s: f64,
}

impl Window {
    /// Frame range on the stride grid: start rounded down, end rounded up.
    pub fn frame_range(&self, stride_s: f64) -> std::ops::Range<usize> {
        let start = snap_down(self.start_s / stride_s);
        let end = snap_up(self.end_s / stride_s);
        start..end.max(start)
    }
}

fn snap_down(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() < 1e-6 {
        r.max(0.0) as usize
    } else {
        x.floor().max(0.0) as usize
    }
}

fn snap_up(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() < 1e-6 {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Splits `[0, audio_len_s]` into windows starting every `window_len_s - overlap_s`
/// seconds. The last window is truncated at the end of the audio.
pub fn split_windows(
    audio_len_s: f64,
    window_len_s: f64,
    overlap_s: f64,
) -> Result<Vec<Window>, ChunkError> {
    if !(audio_len_s >= 0.0 && audio_len_s.is_finite()) {
        return Err(ChunkError::NegativeAudioLength(audio_len_s));
    }
    if !(overlap_s >= 0.0 && overlap_s < window_len_s && window_len_s.is_finite()) {
        return Err(ChunkError::BadOverlap {
            window: window_len_s,
            overlap: overlap_s,
        });
    }
    let hop = window_len_s - overlap_s;
    let count = if audio_len_s <= window_len_s {
        1
    } else {
        // 1e-9 keeps exact multiples like (38 - 20) / 18 from rounding up
        ((audio_len_s - window_len_s) / hop - 1e-9).ceil() as usize + 1
    };
    Ok((0..count)
        .map(|index| {
            let start_s = index as f64 * hop;
            Window {
                index,
                start_s,
                end_s: (start_s + window_len_s).min(audio_len_s),
            }
        })
        .collect())
}

/// Averages per-window probability sequences back onto one stream.
///
/// Every window's sequence must cover its frame range exactly, except the
/// last, which may be shorter; the output then ends where the last sequence
/// ends.
pub fn merge_window_probs(
    audio_id: &str,
    per_window: &[Vec<f64>],
    windows: &[Window],
    stride_s: f64,
) -> Result<FrameProbabilities, ChunkError> {
    if per_window.len() != windows.len() {
        return Err(ChunkError::WindowCount {
            windows: windows.len(),
            sequences: per_window.len(),
        });
    }
    if !(stride_s > 0.0 && stride_s.is_finite()) {
        return Err(ValidationError::NonPositiveStride(stride_s).into());
    }
    let mut total_frames = 0usize;
    let mut ranges = Vec::with_capacity(windows.len());
    for (i, (w, seq)) in windows.iter().zip(per_window).enumerate() {
        let range = w.frame_range(stride_s);
        let expected = range.len();
        let is_last = i + 1 == windows.len();
        if seq.len() != expected && !(is_last && seq.len() < expected) {
            return Err(ChunkError::LengthMismatch {
                index: i,
                expected,
                actual: seq.len(),
            });
        }
        total_frames = total_frames.max(range.start + seq.len());
        ranges.push(range.start);
    }

    let mut sum = vec![0.0f64; total_frames];
    let mut count = vec![0u32; total_frames];
    for (start, seq) in ranges.into_iter().zip(per_window) {
        for (k, &v) in seq.iter().enumerate() {
            sum[start + k] += v;
            count[start + k] += 1;
        }
    }
    let mut probs = Vec::with_capacity(total_frames);
    for (t, (s, c)) in sum.into_iter().zip(count).enumerate() {
        if c == 0 {
            return Err(ChunkError::Uncovered(t));
        }
        probs.push(s / c as f64);
    }
    Ok(FrameProbabilities::new(audio_id, stride_s, probs)?)
}

/// Cuts a stream into the per-window slices a chunked model would produce.
pub fn slice_windows(probs: &FrameProbabilities, windows: &[Window]) -> Vec<Vec<f64>> {
    let values = probs.probs();
    windows
        .iter()
        .map(|w| {
            let r = w.frame_range(probs.stride_s());
            values[r.start.min(values.len())..r.end.min(values.len())].to_vec()
        })
        .collect()
}

/// `l_t = 1` iff the centre of frame `t`, `(t + 0.5) * stride`, falls inside
/// an oracle segment (start inclusive, end exclusive).
pub fn labels_from_segments(
    oracle: &SegmentSet,
    audio_len_s: f64,
    stride_s: f64,
) -> Result<LabelSequence, ChunkError> {
    if !(audio_len_s >= 0.0 && audio_len_s.is_finite()) {
        return Err(ChunkError::NegativeAudioLength(audio_len_s));
    }
    if !(stride_s > 0.0 && stride_s.is_finite()) {
        return Err(ValidationError::NonPositiveStride(stride_s).into());
    }
    let n = frames_for(audio_len_s, stride_s);
    let segs = oracle.segments();
    let mut labels = vec![0u8; n];
    let mut k = 0;
    for (t, label) in labels.iter_mut().enumerate() {
        let center = (t as f64 + 0.5) * stride_s;
        while k < segs.len() && segs[k].end_s <= center {
            k += 1;
        }
        if k < segs.len() && segs[k].start_s <= center {
            *label = 1;
        }
    }
    Ok(LabelSequence::new(oracle.audio_id(), stride_s, labels)?)
}

/// Fixed-length label window for trainer export. `labels` always holds the
/// full window length; frames past `valid` are zero padding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingWindow {
    pub window: Window,
    pub labels: Vec<u8>,
    pub valid: usize,
}

pub fn window_training_examples(
    labels: &LabelSequence,
    window_len_s: f64,
    hop_s: f64,
) -> Result<Vec<TrainingWindow>, ChunkError> {
    if !(hop_s > 0.0 && hop_s.is_finite()) {
        return Err(ChunkError::BadHop(hop_s));
    }
    if !(window_len_s > 0.0 && window_len_s.is_finite()) {
        return Err(ChunkError::BadOverlap {
            window: window_len_s,
            overlap: 0.0,
        });
    }
    let stride = labels.stride_s();
    let win_frames = snap_up(window_len_s / stride).max(1);
    let hop_frames = snap_up(hop_s / stride).max(1);
    let values = labels.labels();
    let n = values.len();
    let mut out = Vec::new();
    let mut start = 0usize;
    while start < n {
        let end = (start + win_frames).min(n);
        let mut padded = vec![0u8; win_frames];
        padded[..end - start].copy_from_slice(&values[start..end]);
        out.push(TrainingWindow {
            window: Window {
                index: out.len(),
                start_s: start as f64 * stride,
                end_s: (start + win_frames) as f64 * stride,
            },
            labels: padded,
            valid: end - start,
        });
        if end == n {
            break;
        }
        start += hop_frames;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bounds(ws: &[Window]) -> Vec<(f64, f64)> {
        ws.iter().map(|w| (w.start_s, w.end_s)).collect()
    }

    #[test]
    fn windows_for_38_seconds() {
        let ws = split_windows(38.0, 20.0, 2.0).unwrap();
        assert_eq!(bounds(&ws), vec![(0.0, 20.0), (18.0, 38.0)]);
    }

    #[test]
    fn short_audio_single_window() {
        let ws = split_windows(15.0, 20.0, 2.0).unwrap();
        assert_eq!(bounds(&ws), vec![(0.0, 15.0)]);
    }

    #[test]
    fn windows_for_56_seconds() {
        let ws = split_windows(56.0, 20.0, 2.0).unwrap();
        assert_eq!(bounds(&ws), vec![(0.0, 20.0), (18.0, 38.0), (36.0, 56.0)]);
    }

    #[test]
    fn split_windows_errors() {
        assert!(matches!(
            split_windows(-1.0, 20.0, 2.0),
            Err(ChunkError::NegativeAudioLength(_))
        ));
        assert!(matches!(
            split_windows(10.0, 20.0, 20.0),
            Err(ChunkError::BadOverlap { .. })
        ));
    }

    #[test]
    fn overlap_frames_are_averaged() {
        let ws = split_windows(38.0, 20.0, 2.0).unwrap();
        // 500 frames each; the 50 frames of [18, 20] are shared
        let first = vec![0.8; 500];
        let second = vec![0.4; 500];
        let merged = merge_window_probs("a", &[first, second], &ws, 0.04).unwrap();
        assert_eq!(merged.len(), 950);
        let v = merged.probs();
        assert_eq!(v[449], 0.8);
        assert!(v[450..500].iter().all(|&x| (x - 0.6).abs() < 1e-12));
        assert_eq!(v[500], 0.4);
    }

    #[test]
    fn constant_windows_merge_to_constant() {
        let ws = split_windows(56.0, 20.0, 2.0).unwrap();
        let seqs: Vec<Vec<f64>> = ws
            .iter()
            .map(|w| vec![0.7; w.frame_range(0.04).len()])
            .collect();
        let merged = merge_window_probs("a", &seqs, &ws, 0.04).unwrap();
        assert_eq!(merged.len(), 1400);
        assert!(merged.probs().iter().all(|&x| x == 0.7));
    }

    #[test]
    fn single_window_is_identity() {
        let ws = split_windows(2.0, 20.0, 2.0).unwrap();
        let seq: Vec<f64> = (0..50).map(|i| i as f64 / 50.0).collect();
        let merged = merge_window_probs("a", std::slice::from_ref(&seq), &ws, 0.04).unwrap();
        assert_eq!(merged.probs(), seq.as_slice());
    }

    #[test]
    fn merge_rejects_wrong_lengths() {
        let ws = split_windows(38.0, 20.0, 2.0).unwrap();
        let err =
            merge_window_probs("a", &[vec![0.5; 499], vec![0.5; 500]], &ws, 0.04).unwrap_err();
        assert_eq!(
            err,
            ChunkError::LengthMismatch {
                index: 0,
                expected: 500,
                actual: 499
            }
        );
        assert!(merge_window_probs("a", &[vec![0.5; 500]], &ws, 0.04).is_err());
    }

    #[test]
    fn frame_centre_labels() {
        let oracle = SegmentSet::from_pairs("a", &[(1.0, 2.0)], None).unwrap();
        let labels = labels_from_segments(&oracle, 3.0, 0.04).unwrap();
        assert_eq!(labels.len(), 75);
        for (t, &l) in labels.labels().iter().enumerate() {
            assert_eq!(l, u8::from((25..=49).contains(&t)), "frame {t}");
        }
    }

    #[test]
    fn labels_empty_and_full() {
        let empty = SegmentSet::empty("a", None);
        assert!(labels_from_segments(&empty, 2.0, 0.04)
            .unwrap()
            .labels()
            .iter()
            .all(|&l| l == 0));
        let full = SegmentSet::from_pairs("a", &[(0.0, 2.0)], None).unwrap();
        assert!(labels_from_segments(&full, 2.0, 0.04)
            .unwrap()
            .labels()
            .iter()
            .all(|&l| l == 1));
    }

    #[test]
    fn training_windows_exact_tiling() {
        let labels = LabelSequence::new("a", 0.04, vec![1; 1000]).unwrap();
        let ws = window_training_examples(&labels, 20.0, 20.0).unwrap();
        assert_eq!(ws.len(), 2);
        assert!(ws.iter().all(|w| w.valid == 500 && w.labels.len() == 500));
    }

    #[test]
    fn training_windows_with_half_hop() {
        let labels = LabelSequence::new("a", 0.04, vec![0; 750]).unwrap();
        let ws = window_training_examples(&labels, 20.0, 10.0).unwrap();
        assert_eq!(ws.len(), 2);
        assert_eq!(ws[1].window.start_s, 10.0);
        assert!(ws.iter().all(|w| w.valid == 500));
    }

    #[test]
    fn training_window_padding() {
        let labels = LabelSequence::new("a", 0.04, vec![1; 125]).unwrap();
        let ws = window_training_examples(&labels, 20.0, 20.0).unwrap();
        assert_eq!(ws.len(), 1);
        assert_eq!(ws[0].valid, 125);
        assert_eq!(ws[0].labels.len(), 500);
        assert!(ws[0].labels[125..].iter().all(|&l| l == 0));
        assert!(window_training_examples(&labels, 20.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn window_count_formula(len in 0.0f64..400.0, win in 1.0f64..40.0, frac in 0.0f64..0.9) {
            let overlap = win * frac;
            let ws = split_windows(len, win, overlap).unwrap();
            let hop = win - overlap;
            let formula = if len <= win { 1 } else { ((len - win) / hop - 1e-9).ceil() as usize + 1 };
            prop_assert_eq!(ws.len(), formula.max(1));
            prop_assert_eq!(ws[0].start_s, 0.0);
            prop_assert!((ws.last().unwrap().end_s - len).abs() < 1e-9);
            for pair in ws.windows(2) {
                prop_assert!((pair[0].end_s - pair[1].start_s - overlap).abs() < 1e-9
                    || pair[1].end_s == len);
                prop_assert!(pair[1].start_s <= pair[0].end_s + 1e-9);
            }
        }

        #[test]
        fn split_then_merge_reproduces_stream(
            probs in proptest::collection::vec(0.0f64..=1.0, 1..3000),
        ) {
            let p = FrameProbabilities::new("a", 0.04, probs).unwrap();
            let ws = split_windows(p.duration_s(), 20.0, 2.0).unwrap();
            let merged = merge_window_probs("a", &slice_windows(&p, &ws), &ws, 0.04).unwrap();
            prop_assert_eq!(merged.len(), p.len());
            for (a, b) in merged.probs().iter().zip(p.probs()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
