//! Domain types shared by every stage: probability streams, frame labels,
//! time segments and segmenter configuration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default encoder stride (40 ms per frame).
pub const DEFAULT_STRIDE_S: f64 = 0.04;

/// Tolerance used when comparing times that were derived from frame indices.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("probability {value} at index {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("stride must be positive, got {0}")]
    NonPositiveStride(f64),
    #[error("label {value} at index {index} is not 0 or 1")]
    InvalidLabel { index: usize, value: u8 },
    #[error("segment [{start}, {end}] is invalid: {reason}")]
    InvalidSegment {
        start: f64,
        end: f64,
        reason: &'static str,
    },
    #[error("segments {0} and {1} are out of order or overlap")]
    Overlap(usize, usize),
    #[error("segment {index} ends at {end} past the audio length {audio_len}")]
    OutOfBounds {
        index: usize,
        end: f64,
        audio_len: f64,
    },
    #[error("audio length must be finite and non-negative, got {0}")]
    InvalidAudioLength(f64),
    #[error("invalid segmenter config: {0}")]
    Config(String),
}

/// Per-frame probability that the frame belongs to a speech segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameProbabilities {
    audio_id: String,
    stride_s: f64,
    probs: Vec<f64>,
}

impl FrameProbabilities {
    pub fn new(
        audio_id: impl Into<String>,
        stride_s: f64,
        probs: Vec<f64>,
    ) -> Result<Self, ValidationError> {
        check_stride(stride_s)?;
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(ValidationError::ProbabilityOutOfRange { index, value });
        }
        Ok(Self {
            audio_id: audio_id.into(),
            stride_s,
            probs,
        })
    }

    pub fn audio_id(&self) -> &str {
        &self.audio_id
    }

    pub fn stride_s(&self) -> f64 {
        self.stride_s
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Duration covered by the stream, `T * stride`.
    pub fn duration_s(&self) -> f64 {
        self.probs.len() as f64 * self.stride_s
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }
}

/// Checks raw values and wraps them into a [`FrameProbabilities`].
pub fn validate_probs(
    raw: &[f64],
    stride_s: f64,
    audio_id: &str,
) -> Result<FrameProbabilities, ValidationError> {
    FrameProbabilities::new(audio_id, stride_s, raw.to_vec())
}

/// Binary frame labels, 1 when the frame is inside a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSequence {
    audio_id: String,
    stride_s: f64,
    labels: Vec<u8>,
}

impl LabelSequence {
    pub fn new(
        audio_id: impl Into<String>,
        stride_s: f64,
        labels: Vec<u8>,
    ) -> Result<Self, ValidationError> {
        check_stride(stride_s)?;
        if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(ValidationError::InvalidLabel { index, value });
        }
        Ok(Self {
            audio_id: audio_id.into(),
            stride_s,
            labels,
        })
    }

    pub fn audio_id(&self) -> &str {
        &self.audio_id
    }

    pub fn stride_s(&self) -> f64 {
        self.stride_s
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start_s: f64,
    pub end_s: f64,
}

impl Segment {
    pub fn new(start_s: f64, end_s: f64) -> Result<Self, ValidationError> {
        let seg = Self { start_s, end_s };
        seg.check()?;
        Ok(seg)
    }

    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }

    fn check(&self) -> Result<(), ValidationError> {
        let reason = if !self.start_s.is_finite() || !self.end_s.is_finite() {
            Some("non-finite bound")
        } else if self.start_s < 0.0 {
            Some("negative start")
        } else if self.start_s >= self.end_s {
            Some("start must be before end")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(ValidationError::InvalidSegment {
                start: self.start_s,
                end: self.end_s,
                reason,
            }),
            None => Ok(()),
        }
    }
}

/// Sorted, non-overlapping segments of one audio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSet {
    audio_id: String,
    segments: Vec<Segment>,
    audio_len_s: Option<f64>,
}

impl SegmentSet {
    pub fn new(
        audio_id: impl Into<String>,
        segments: Vec<Segment>,
        audio_len_s: Option<f64>,
    ) -> Result<Self, ValidationError> {
        if let Some(len) = audio_len_s {
            if !len.is_finite() || len < 0.0 {
                return Err(ValidationError::InvalidAudioLength(len));
            }
        }
        for (i, seg) in segments.iter().enumerate() {
            seg.check()?;
            if i > 0 && segments[i - 1].end_s > seg.start_s {
                return Err(ValidationError::Overlap(i - 1, i));
            }
            if let Some(len) = audio_len_s {
                if seg.end_s > len + TIME_EPS {
                    return Err(ValidationError::OutOfBounds {
                        index: i,
                        end: seg.end_s,
                        audio_len: len,
                    });
                }
            }
        }
        Ok(Self {
            audio_id: audio_id.into(),
            segments,
            audio_len_s,
        })
    }

    pub fn empty(audio_id: impl Into<String>, audio_len_s: Option<f64>) -> Self {
        Self {
            audio_id: audio_id.into(),
            segments: Vec::new(),
            audio_len_s,
        }
    }

    /// Builds a set from `(start, end)` pairs.
    pub fn from_pairs(
        audio_id: impl Into<String>,
        pairs: &[(f64, f64)],
        audio_len_s: Option<f64>,
    ) -> Result<Self, ValidationError> {
        let segments = pairs
            .iter()
            .map(|&(s, e)| Segment::new(s, e))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(audio_id, segments, audio_len_s)
    }

    /// Internal constructor for stage outputs that are valid by construction.
    pub(crate) fn from_parts(
        audio_id: String,
        segments: Vec<Segment>,
        audio_len_s: Option<f64>,
    ) -> Self {
        debug_assert!(Self::new(audio_id.clone(), segments.clone(), audio_len_s).is_ok());
        Self {
            audio_id,
            segments,
            audio_len_s,
        }
    }

    pub fn audio_id(&self) -> &str {
        &self.audio_id
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn audio_len_s(&self) -> Option<f64> {
        self.audio_len_s
    }

    pub fn with_audio_len(mut self, audio_len_s: Option<f64>) -> Result<Self, ValidationError> {
        self.audio_len_s = audio_len_s;
        Self::new(self.audio_id, self.segments, self.audio_len_s)
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.segments.iter().map(|s| (s.start_s, s.end_s)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Proposed,
    Pdac,
    Pthr,
    Fixed,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Proposed => "proposed",
            Algorithm::Pdac => "pdac",
            Algorithm::Pthr => "pthr",
            Algorithm::Fixed => "fixed",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(Algorithm::Proposed),
            "pdac" => Ok(Algorithm::Pdac),
            "pthr" => Ok(Algorithm::Pthr),
            "fixed" => Ok(Algorithm::Fixed),
            other => Err(ValidationError::Config(format!(
                "unknown algorithm {other:?}"
            ))),
        }
    }
}

/// Hyper-parameters of a segmentation run. For [`Algorithm::Fixed`] the
/// piece length is `maxlen_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    pub algorithm: Algorithm,
    pub threshold: f64,
    pub minlen_s: f64,
    pub maxlen_s: f64,
    pub expand_s: f64,
}

impl SegmenterConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.5;
    pub const DEFAULT_MINLEN_S: f64 = 0.2;
    pub const DEFAULT_EXPAND_S: f64 = 0.06;

    /// Defaults for everything except `maxlen_s`, which has no sensible default.
    pub fn new(algorithm: Algorithm, maxlen_s: f64) -> Self {
        Self {
            algorithm,
            threshold: Self::DEFAULT_THRESHOLD,
            minlen_s: Self::DEFAULT_MINLEN_S,
            maxlen_s,
            expand_s: Self::DEFAULT_EXPAND_S,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let bad = |msg: String| Err(ValidationError::Config(msg));
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!(
                "threshold must be in (0, 1), got {}",
                self.threshold
            ));
        }
        if !(self.minlen_s >= 0.0 && self.minlen_s.is_finite()) {
            return bad(format!("minlen must be >= 0, got {}", self.minlen_s));
        }
        if !(self.maxlen_s > self.minlen_s && self.maxlen_s.is_finite()) {
            return bad(format!(
                "maxlen ({}) must be greater than minlen ({})",
                self.maxlen_s, self.minlen_s
            ));
        }
        if !(self.expand_s >= 0.0 && self.expand_s.is_finite()) {
            return bad(format!("expand must be >= 0, got {}", self.expand_s));
        }
        Ok(())
    }
}

fn check_stride(stride_s: f64) -> Result<(), ValidationError> {
    if stride_s > 0.0 && stride_s.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::NonPositiveStride(stride_s))
    }
}

/// Number of whole frames needed to cover `duration_s`, i.e. `ceil(duration / stride)`
/// with a small tolerance so exact multiples do not round up.
pub fn frames_for(duration_s: f64, stride_s: f64) -> usize {
    let x = duration_s / stride_s;
    let r = x.round();
    if (x - r).abs() < 1e-6 {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Nearest frame boundary index for a time that is expected to lie on the grid.
pub(crate) fn frame_index(time_s: f64, stride_s: f64) -> usize {
    (time_s / stride_s).round().max(0.0) as usize
}
