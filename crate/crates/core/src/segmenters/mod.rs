//! Probability stream to segment conversion.
//!
//! The main algorithm runs, in order: binarize, runs to segments, discard
//! short segments, split long segments at the probability minimum, expand.

mod baselines;
mod rmq;
mod stages;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{
    Algorithm, FrameProbabilities, Segment, SegmentSet, SegmenterConfig, ValidationError,
};

pub use baselines::{segment_fixed, segment_pdac, segment_pthr};
pub use stages::{binarize, discard_short, expand, runs_to_segments, split_long};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentError {
    #[error("segment [{start_s}, {end_s}] extends past the probability stream ({stream_s} s)")]
    BeyondStream {
        start_s: f64,
        end_s: f64,
        stream_s: f64,
    },
    #[error("piece length must be positive, got {0}")]
    BadPiece(f64),
    #[error("audio length must be finite and non-negative, got {0}")]
    BadAudioLength(f64),
    #[error(transparent)]
    Config(#[from] ValidationError),
}

/// One split made by [`split_long`]: the part that was split, the frame that
/// opens its right half, and the probability at that frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub segment: Segment,
    pub t_hat: usize,
    pub t_hat_s: f64,
    pub p_min: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitTrace {
    pub records: Vec<SplitRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub segments: SegmentSet,
    /// Only populated by [`Algorithm::Proposed`].
    pub trace: SplitTrace,
}

pub fn segment_proposed(
    probs: &FrameProbabilities,
    config: &SegmenterConfig,
) -> Result<(SegmentSet, SplitTrace), SegmentError> {
    config.validate()?;
    let audio_len = probs.duration_s();
    let labels = binarize(probs, config.threshold);
    let candidates = discard_short(&runs_to_segments(&labels), config.minlen_s);
    let (split, trace) = split_long(&candidates, probs, config.maxlen_s)?;
    Ok((expand(&split, config.expand_s, audio_len), trace))
}

/// Runs the algorithm selected in `config`. The fixed baseline tiles the
/// stream duration in `maxlen_s` pieces.
pub fn segment(
    probs: &FrameProbabilities,
    config: &SegmenterConfig,
) -> Result<Segmentation, SegmentError> {
    let (segments, trace) = match config.algorithm {
        Algorithm::Proposed => segment_proposed(probs, config)?,
        Algorithm::Pdac => (segment_pdac(probs, config)?, SplitTrace::default()),
        Algorithm::Pthr => (segment_pthr(probs, config)?, SplitTrace::default()),
        Algorithm::Fixed => {
            config.validate()?;
            (
                segment_fixed(probs.audio_id(), probs.duration_s(), config.maxlen_s)?,
                SplitTrace::default(),
            )
        }
    };
    Ok(Segmentation { segments, trace })
}
