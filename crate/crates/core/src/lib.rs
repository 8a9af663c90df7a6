//! Speech segmentation from frame-level segment probabilities, plus the
//! long-form evaluation tools used to compare segmentations.
//!
//! * [`chunker`]: 20 s windows with 2 s overlap, overlap averaging, training labels
//! * [`segmenters`]: threshold/minlen/maxlen/expand segmentation and the pDAC,
//!   pTHR and fixed-length baselines
//! * [`eval`]: WER, resegmentation, punctuation F1, BLEU
//! * [`sweep`]: `maxlen` grid search against a pluggable scorer

pub mod chunker;
pub mod eval;
pub mod formats;
pub mod manifest;
pub mod segmenters;
pub mod stats;
pub mod sweep;
pub mod synth;
pub mod types;

pub use segmenters::{segment, Segmentation, SplitRecord, SplitTrace};
pub use stats::{segment_stats, SegmentStats};
pub use synth::{synth_probs, SynthParams};
pub use types::{
    validate_probs, Algorithm, FrameProbabilities, LabelSequence, Segment, SegmentSet,
    SegmenterConfig, ValidationError,
};
