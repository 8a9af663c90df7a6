//! Deterministic synthetic probability streams built from an oracle
//! segmentation. Stands in for a trained frame classifier in tests and demos.
//!
//! The noise source is ChaCha8 seeded with `seed_from_u64`, so a given seed
//! produces the same stream on every platform and release.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::types::{frames_for, FrameProbabilities, SegmentSet};

/// Plateau value inside oracle segments.
pub const SPEECH_LEVEL: f64 = 0.95;
/// Plateau value outside oracle segments.
pub const SILENCE_LEVEL: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("oracle segment set for {0:?} has no audio length")]
    MissingAudioLength(String),
    #[error("noise sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("stride must be positive, got {0}")]
    InvalidStride(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub stride_s: f64,
    pub noise_sigma: f64,
    pub boundary_slope_frames: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            stride_s: crate::types::DEFAULT_STRIDE_S,
            noise_sigma: 0.05,
            boundary_slope_frames: 3.0,
            seed: 17,
        }
    }
}

/// Noise-free level at a frame whose centre is at `center_s`.
///
/// With a positive slope the level ramps linearly from the silence plateau to
/// the speech plateau over `slope_frames` frames centred on each boundary.
fn base_level(oracle: &SegmentSet, center_s: f64, slope_s: f64) -> f64 {
    let segs = oracle.segments();
    // first segment whose end is past the centre
    let idx = segs.partition_point(|s| s.end_s <= center_s);
    let inside = idx < segs.len() && segs[idx].start_s <= center_s;
    if slope_s <= 0.0 {
        return if inside { SPEECH_LEVEL } else { SILENCE_LEVEL };
    }
    let signed = if inside {
        let s = &segs[idx];
        (center_s - s.start_s).min(s.end_s - center_s)
    } else {
        let mut d = f64::INFINITY;
        if idx < segs.len() {
            d = d.min(segs[idx].start_s - center_s);
        }
        if idx > 0 {
            d = d.min(center_s - segs[idx - 1].end_s);
        }
        -d
    };
    let frac = (0.5 + signed / slope_s).clamp(0.0, 1.0);
    SILENCE_LEVEL + (SPEECH_LEVEL - SILENCE_LEVEL) * frac
}

pub fn synth_probs(
    oracle: &SegmentSet,
    params: &SynthParams,
) -> Result<FrameProbabilities, SynthError> {
    let audio_len = oracle
        .audio_len_s()
        .ok_or_else(|| SynthError::MissingAudioLength(oracle.audio_id().to_string()))?;
    if !(params.noise_sigma >= 0.0 && params.noise_sigma.is_finite()) {
        return Err(SynthError::InvalidSigma(params.noise_sigma));
    }
    if !(params.stride_s > 0.0 && params.stride_s.is_finite()) {
        return Err(SynthError::InvalidStride(params.stride_s));
    }
    let stride = params.stride_s;
    let n = frames_for(audio_len, stride);
    let slope_s = params.boundary_slope_frames.max(0.0) * stride;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let noise = (params.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, params.noise_sigma).expect("sigma checked above"));

    let probs = (0..n)
        .map(|t| {
            let center = (t as f64 + 0.5) * stride;
            let base = base_level(oracle, center, slope_s);
            match &noise {
                Some(dist) => (base + dist.sample(&mut rng)).clamp(0.0, 1.0),
                None => base,
            }
        })
        .collect();
    Ok(FrameProbabilities::new(oracle.audio_id(), stride, probs)
        .expect("values are clamped and stride is checked"))
}
