//! C ABI for speechseg.
//!
//! Objects cross the boundary as opaque handles (`SsProbs`, `SsSegments`)
//! created and freed by this library. Every fallible call returns an
//! `SsStatus`; on failure a message for the calling thread is available from
//! `ss_last_error_message` until the next failing call on that thread.
//! Panics never unwind into C: they are caught and reported as
//! `SS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use speechseg::eval::{bleu_with, wer_corpus, BleuOptions, MAX_ORDER};
use speechseg::formats::{format_segments, SegmentFormat};
use speechseg::{segment, Algorithm, FrameProbabilities, Segmentation, SegmenterConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    OutOfRange = 4,
    SegmentationFailed = 5,
    EvalFailed = 6,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsAlgorithm {
    Proposed = 0,
    Pdac = 1,
    Pthr = 2,
    Fixed = 3,
}

impl From<SsAlgorithm> for Algorithm {
    fn from(a: SsAlgorithm) -> Self {
        match a {
            SsAlgorithm::Proposed => Algorithm::Proposed,
            SsAlgorithm::Pdac => Algorithm::Pdac,
            SsAlgorithm::Pthr => Algorithm::Pthr,
            SsAlgorithm::Fixed => Algorithm::Fixed,
        }
    }
}

/// Segmenter settings. Durations are in seconds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsConfig {
    pub algorithm: SsAlgorithm,
    pub threshold: f64,
    pub min_len_s: f64,
    pub max_len_s: f64,
    pub expand_s: f64,
}

impl From<SsConfig> for SegmenterConfig {
    fn from(c: SsConfig) -> Self {
        SegmenterConfig {
            algorithm: c.algorithm.into(),
            threshold: c.threshold,
            minlen_s: c.min_len_s,
            maxlen_s: c.max_len_s,
            expand_s: c.expand_s,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SsWerReport {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub reference_words: usize,
    pub wer: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SsBleuReport {
    pub score: f64,
    /// Per-order n-gram precisions in percent.
    pub precisions: [f64; 4],
    pub brevity_penalty: f64,
    pub sys_len: usize,
    pub ref_len: usize,
}

/// Frame probabilities of one audio.
pub struct SsProbs(FrameProbabilities);

/// Segments of one audio plus the splits that produced them.
pub struct SsSegments(Segmentation);

struct Failure(SsStatus, String);

impl Failure {
    fn new(status: SsStatus, msg: impl ToString) -> Self {
        Self(status, msg.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SsStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(
            SsStatus::NullPointer,
            format!("{name} is NULL"),
        ))
    } else {
        Ok(())
    }
}

/// # Safety
/// `s` must be NULL or a NUL-terminated string valid for reads.
unsafe fn c_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(s, name)?;
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure::new(SsStatus::InvalidUtf8, format!("{name}: {e}")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL if none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Defaults: proposed algorithm, threshold 0.5, minimum 0.2 s, expansion 0.06 s.
#[no_mangle]
pub extern "C" fn ss_config_default(max_len_s: f64) -> SsConfig {
    let d = SegmenterConfig::new(Algorithm::Proposed, max_len_s);
    SsConfig {
        algorithm: SsAlgorithm::Proposed,
        threshold: d.threshold,
        min_len_s: d.minlen_s,
        max_len_s: d.maxlen_s,
        expand_s: d.expand_s,
    }
}

/// Copies `len` probabilities into a new handle. Values must lie in [0, 1]
/// and `stride_s` must be positive.
///
/// # Safety
/// `audio_id` must be a NUL-terminated string, `probs` must point to `len`
/// readable doubles (or may be NULL when `len` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_probs_new(
    audio_id: *const c_char,
    stride_s: f64,
    probs: *const f64,
    len: usize,
    out: *mut *mut SsProbs,
) -> SsStatus {
    guard(|| {
        non_null(out, "out")?;
        let id = c_str(audio_id, "audio_id")?;
        let values = if len == 0 {
            Vec::new()
        } else {
            non_null(probs, "probs")?;
            std::slice::from_raw_parts(probs, len).to_vec()
        };
        let p = FrameProbabilities::new(id, stride_s, values)
            .map_err(|e| Failure::new(SsStatus::InvalidArgument, e))?;
        *out = Box::into_raw(Box::new(SsProbs(p)));
        Ok(())
    })
}

/// # Safety
/// `probs` must be NULL or a handle from `ss_probs_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_probs_free(probs: *mut SsProbs) {
    if !probs.is_null() {
        drop(Box::from_raw(probs));
    }
}

/// Number of frames, 0 for NULL.
///
/// # Safety
/// `probs` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_probs_len(probs: *const SsProbs) -> usize {
    probs.as_ref().map_or(0, |p| p.0.len())
}

/// Segments `probs` with `config` into a new handle.
///
/// # Safety
/// `probs` must be a live handle, `config` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_segment(
    probs: *const SsProbs,
    config: *const SsConfig,
    out: *mut *mut SsSegments,
) -> SsStatus {
    guard(|| {
        non_null(probs, "probs")?;
        non_null(config, "config")?;
        non_null(out, "out")?;
        let cfg: SegmenterConfig = (*config).into();
        let seg = segment(&(*probs).0, &cfg)
            .map_err(|e| Failure::new(SsStatus::SegmentationFailed, e))?;
        *out = Box::into_raw(Box::new(SsSegments(seg)));
        Ok(())
    })
}

/// # Safety
/// `segments` must be NULL or a handle from `ss_segment` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_segments_free(segments: *mut SsSegments) {
    if !segments.is_null() {
        drop(Box::from_raw(segments));
    }
}

/// Number of segments, 0 for NULL.
///
/// # Safety
/// `segments` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_segments_len(segments: *const SsSegments) -> usize {
    segments.as_ref().map_or(0, |s| s.0.segments.len())
}

/// Start and end in seconds of segment `index`.
///
/// # Safety
/// `segments` must be a live handle; `start_s` and `end_s` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_segments_get(
    segments: *const SsSegments,
    index: usize,
    start_s: *mut f64,
    end_s: *mut f64,
) -> SsStatus {
    guard(|| {
        non_null(segments, "segments")?;
        non_null(start_s, "start_s")?;
        non_null(end_s, "end_s")?;
        let segs = (*segments).0.segments.segments();
        let s = segs.get(index).ok_or_else(|| {
            Failure::new(
                SsStatus::OutOfRange,
                format!("index {index} out of range for {} segments", segs.len()),
            )
        })?;
        *start_s = s.start_s;
        *end_s = s.end_s;
        Ok(())
    })
}

/// Number of splits made while enforcing the maximum length.
///
/// # Safety
/// `segments` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_segments_split_count(segments: *const SsSegments) -> usize {
    segments.as_ref().map_or(0, |s| s.0.trace.records.len())
}

/// Split `index`: the cut time in seconds and the probability there.
///
/// # Safety
/// `segments` must be a live handle; `t_hat_s` and `p_min` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_segments_split_get(
    segments: *const SsSegments,
    index: usize,
    t_hat_s: *mut f64,
    p_min: *mut f64,
) -> SsStatus {
    guard(|| {
        non_null(segments, "segments")?;
        non_null(t_hat_s, "t_hat_s")?;
        non_null(p_min, "p_min")?;
        let records = &(*segments).0.trace.records;
        let r = records.get(index).ok_or_else(|| {
            Failure::new(
                SsStatus::OutOfRange,
                format!("index {index} out of range for {} splits", records.len()),
            )
        })?;
        *t_hat_s = r.t_hat_s;
        *p_min = r.p_min;
        Ok(())
    })
}

/// Segments as JSON lines (`{"audio_id","start","end"}`, millisecond
/// precision). Free the string with `ss_string_free`.
///
/// # Safety
/// `segments` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_segments_to_jsonl(
    segments: *const SsSegments,
    out: *mut *mut c_char,
) -> SsStatus {
    guard(|| {
        non_null(segments, "segments")?;
        non_null(out, "out")?;
        let text = format_segments(
            std::slice::from_ref(&(*segments).0.segments),
            SegmentFormat::Jsonl,
        );
        let c = CString::new(text).map_err(|e| Failure::new(SsStatus::InvalidArgument, e))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn lines(text: &str) -> Vec<&str> {
    text.lines().collect()
}

/// Corpus WER over newline-separated, line-aligned texts.
///
/// # Safety
/// `reference` and `hypothesis` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_wer(
    reference: *const c_char,
    hypothesis: *const c_char,
    out: *mut SsWerReport,
) -> SsStatus {
    guard(|| {
        non_null(out, "out")?;
        let r = lines(c_str(reference, "reference")?);
        let h = lines(c_str(hypothesis, "hypothesis")?);
        let rep = wer_corpus(&r, &h).map_err(|e| Failure::new(SsStatus::EvalFailed, e))?;
        *out = SsWerReport {
            substitutions: rep.substitutions,
            deletions: rep.deletions,
            insertions: rep.insertions,
            reference_words: rep.reference_words,
            wer: rep.wer,
        };
        Ok(())
    })
}

/// Corpus BLEU over newline-separated, line-aligned texts.
///
/// # Safety
/// `reference` and `hypothesis` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_bleu(
    reference: *const c_char,
    hypothesis: *const c_char,
    effective_order: bool,
    out: *mut SsBleuReport,
) -> SsStatus {
    guard(|| {
        non_null(out, "out")?;
        let r = lines(c_str(reference, "reference")?);
        let h = lines(c_str(hypothesis, "hypothesis")?);
        let rep = bleu_with(&r, &h, BleuOptions { effective_order })
            .map_err(|e| Failure::new(SsStatus::EvalFailed, e))?;
        let mut precisions = [0.0; 4];
        precisions[..MAX_ORDER].copy_from_slice(&rep.precisions);
        *out = SsBleuReport {
            score: rep.score,
            precisions,
            brevity_penalty: rep.brevity_penalty,
            sys_len: rep.sys_len,
            ref_len: rep.ref_len,
        };
        Ok(())
    })
}
