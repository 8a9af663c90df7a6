use std::ffi::{CStr, CString};
use std::ptr;

use speechseg_ffi::*;

fn last_error() -> String {
    let p = ss_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn probs_handle(values: &[f64]) -> *mut SsProbs {
    let id = CString::new("t").unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { ss_probs_new(id.as_ptr(), 0.04, values.as_ptr(), values.len(), &mut out) };
    assert_eq!(st, SsStatus::Ok);
    out
}

#[test]
fn segment_round_trip() {
    let mut v = vec![0.05; 1000];
    for x in &mut v[100..800] {
        *x = 0.9;
    }
    // deepest interior point inside the 28 s run
    v[400] = 0.6;
    let p = probs_handle(&v);
    let cfg = ss_config_default(20.0);
    let mut segs = ptr::null_mut();
    assert_eq!(unsafe { ss_segment(p, &cfg, &mut segs) }, SsStatus::Ok);
    assert_eq!(unsafe { ss_segments_len(segs) }, 2);
    assert_eq!(unsafe { ss_segments_split_count(segs) }, 1);
    let (mut t, mut pmin) = (0.0, 0.0);
    assert_eq!(
        unsafe { ss_segments_split_get(segs, 0, &mut t, &mut pmin) },
        SsStatus::Ok
    );
    assert!((t - 16.0).abs() < 1e-9);
    assert_eq!(pmin, 0.6);

    let (mut s, mut e) = (0.0, 0.0);
    assert_eq!(
        unsafe { ss_segments_get(segs, 0, &mut s, &mut e) },
        SsStatus::Ok
    );
    assert!((s - 3.94).abs() < 1e-9 && (e - 16.0).abs() < 1e-9);

    let mut text = ptr::null_mut();
    assert_eq!(
        unsafe { ss_segments_to_jsonl(segs, &mut text) },
        SsStatus::Ok
    );
    let jsonl = unsafe { CStr::from_ptr(text) }
        .to_str()
        .unwrap()
        .to_string();
    assert_eq!(jsonl.lines().count(), 2);
    assert!(jsonl.starts_with("{\"audio_id\":\"t\",\"start\":3.940,\"end\":16.000}"));
    unsafe {
        ss_string_free(text);
        ss_segments_free(segs);
        ss_probs_free(p);
    }
}

#[test]
fn errors_are_reported() {
    let id = CString::new("t").unwrap();
    let mut out = ptr::null_mut();
    let bad = [0.5, 1.5];
    let st = unsafe { ss_probs_new(id.as_ptr(), 0.04, bad.as_ptr(), 2, &mut out) };
    assert_eq!(st, SsStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(last_error().contains("1.5"));

    let st = unsafe { ss_probs_new(ptr::null(), 0.04, bad.as_ptr(), 1, &mut out) };
    assert_eq!(st, SsStatus::NullPointer);
    assert!(last_error().contains("audio_id"));

    let p = probs_handle(&[0.9; 10]);
    let mut cfg = ss_config_default(20.0);
    cfg.max_len_s = 0.1;
    let mut segs = ptr::null_mut();
    assert_eq!(
        unsafe { ss_segment(p, &cfg, &mut segs) },
        SsStatus::SegmentationFailed
    );
    assert!(segs.is_null());
    cfg = ss_config_default(20.0);
    assert_eq!(unsafe { ss_segment(p, &cfg, &mut segs) }, SsStatus::Ok);
    let (mut s, mut e) = (0.0, 0.0);
    assert_eq!(
        unsafe { ss_segments_get(segs, 5, &mut s, &mut e) },
        SsStatus::OutOfRange
    );
    unsafe {
        ss_segments_free(segs);
        ss_probs_free(p);
        // NULL is accepted by every free function
        ss_segments_free(ptr::null_mut());
        ss_probs_free(ptr::null_mut());
        ss_string_free(ptr::null_mut());
        assert_eq!(ss_segments_len(ptr::null()), 0);
    }

    let bytes = [0xffu8, 0];
    let mut rep = SsWerReport::default();
    let st = unsafe { ss_wer(bytes.as_ptr().cast(), bytes.as_ptr().cast(), &mut rep) };
    assert_eq!(st, SsStatus::InvalidUtf8);
}

#[test]
fn scoring() {
    let r = CString::new("a b c\nd e").unwrap();
    let h = CString::new("a x c d\nd e").unwrap();
    let mut wer = SsWerReport::default();
    assert_eq!(
        unsafe { ss_wer(r.as_ptr(), h.as_ptr(), &mut wer) },
        SsStatus::Ok
    );
    assert_eq!(
        (wer.substitutions, wer.insertions, wer.deletions),
        (1, 1, 0)
    );
    assert_eq!(wer.wer, 2.0 / 5.0);

    let one = CString::new("a b").unwrap();
    assert_eq!(
        unsafe { ss_wer(r.as_ptr(), one.as_ptr(), &mut wer) },
        SsStatus::EvalFailed
    );

    let r = CString::new("the cat is on the mat").unwrap();
    let h = CString::new("the cat sat on the mat").unwrap();
    let mut bleu = SsBleuReport::default();
    assert_eq!(
        unsafe { ss_bleu(r.as_ptr(), h.as_ptr(), false, &mut bleu) },
        SsStatus::Ok
    );
    let expected = 100.0 * (1.0f64 / 48.0).powf(0.25);
    assert!((bleu.score - expected).abs() < 1e-9);
    assert_eq!(bleu.brevity_penalty, 1.0);
    assert_eq!((bleu.sys_len, bleu.ref_len), (6, 6));
}
