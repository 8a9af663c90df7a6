//! Line-oriented file formats.
//!
//! * probability records: `{"audio_id": str, "stride_ms": int, "probs": [f64...]}` per line,
//!   or raw little-endian `f32` frames next to a `{"audio_id", "stride_ms", "num_frames"}` sidecar
//! * segments: `{"audio_id": str, "start": s, "end": s}` per line (3 decimals), or
//!   `audio_id<TAB>start<TAB>end`
//! * label windows and split traces, JSON per line

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chunker::TrainingWindow;
use crate::segmenters::SplitRecord;
use crate::types::{FrameProbabilities, Segment, SegmentSet, ValidationError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}")]
    Invalid {
        line: usize,
        #[source]
        source: ValidationError,
    },
    #[error("stride {0} s is not a whole number of milliseconds")]
    FractionalStride(f64),
    #[error("raw probability file {path}: {msg}")]
    Raw { path: PathBuf, msg: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct ProbRecord {
    audio_id: String,
    stride_ms: u64,
    probs: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RawSidecar {
    pub audio_id: String,
    pub stride_ms: u64,
    pub num_frames: usize,
}

pub fn stride_ms_of(stride_s: f64) -> Result<u64, FormatError> {
    let ms = stride_s * 1000.0;
    let rounded = ms.round();
    if rounded < 1.0 || (ms - rounded).abs() > 1e-6 {
        return Err(FormatError::FractionalStride(stride_s));
    }
    Ok(rounded as u64)
}

pub fn stride_s_of(stride_ms: u64) -> f64 {
    stride_ms as f64 / 1000.0
}

pub fn read_prob_records<R: BufRead>(reader: R) -> Result<Vec<FrameProbabilities>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ProbRecord = serde_json::from_str(&line).map_err(|e| FormatError::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let probs = FrameProbabilities::new(rec.audio_id, stride_s_of(rec.stride_ms), rec.probs)
            .map_err(|source| FormatError::Invalid {
                line: line_no,
                source,
            })?;
        out.push(probs);
    }
    Ok(out)
}

pub fn write_prob_records<W: Write>(
    mut w: W,
    streams: &[FrameProbabilities],
) -> Result<(), FormatError> {
    for p in streams {
        let rec = ProbRecord {
            audio_id: p.audio_id().to_string(),
            stride_ms: stride_ms_of(p.stride_s())?,
            probs: p.probs().to_vec(),
        };
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Sidecar path for a raw `f32` file: `<path>.json`.
pub fn sidecar_path(raw: &Path) -> PathBuf {
    let mut s = raw.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn read_raw_probs(raw_path: &Path) -> Result<FrameProbabilities, FormatError> {
    let raw_err = |msg: String| FormatError::Raw {
        path: raw_path.to_path_buf(),
        msg,
    };
    let side_path = sidecar_path(raw_path);
    let side: RawSidecar = serde_json::from_slice(&std::fs::read(&side_path)?)
        .map_err(|e| raw_err(format!("bad sidecar {}: {e}", side_path.display())))?;
    let bytes = std::fs::read(raw_path)?;
    if bytes.len() != side.num_frames * 4 {
        return Err(raw_err(format!(
            "expected {} frames ({} bytes), found {} bytes",
            side.num_frames,
            side.num_frames * 4,
            bytes.len()
        )));
    }
    let probs = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    FrameProbabilities::new(side.audio_id, stride_s_of(side.stride_ms), probs)
        .map_err(|e| raw_err(e.to_string()))
}

/// Writes values as `f32`; values not representable in single precision are rounded.
pub fn write_raw_probs(raw_path: &Path, probs: &FrameProbabilities) -> Result<(), FormatError> {
    let mut bytes = Vec::with_capacity(probs.len() * 4);
    for &v in probs.probs() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    std::fs::write(raw_path, bytes)?;
    let side = RawSidecar {
        audio_id: probs.audio_id().to_string(),
        stride_ms: stride_ms_of(probs.stride_s())?,
        num_frames: probs.len(),
    };
    std::fs::write(
        sidecar_path(raw_path),
        serde_json::to_vec(&side).map_err(std::io::Error::from)?,
    )?;
    Ok(())
}

/// Reads either form, picking raw when the path ends in `.f32` or `.bin`.
pub fn read_probs_file(path: &Path) -> Result<Vec<FrameProbabilities>, FormatError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("f32") | Some("bin") => Ok(vec![read_raw_probs(path)?]),
        _ => {
            let f = std::fs::File::open(path)?;
            read_prob_records(std::io::BufReader::new(f))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SegmentFormat {
    #[default]
    Jsonl,
    Tsv,
}

#[derive(Debug, Deserialize)]
struct SegmentRecord {
    audio_id: String,
    start: f64,
    end: f64,
}

/// Parses a segment file, accepting JSON and TSV lines (mixed is fine).
/// Audios keep their order of first appearance; segments are sorted per audio.
pub fn read_segments<R: BufRead>(reader: R) -> Result<Vec<SegmentSet>, FormatError> {
    let mut order: Vec<String> = Vec::new();
    let mut by_audio: HashMap<String, Vec<(usize, Segment)>> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let rec = if trimmed.starts_with('{') {
            serde_json::from_str::<SegmentRecord>(trimmed).map_err(|e| FormatError::Parse {
                line: line_no,
                msg: e.to_string(),
            })?
        } else {
            parse_tsv_segment(trimmed).ok_or_else(|| FormatError::Parse {
                line: line_no,
                msg: "expected audio_id<TAB>start<TAB>end".into(),
            })?
        };
        let seg = Segment::new(rec.start, rec.end).map_err(|source| FormatError::Invalid {
            line: line_no,
            source,
        })?;
        if !by_audio.contains_key(&rec.audio_id) {
            order.push(rec.audio_id.clone());
        }
        by_audio
            .entry(rec.audio_id)
            .or_default()
            .push((line_no, seg));
    }
    order
        .into_iter()
        .map(|id| {
            let mut segs = by_audio.remove(&id).unwrap_or_default();
            segs.sort_by(|a, b| a.1.start_s.total_cmp(&b.1.start_s));
            let first_line = segs.first().map(|s| s.0).unwrap_or(0);
            SegmentSet::new(id, segs.into_iter().map(|(_, s)| s).collect(), None).map_err(
                |source| FormatError::Invalid {
                    line: first_line,
                    source,
                },
            )
        })
        .collect()
}

fn parse_tsv_segment(line: &str) -> Option<SegmentRecord> {
    let mut parts = line.split('\t');
    let audio_id = parts.next()?.to_string();
    let start = parts.next()?.trim().parse().ok()?;
    let end = parts.next()?.trim().parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some(SegmentRecord {
        audio_id,
        start,
        end,
    })
}

pub fn read_segments_file(path: &Path) -> Result<Vec<SegmentSet>, FormatError> {
    let f = std::fs::File::open(path)?;
    read_segments(std::io::BufReader::new(f))
}

pub fn format_segments(sets: &[SegmentSet], format: SegmentFormat) -> String {
    let mut out = String::new();
    for set in sets {
        let id_json = serde_json::to_string(set.audio_id()).expect("string serializes");
        for seg in set.segments() {
            match format {
                SegmentFormat::Jsonl => writeln!(
                    out,
                    "{{\"audio_id\":{id_json},\"start\":{:.3},\"end\":{:.3}}}",
                    seg.start_s, seg.end_s
                ),
                SegmentFormat::Tsv => writeln!(
                    out,
                    "{}\t{:.3}\t{:.3}",
                    set.audio_id(),
                    seg.start_s,
                    seg.end_s
                ),
            }
            .expect("writing to a String cannot fail");
        }
    }
    out
}

pub fn write_segments<W: Write>(
    mut w: W,
    sets: &[SegmentSet],
    format: SegmentFormat,
) -> Result<(), FormatError> {
    w.write_all(format_segments(sets, format).as_bytes())?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct LabelWindowRecord {
    pub audio_id: String,
    pub window_start: f64,
    pub stride_ms: u64,
    pub labels: Vec<u8>,
    pub valid: usize,
}

pub fn write_label_windows<W: Write>(
    mut w: W,
    audio_id: &str,
    stride_s: f64,
    windows: &[TrainingWindow],
) -> Result<(), FormatError> {
    let stride_ms = stride_ms_of(stride_s)?;
    for tw in windows {
        let rec = LabelWindowRecord {
            audio_id: audio_id.to_string(),
            window_start: tw.window.start_s,
            stride_ms,
            labels: tw.labels.clone(),
            valid: tw.valid,
        };
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TraceRecord {
    pub audio_id: String,
    pub seg_start: f64,
    pub seg_end: f64,
    pub t_hat_s: f64,
    pub p_min: f64,
}

pub fn write_trace<W: Write>(
    mut w: W,
    audio_id: &str,
    records: &[SplitRecord],
) -> Result<(), FormatError> {
    for r in records {
        let rec = TraceRecord {
            audio_id: audio_id.to_string(),
            seg_start: r.segment.start_s,
            seg_end: r.segment.end_s,
            t_hat_s: r.t_hat_s,
            p_min: r.p_min,
        };
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn segment_jsonl_uses_three_decimals() {
        let set = SegmentSet::from_pairs("talk \"1\"", &[(0.94, 2.06)], None).unwrap();
        let text = format_segments(&[set], SegmentFormat::Jsonl);
        assert_eq!(
            text,
            "{\"audio_id\":\"talk \\\"1\\\"\",\"start\":0.940,\"end\":2.060}\n"
        );
    }

    #[test]
    fn segments_read_jsonl_and_tsv() {
        let input =
            "{\"audio_id\":\"a\",\"start\":3.0,\"end\":4.5}\nb\t0.000\t1.000\na\t0.5\t1.0\n\n";
        let sets = read_segments(input.as_bytes()).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].audio_id(), "a");
        assert_eq!(sets[0].pairs(), vec![(0.5, 1.0), (3.0, 4.5)]);
        assert_eq!(sets[1].pairs(), vec![(0.0, 1.0)]);
    }

    #[test]
    fn segment_tsv_round_trip() {
        let set = SegmentSet::from_pairs("x", &[(0.0, 1.25), (2.5, 3.0)], None).unwrap();
        let text = format_segments(std::slice::from_ref(&set), SegmentFormat::Tsv);
        assert_eq!(text, "x\t0.000\t1.250\nx\t2.500\t3.000\n");
        assert_eq!(read_segments(text.as_bytes()).unwrap(), vec![set]);
    }

    #[test]
    fn bad_segment_lines_report_line_numbers() {
        let err = read_segments("a\t1.0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }));
        let err = read_segments("a\t0\t1\na\t2.0\t1.0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Invalid { line: 2, .. }));
        let err = read_segments("a\t0\t2\na\t1.0\t3.0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Invalid { .. }));
    }

    #[test]
    fn prob_record_rejects_out_of_range() {
        let err = read_prob_records(
            "{\"audio_id\":\"a\",\"stride_ms\":40,\"probs\":[0.1,1.5]}\n".as_bytes(),
        )
        .unwrap_err();
        match err {
            FormatError::Invalid { line: 1, source } => assert_eq!(
                source,
                ValidationError::ProbabilityOutOfRange {
                    index: 1,
                    value: 1.5
                }
            ),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fractional_stride_cannot_be_written() {
        let p = FrameProbabilities::new("a", 0.0125, vec![0.5]).unwrap();
        assert!(matches!(
            write_prob_records(Vec::new(), &[p]),
            Err(FormatError::FractionalStride(_))
        ));
    }

    #[test]
    fn raw_round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.f32");
        let p = FrameProbabilities::new("a", 0.04, vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        write_raw_probs(&path, &p).unwrap();
        assert!(sidecar_path(&path).exists());
        assert_eq!(read_probs_file(&path).unwrap(), vec![p]);
        std::fs::write(&path, [0u8; 6]).unwrap();
        assert!(matches!(
            read_raw_probs(&path),
            Err(FormatError::Raw { .. })
        ));
    }

    proptest! {
        #[test]
        fn prob_records_round_trip_bit_exact(
            probs in proptest::collection::vec(0.0f64..=1.0, 0..200),
            stride_ms in 1u64..100,
        ) {
            let p = FrameProbabilities::new("id", stride_s_of(stride_ms), probs).unwrap();
            let mut buf = Vec::new();
            write_prob_records(&mut buf, std::slice::from_ref(&p)).unwrap();
            let back = read_prob_records(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(back[0].stride_s().to_bits(), p.stride_s().to_bits());
            for (a, b) in back[0].probs().iter().zip(p.probs()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
