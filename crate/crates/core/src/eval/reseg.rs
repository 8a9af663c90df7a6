//! Resegmentation of a hypothesis word stream onto reference segments.
//!
//! Choosing span boundaries that minimise the summed per-segment edit
//! distance is the same as aligning the hypothesis against the concatenated
//! reference and cutting at the reference segment boundaries. The solver
//! keeps suffix-cost rows at every segment boundary, then walks forward and
//! takes the earliest boundary that still reaches the optimum, so ties
//! resolve to the lexicographically earliest boundary vector.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resegmentation {
    /// One hypothesis word range per reference segment, contiguous and in order.
    pub spans: Vec<Range<usize>>,
    pub cost: usize,
}

impl Resegmentation {
    /// Hypothesis words of each span joined by single spaces.
    pub fn lines<S: AsRef<str>>(&self, hyp_words: &[S]) -> Vec<String> {
        self.spans
            .iter()
            .map(|r| {
                hyp_words[r.clone()]
                    .iter()
                    .map(AsRef::as_ref)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }
}

pub fn resegment<T: PartialEq>(
    hyp_words: &[T],
    ref_segments: &[Vec<T>],
) -> Result<Resegmentation, EvalError> {
    let k = ref_segments.len();
    if k == 0 {
        return Err(EvalError::NoReferenceSegments);
    }
    let n = hyp_words.len();
    let concat: Vec<&T> = ref_segments.iter().flatten().collect();
    let mut offsets = Vec::with_capacity(k + 1);
    let mut acc = 0;
    for seg in ref_segments {
        offsets.push(acc);
        acc += seg.len();
    }
    offsets.push(acc);

    // suffix[b][j] = edit distance of concat[offsets[b]..] against hyp[j..]
    // for the inner boundaries b = 1..k-1
    let mut suffix: Vec<Vec<u32>> = vec![Vec::new(); k];
    let mut row: Vec<u32> = (0..=n).rev().map(|j| j as u32).collect();
    let mut next_row = vec![0u32; n + 1];
    let mut boundary = k - 1;
    for r in (0..concat.len()).rev() {
        while boundary > 0 && offsets[boundary] > r {
            if offsets[boundary] == r + 1 {
                suffix[boundary] = row.clone();
            }
            boundary -= 1;
        }
        next_row[n] = row[n] + 1;
        for j in (0..n).rev() {
            let diag = row[j + 1] + u32::from(*concat[r] != hyp_words[j]);
            next_row[j] = diag.min(row[j] + 1).min(next_row[j + 1] + 1);
        }
        std::mem::swap(&mut row, &mut next_row);
    }
    // boundaries at offset 0 (leading empty segments) see the full suffix
    while boundary > 0 {
        suffix[boundary] = row.clone();
        boundary -= 1;
    }
    let total = row[0];

    let mut spans = Vec::with_capacity(k);
    let mut start = 0usize;
    let mut spent = 0u32;
    let mut fwd = vec![0u32; n + 1];
    let mut fwd_next = vec![0u32; n + 1];
    for (seg_idx, seg) in ref_segments.iter().enumerate().take(k - 1) {
        // fwd[j] = edit distance of this segment against hyp[start..j]
        for j in start..=n {
            fwd[j] = (j - start) as u32;
        }
        for (i, tok) in seg.iter().enumerate() {
            fwd_next[start] = i as u32 + 1;
            for j in start + 1..=n {
                let diag = fwd[j - 1] + u32::from(*tok != hyp_words[j - 1]);
                fwd_next[j] = diag.min(fwd[j] + 1).min(fwd_next[j - 1] + 1);
            }
            std::mem::swap(&mut fwd, &mut fwd_next);
        }
        let tail = &suffix[seg_idx + 1];
        let end = (start..=n)
            .find(|&j| spent + fwd[j] + tail[j] == total)
            .expect("an optimal boundary always exists");
        spent += fwd[end];
        spans.push(start..end);
        start = end;
    }
    spans.push(start..n);
    Ok(Resegmentation {
        spans,
        cost: total as usize,
    })
}
