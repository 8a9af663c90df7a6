//! Punctuation F1 of a hypothesis against a reference transcript.
//!
//! Each whitespace token is split into a lowercased core and the set of
//! configured marks trailing it. A token made only of marks (as in
//! `"hello , world ."`) hands its marks to the previous token. Cores are
//! aligned with [`edit_distance`], then per mark: aligned tokens that both
//! carry it are true positives, a mark on an unmatched or inserted
//! hypothesis token is a false positive, a mark on an unmatched or deleted
//! reference token is a false negative.

use serde::{Deserialize, Serialize};

use super::align::{edit_distance, AlignOp};
use super::EvalError;

pub const DEFAULT_MARKS: [char; 3] = ['.', '?', ','];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PunctToken {
    pub core: String,
    pub marks: Vec<char>,
}

pub fn tokenize_marks(text: &str, marks: &[char]) -> Vec<PunctToken> {
    let mut out: Vec<PunctToken> = Vec::new();
    for raw in text.split_whitespace() {
        let core = raw.trim_end_matches(|c| marks.contains(&c));
        let mut found: Vec<char> = raw[core.len()..].chars().collect();
        found.sort_unstable();
        found.dedup();
        if core.is_empty() {
            if let Some(prev) = out.last_mut() {
                prev.marks.extend(found);
                prev.marks.sort_unstable();
                prev.marks.dedup();
            }
            continue;
        }
        out.push(PunctToken {
            core: core.to_lowercase(),
            marks: found,
        });
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl MarkCounts {
    fn add(&mut self, other: MarkCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    fn is_empty(&self) -> bool {
        self.tp + self.fp + self.fn_ == 0
    }

    pub fn scores(&self) -> Prf {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        Prf::new(precision, recall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// `f1 = 2PR / (P + R)`, 0 when `P + R = 0`.
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f1,
        }
    }
}

/// Per-mark counts accumulated over any number of aligned text pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PunctCounter {
    marks: Vec<char>,
    counts: Vec<MarkCounts>,
}

impl PunctCounter {
    pub fn new(marks: &[char]) -> Self {
        Self {
            marks: marks.to_vec(),
            counts: vec![MarkCounts::default(); marks.len()],
        }
    }

    pub fn add_pair(&mut self, reference: &str, hypothesis: &str) {
        let r = tokenize_marks(reference, &self.marks);
        let h = tokenize_marks(hypothesis, &self.marks);
        let rc: Vec<&str> = r.iter().map(|t| t.core.as_str()).collect();
        let hc: Vec<&str> = h.iter().map(|t| t.core.as_str()).collect();
        let (_, alignment) = edit_distance(&rc, &hc);
        for (m_idx, &mark) in self.marks.iter().enumerate() {
            let c = &mut self.counts[m_idx];
            for op in &alignment.ops {
                let (in_ref, in_hyp) = match *op {
                    AlignOp::Match { r: ri, h: hi } | AlignOp::Substitute { r: ri, h: hi } => {
                        (r[ri].marks.contains(&mark), h[hi].marks.contains(&mark))
                    }
                    AlignOp::Delete { r: ri } => (r[ri].marks.contains(&mark), false),
                    AlignOp::Insert { h: hi } => (false, h[hi].marks.contains(&mark)),
                };
                match (in_ref, in_hyp) {
                    (true, true) => c.tp += 1,
                    (true, false) => c.fn_ += 1,
                    (false, true) => c.fp += 1,
                    (false, false) => {}
                }
            }
        }
    }

    pub fn counts(&self) -> impl Iterator<Item = (char, MarkCounts)> + '_ {
        self.marks.iter().copied().zip(self.counts.iter().copied())
    }

    /// Macro average runs over marks seen in either text unless
    /// `include_absent` is set, in which case every configured mark counts.
    pub fn report(&self, include_absent: bool) -> PunctReport {
        let mut per_mark = Vec::with_capacity(self.marks.len());
        let mut pooled = MarkCounts::default();
        let (mut p_sum, mut r_sum, mut f_sum, mut considered) = (0.0, 0.0, 0.0, 0usize);
        for (mark, counts) in self.counts() {
            let present = !counts.is_empty();
            let scores = counts.scores();
            if present || include_absent {
                p_sum += scores.precision;
                r_sum += scores.recall;
                f_sum += scores.f1;
                considered += 1;
            }
            pooled.add(counts);
            per_mark.push(MarkScore {
                mark: mark.to_string(),
                present,
                counts,
                scores,
            });
        }
        let mean = |x: f64| {
            if considered == 0 {
                0.0
            } else {
                x / considered as f64
            }
        };
        PunctReport {
            per_mark,
            macro_avg: Prf {
                precision: mean(p_sum),
                recall: mean(r_sum),
                f1: mean(f_sum),
            },
            micro_avg: pooled.scores(),
            marks_averaged: considered,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkScore {
    pub mark: String,
    pub present: bool,
    pub counts: MarkCounts,
    #[serde(flatten)]
    pub scores: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PunctReport {
    pub per_mark: Vec<MarkScore>,
    /// Mean of the per-mark precision, recall and F1.
    pub macro_avg: Prf,
    /// Scores from counts pooled over all marks.
    pub micro_avg: Prf,
    pub marks_averaged: usize,
}

impl PunctReport {
    pub fn mark(&self, mark: char) -> Option<&MarkScore> {
        let key = mark.to_string();
        self.per_mark.iter().find(|m| m.mark == key)
    }
}

pub fn punct_f1(reference: &str, hypothesis: &str, marks: &[char]) -> PunctReport {
    let mut counter = PunctCounter::new(marks);
    counter.add_pair(reference, hypothesis);
    counter.report(false)
}

pub fn punct_f1_corpus<R: AsRef<str>, H: AsRef<str>>(
    reference: &[R],
    hypothesis: &[H],
    marks: &[char],
    include_absent: bool,
) -> Result<PunctReport, EvalError> {
    if reference.len() != hypothesis.len() {
        return Err(EvalError::LineCountMismatch {
            reference: reference.len(),
            hypothesis: hypothesis.len(),
        });
    }
    let mut counter = PunctCounter::new(marks);
    for (r, h) in reference.iter().zip(hypothesis) {
        counter.add_pair(r.as_ref(), h.as_ref());
    }
    Ok(counter.report(include_absent))
}
