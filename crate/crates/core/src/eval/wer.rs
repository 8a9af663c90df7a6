use serde::{Deserialize, Serialize};

use super::align::edit_distance;
use super::EvalError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WerReport {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub reference_words: usize,
    pub wer: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    s: usize,
    d: usize,
    i: usize,
    n: usize,
}

impl Counts {
    fn add_pair(&mut self, reference: &str, hypothesis: &str) {
        let r: Vec<&str> = reference.split_whitespace().collect();
        let h: Vec<&str> = hypothesis.split_whitespace().collect();
        let c = edit_distance(&r, &h).1.counts();
        self.s += c.substitutions;
        self.d += c.deletions;
        self.i += c.insertions;
        self.n += r.len();
    }

    fn report(self) -> Result<WerReport, EvalError> {
        if self.n == 0 {
            return Err(EvalError::EmptyReference);
        }
        Ok(WerReport {
            substitutions: self.s,
            deletions: self.d,
            insertions: self.i,
            reference_words: self.n,
            wer: (self.s + self.d + self.i) as f64 / self.n as f64,
        })
    }
}

/// Word error rate on whitespace tokens: `(S + D + I) / N_ref`.
pub fn wer(reference: &str, hypothesis: &str) -> Result<WerReport, EvalError> {
    let mut c = Counts::default();
    c.add_pair(reference, hypothesis);
    c.report()
}

/// Corpus WER over aligned line pairs; counts are summed before dividing.
pub fn wer_corpus<R: AsRef<str>, H: AsRef<str>>(
    reference: &[R],
    hypothesis: &[H],
) -> Result<WerReport, EvalError> {
    if reference.len() != hypothesis.len() {
        return Err(EvalError::LineCountMismatch {
            reference: reference.len(),
            hypothesis: hypothesis.len(),
        });
    }
    let mut c = Counts::default();
    for (r, h) in reference.iter().zip(hypothesis) {
        c.add_pair(r.as_ref(), h.as_ref());
    }
    c.report()
}
