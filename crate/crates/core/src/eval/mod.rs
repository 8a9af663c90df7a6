//! Long-form evaluation: token alignment, WER, resegmentation of hypothesis
//! text onto reference segments, punctuation F1 and corpus BLEU.

mod align;
mod bleu;
mod punct;
mod reseg;
mod wer;

use thiserror::Error;

pub use align::{edit_cost, edit_distance, AlignOp, Alignment, EditCounts};
pub use bleu::{bleu, bleu_with, BleuOptions, BleuReport, BleuStats, MAX_ORDER};
pub use punct::{
    punct_f1, punct_f1_corpus, tokenize_marks, MarkCounts, MarkScore, Prf, PunctCounter,
    PunctReport, PunctToken, DEFAULT_MARKS,
};
pub use reseg::{resegment, Resegmentation};
pub use wer::{wer, wer_corpus, WerReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("reference has no words")]
    EmptyReference,
    #[error("reference has {reference} lines but hypothesis has {hypothesis}")]
    LineCountMismatch { reference: usize, hypothesis: usize },
    #[error("resegmentation needs at least one reference segment")]
    NoReferenceSegments,
}

/// Splits text into whitespace tokens, one list per line.
pub fn tokenize_lines<S: AsRef<str>>(lines: &[S]) -> Vec<Vec<&str>> {
    lines
        .iter()
        .map(|l| l.as_ref().split_whitespace().collect())
        .collect()
}
