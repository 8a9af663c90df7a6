//! Corpus BLEU with sacreBLEU's default scoring rules (exponential smoothing
//! of zero n-gram matches, brevity penalty, order 4) on whitespace tokens.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuOptions {
    /// Average only over the n-gram orders the hypothesis actually has.
    /// sacreBLEU enables this for sentence-level scores; corpus scores leave it off.
    pub effective_order: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    pub score: f64,
    /// Per-order precisions in percent, after smoothing.
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub sys_len: usize,
    pub ref_len: usize,
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
}

/// Sufficient statistics; summing these over lines (in any order) and then
/// scoring gives the corpus score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub sys_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn from_pair(reference: &str, hypothesis: &str) -> Self {
        let r: Vec<&str> = reference.split_whitespace().collect();
        let h: Vec<&str> = hypothesis.split_whitespace().collect();
        let mut stats = BleuStats {
            sys_len: h.len(),
            ref_len: r.len(),
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let ref_counts = ngram_counts(&r, n);
            let hyp_counts = ngram_counts(&h, n);
            stats.totals[n - 1] = h.len().saturating_sub(n - 1) as u64;
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn merge(&mut self, other: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.sys_len += other.sys_len;
        self.ref_len += other.ref_len;
    }

    pub fn score(&self, options: BleuOptions) -> BleuReport {
        let mut precisions = [0.0f64; MAX_ORDER];
        let mut smooth = 1.0f64;
        let mut eff_order = MAX_ORDER;
        for n in 0..MAX_ORDER {
            if self.totals[n] == 0 {
                break;
            }
            if options.effective_order {
                eff_order = n + 1;
            }
            precisions[n] = if self.matches[n] == 0 {
                smooth *= 2.0;
                100.0 / (smooth * self.totals[n] as f64)
            } else {
                100.0 * self.matches[n] as f64 / self.totals[n] as f64
            };
        }

        let brevity_penalty = if self.sys_len >= self.ref_len {
            1.0
        } else if self.sys_len > 0 {
            (1.0 - self.ref_len as f64 / self.sys_len as f64).exp()
        } else {
            0.0
        };
        let score = if self.sys_len == 0 || precisions[..eff_order].contains(&0.0) {
            0.0
        } else {
            let log_sum: f64 = precisions[..eff_order].iter().map(|p| p.ln()).sum();
            brevity_penalty * (log_sum / eff_order as f64).exp()
        };
        BleuReport {
            score,
            precisions,
            brevity_penalty,
            sys_len: self.sys_len,
            ref_len: self.ref_len,
            matches: self.matches,
            totals: self.totals,
        }
    }
}

fn ngram_counts<'t, 'a>(tokens: &'t [&'a str], n: usize) -> HashMap<&'t [&'a str], u64> {
    let mut out = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *out.entry(gram).or_insert(0) += 1;
        }
    }
    out
}

pub fn bleu<R: AsRef<str>, H: AsRef<str>>(
    reference: &[R],
    hypothesis: &[H],
) -> Result<BleuReport, EvalError> {
    bleu_with(reference, hypothesis, BleuOptions::default())
}

pub fn bleu_with<R: AsRef<str>, H: AsRef<str>>(
    reference: &[R],
    hypothesis: &[H],
    options: BleuOptions,
) -> Result<BleuReport, EvalError> {
    if reference.len() != hypothesis.len() {
        return Err(EvalError::LineCountMismatch {
            reference: reference.len(),
            hypothesis: hypothesis.len(),
        });
    }
    let mut stats = BleuStats::default();
    for (r, h) in reference.iter().zip(hypothesis) {
        stats.merge(&BleuStats::from_pair(r.as_ref(), h.as_ref()));
    }
    Ok(stats.score(options))
}
