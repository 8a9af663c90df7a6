use serde::{Deserialize, Serialize};

/// One step of a reference-to-hypothesis alignment. Indices point into the
/// reference and hypothesis token lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum AlignOp {
    Match { r: usize, h: usize },
    Substitute { r: usize, h: usize },
    Delete { r: usize },
    Insert { h: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub ops: Vec<AlignOp>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub matches: usize,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
}

impl EditCounts {
    pub fn cost(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

impl Alignment {
    pub fn counts(&self) -> EditCounts {
        let mut c = EditCounts::default();
        for op in &self.ops {
            match op {
                AlignOp::Match { .. } => c.matches += 1,
                AlignOp::Substitute { .. } => c.substitutions += 1,
                AlignOp::Delete { .. } => c.deletions += 1,
                AlignOp::Insert { .. } => c.insertions += 1,
            }
        }
        c
    }

    pub fn cost(&self) -> usize {
        self.counts().cost()
    }

    /// Applies the alignment to `reference`, producing the hypothesis it encodes.
    pub fn replay<T: Clone>(&self, reference: &[T], hypothesis: &[T]) -> Vec<T> {
        self.ops
            .iter()
            .filter_map(|op| match *op {
                AlignOp::Match { r, .. } => Some(reference[r].clone()),
                AlignOp::Substitute { h, .. } | AlignOp::Insert { h } => {
                    Some(hypothesis[h].clone())
                }
                AlignOp::Delete { .. } => None,
            })
            .collect()
    }
}

/// Unit-cost Levenshtein distance with a backtrace. When several alignments
/// are optimal the backtrace (from the end) prefers match, then
/// substitution, then deletion, then insertion.
pub fn edit_distance<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> (usize, Alignment) {
    let n = reference.len();
    let m = hypothesis.len();
    let w = m + 1;
    let mut d = vec![0u32; (n + 1) * w];
    for (j, cell) in d.iter_mut().enumerate().take(w) {
        *cell = j as u32;
    }
    for i in 1..=n {
        d[i * w] = i as u32;
        for j in 1..=m {
            let diag = d[(i - 1) * w + j - 1] + u32::from(reference[i - 1] != hypothesis[j - 1]);
            let del = d[(i - 1) * w + j] + 1;
            let ins = d[i * w + j - 1] + 1;
            d[i * w + j] = diag.min(del).min(ins);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 {
            let diag = d[(i - 1) * w + j - 1];
            let same = reference[i - 1] == hypothesis[j - 1];
            if same && diag == here {
                ops.push(AlignOp::Match { r: i - 1, h: j - 1 });
                i -= 1;
                j -= 1;
                continue;
            }
            if !same && diag + 1 == here {
                ops.push(AlignOp::Substitute { r: i - 1, h: j - 1 });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[(i - 1) * w + j] + 1 == here {
            ops.push(AlignOp::Delete { r: i - 1 });
            i -= 1;
        } else {
            ops.push(AlignOp::Insert { h: j - 1 });
            j -= 1;
        }
    }
    ops.reverse();
    (d[n * w + m] as usize, Alignment { ops })
}

/// Distance only, in O(min) memory.
pub fn edit_cost<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=hypothesis.len()).collect();
    let mut cur = vec![0usize; hypothesis.len() + 1];
    for (i, r) in reference.iter().enumerate() {
        cur[0] = i + 1;
        for (j, h) in hypothesis.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(r != h))
                .min(prev[j + 1] + 1)
                .min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[hypothesis.len()]
}
