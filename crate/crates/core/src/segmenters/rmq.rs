/// Sparse table answering "earliest index of the minimum value in `[lo, hi)`"
/// in O(1) after O(n log n) preprocessing.
pub(crate) struct RangeArgMin<'a> {
    values: &'a [f64],
    levels: Vec<Vec<u32>>,
}

impl<'a> RangeArgMin<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        let n = values.len();
        let mut levels: Vec<Vec<u32>> = vec![(0..n as u32).collect()];
        let mut width = 1;
        while width * 2 <= n {
            let prev = levels.last().expect("level 0 exists");
            let next: Vec<u32> = (0..=n - width * 2)
                .map(|i| pick(values, prev[i], prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        Self { values, levels }
    }

    /// Earliest argmin over `lo..hi`. Panics on an empty range.
    pub fn argmin(&self, lo: usize, hi: usize) -> usize {
        assert!(
            lo < hi && hi <= self.values.len(),
            "empty or out-of-range query"
        );
        let k = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let level = &self.levels[k];
        pick(self.values, level[lo], level[hi - (1 << k)]) as usize
    }
}

fn pick(values: &[f64], a: u32, b: u32) -> u32 {
    // a < b always, so `<=` keeps the earlier index on ties
    if values[a as usize] <= values[b as usize] {
        a
    } else {
        b
    }
}
