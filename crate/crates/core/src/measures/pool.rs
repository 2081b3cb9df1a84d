use crate::error::{Error, Result};

/// Every edge weight of a graph, sorted and grouped into distinct values.
///
/// Cell histograms refer to weights by their rank among the distinct values,
/// so ties are resolved once here rather than per statistic evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPool {
    values: Vec<f64>,
    counts: Vec<u64>,
    below: Vec<u64>,
    total: u64,
    /// Prefix sums of `(c³ - c) / 3` over distinct values, `c` the tie count.
    tie_prefix: Vec<i128>,
    edge_ranks: Vec<u32>,
}

impl WeightPool {
    /// Builds the pool from per-edge weights (all finite).
    pub fn new(weights: &[f64]) -> Self {
        let mut sorted: Vec<f64> = weights.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for w in sorted {
            match values.last() {
                Some(&last) if last == w => *counts.last_mut().unwrap() += 1,
                _ => {
                    values.push(w);
                    counts.push(1);
                }
            }
        }
        let mut below = Vec::with_capacity(counts.len());
        let mut acc = 0;
        for &c in &counts {
            below.push(acc);
            acc += c;
        }
        let mut tie_prefix = Vec::with_capacity(counts.len() + 1);
        tie_prefix.push(0i128);
        for &c in &counts {
            let c = c as i128;
            tie_prefix.push(tie_prefix.last().unwrap() + (c * c * c - c) / 3);
        }
        let edge_ranks = weights.iter().map(|w| values.partition_point(|v| v < w) as u32).collect();
        Self { values, counts, below, total: acc, tie_prefix, edge_ranks }
    }

    /// Pool size `M`.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Distinct weights, ascending.
    pub fn distinct_values(&self) -> &[f64] {
        &self.values
    }

    /// How many pool members share the distinct value at `rank`.
    pub fn count(&self, rank: u32) -> u64 {
        self.counts[rank as usize]
    }

    /// Pool members strictly smaller than the distinct value at `rank`.
    pub fn below(&self, rank: u32) -> u64 {
        self.below[rank as usize]
    }

    /// Like [`below`](Self::below), but `rank` may equal the number of
    /// distinct values, giving the pool size.
    pub fn below_or_total(&self, rank: u32) -> u64 {
        self.below.get(rank as usize).copied().unwrap_or(self.total)
    }

    /// Extra squared doubled-rank deviation from ties among pool values with
    /// ranks `lo..hi`: `(c³ - c) / 3` per value shared by `c` members.
    pub(crate) fn tie_excess(&self, lo: u32, hi: u32) -> i128 {
        self.tie_prefix[hi as usize] - self.tie_prefix[lo as usize]
    }

    /// Midrank of the value at `rank` within the pool alone.
    pub fn midrank(&self, rank: u32) -> f64 {
        self.below(rank) as f64 + (self.count(rank) as f64 + 1.0) / 2.0
    }

    pub fn value(&self, rank: u32) -> f64 {
        self.values[rank as usize]
    }

    /// Distinct-value rank of each edge's weight, indexed by edge.
    pub fn edge_ranks(&self) -> &[u32] {
        &self.edge_ranks
    }

    /// The full sorted weight array.
    pub fn sorted(&self) -> Vec<f64> {
        self.values.iter().zip(&self.counts).flat_map(|(&v, &c)| std::iter::repeat_n(v, c as usize)).collect()
    }

    pub(crate) fn check_rank(&self, rank: u32) -> Result<()> {
        if (rank as usize) < self.values.len() {
            Ok(())
        } else {
            Err(Error::Contract(format!("weight rank {rank} outside pool of {} distinct values", self.values.len())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_ties() {
        let p = WeightPool::new(&[3.0, 1.0, 3.0, 2.0, 3.0]);
        assert_eq!(p.len(), 5);
        assert_eq!(p.distinct_values(), &[1.0, 2.0, 3.0]);
        assert_eq!(p.edge_ranks(), &[2, 0, 2, 1, 2]);
        assert_eq!(p.below(2), 2);
        assert_eq!(p.count(2), 3);
        assert_eq!(p.midrank(2), 4.0);
        assert_eq!(p.sorted(), vec![1.0, 2.0, 3.0, 3.0, 3.0]);
    }
}
