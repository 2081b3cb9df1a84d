//! Two-sample Cramér–von Mises statistic with midranks.
//!
//! For a sample of size `m` and a reference set of size `n` pooled together,
//! with `r_p` the pooled ranks of the ordered sample and `s_q` those of the
//! ordered reference set,
//!
//! ```text
//! U = m Σ (r_p - p)² + n Σ (s_q - q)²
//! t = U / (m n (m + n)) - (4 m n - 1) / (6 (m + n))
//! ```
//!
//! Tied observations share their midrank. A reference value that no sample
//! value ties with has `s_q - q` equal to the number of sample values below
//! it plus a tie offset that depends only on the reference set, so the sums
//! reduce to one closed form per sample group plus precomputed prefix sums.
//! All rank arithmetic is done on doubled ranks in `i128`, which keeps it
//! exact.

use super::WeightPool;
use crate::error::{Error, Result};

/// One group of tied sample values, positioned against the reference pool.
struct Group {
    /// Sample members at this value.
    sample: u64,
    /// Rank of the first distinct pool value not below the group's value.
    rank: u32,
    /// Whether the pool value at `rank` equals the group's value.
    tied: bool,
}

/// `Σ_{k=1..count} (x - 2k)²`.
fn sq_run(x: i128, count: u64) -> i128 {
    let a = count as i128;
    a * x * x - 2 * x * a * (a + 1) + 2 * a * (a + 1) * (2 * a + 1) / 3
}

/// Groups must arrive in increasing value order.
fn statistic(groups: impl Iterator<Item = Group>, pool: &WeightPool) -> Result<f64> {
    let distinct = pool.distinct_values().len() as u32;
    let mut sample_below: u64 = 0;
    // distinct pool ranks already accounted for
    let mut rank_done: u32 = 0;
    let mut sum_sample: i128 = 0;
    let mut sum_pool: i128 = 0;

    // pool-only tie groups in ranks lo..hi, each shifted by the sample count below them
    let gap = |lo: u32, hi: u32, shift: i128| -> i128 {
        if lo >= hi {
            return 0;
        }
        let members = (pool.below_or_total(hi) - pool.below(lo)) as i128;
        members * shift * shift + pool.tie_excess(lo, hi)
    };

    for g in groups {
        let shift = 2 * sample_below as i128;
        sum_pool += gap(rank_done, g.rank, shift);

        let (pool_here, pool_below) =
            if g.tied { (pool.count(g.rank), pool.below(g.rank)) } else { (0, pool.below_or_total(g.rank)) };
        let pooled_below = (sample_below + pool_below) as i128;
        let twice_midrank = 2 * pooled_below + (g.sample + pool_here) as i128 + 1;
        sum_sample += sq_run(twice_midrank - 2 * sample_below as i128, g.sample);
        sum_pool += sq_run(twice_midrank - 2 * pool_below as i128, pool_here);

        sample_below += g.sample;
        rank_done = if g.tied { g.rank + 1 } else { g.rank };
    }
    if sample_below == 0 {
        return Err(Error::Contract("Cramér–von Mises statistic of an empty sample".into()));
    }
    if pool.is_empty() {
        return Err(Error::Contract("Cramér–von Mises statistic against an empty pool".into()));
    }
    sum_pool += gap(rank_done, distinct, 2 * sample_below as i128);

    let m = sample_below as i128;
    let n = pool.len() as i128;
    let four_u = m * sum_sample + n * sum_pool;
    let u = four_u as f64 / 4.0;
    let (mf, nf) = (m as f64, n as f64);
    Ok(u / (mf * nf * (mf + nf)) - (4.0 * mf * nf - 1.0) / (6.0 * (mf + nf)))
}

/// Statistic of a sample given as a histogram over pool ranks: sorted,
/// distinct `(rank, count)` pairs.
pub fn cramer_von_mises(sample: &[(u32, u32)], pool: &WeightPool) -> Result<f64> {
    for w in sample.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::Contract("histogram ranks must be strictly increasing".into()));
        }
    }
    for &(r, _) in sample {
        pool.check_rank(r)?;
    }
    let groups = sample.iter().filter(|&&(_, c)| c > 0).map(|&(rank, c)| Group { sample: c as u64, rank, tied: true });
    statistic(groups, pool)
}

/// Statistic of arbitrary finite sample values against an arbitrary finite
/// reference set.
pub fn cramer_von_mises_values(sample: &[f64], reference: &[f64]) -> Result<f64> {
    if sample.iter().chain(reference).any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite value in Cramér–von Mises input".into()));
    }
    let pool = WeightPool::new(reference);
    let values = pool.distinct_values();
    let mut sample = sample.to_vec();
    sample.sort_by(f64::total_cmp);

    let mut groups = Vec::new();
    let mut i = 0;
    while i < sample.len() {
        let v = sample[i];
        let j = i + sample[i..].iter().take_while(|&&x| x == v).count();
        let rank = values.partition_point(|&x| x < v);
        let tied = values.get(rank) == Some(&v);
        groups.push(Group { sample: (j - i) as u64, rank: rank as u32, tied });
        i = j;
    }
    statistic(groups.into_iter(), &pool)
}
