use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fold index per sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    /// Sample indices held out in `fold`.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] != fold).collect()
    }
}

/// Stratified k-fold split.
///
/// Classes are visited in ascending id order; each class's members are
/// shuffled with a ChaCha8 generator seeded by `seed` and dealt round-robin,
/// continuing from the fold where the previous class stopped. Per-class fold
/// counts therefore differ by at most one, and so do total fold sizes.
///
/// A class with fewer than `k` members is an error unless
/// `allow_small_classes` is set, in which case it is dealt the same way and
/// some folds simply miss it.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64, allow_small_classes: bool) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Folds(format!("need at least 2 folds, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::Folds(format!("{} samples cannot fill {k} folds", labels.len())));
    }
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &y) in labels.iter().enumerate() {
        members[y].push(i);
    }
    for (c, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < k {
            if allow_small_classes {
                log::warn!("class {c} has {} samples, fewer than {k} folds", m.len());
            } else {
                return Err(Error::Folds(format!("class {c} has {} samples, fewer than {k} folds", m.len())));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for m in &mut members {
        m.shuffle(&mut rng);
        for &i in m.iter() {
            assignment[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldPlan { k, seed, assignment })
}
