//! Seeded train/validation splits. Both parts keep the original record order.

use anyhow::{bail, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Returns `(train, validation)` indices with `round(n * fraction)` records
/// (at least one, at most n - 1) held out.
pub fn holdout(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        bail!("need at least 2 records to hold some out, have {n}");
    }
    let n_val = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
    let order = shuffled(n, seed);
    let mut val = order[..n_val].to_vec();
    let mut train = order[n_val..].to_vec();
    val.sort_unstable();
    train.sort_unstable();
    Ok((train, val))
}

/// `k` disjoint validation folds covering every record once, each paired
/// with the remaining records for training.
pub fn k_fold(n: usize, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 || k > n {
        bail!("cannot split {n} records into {k} folds");
    }
    let order = shuffled(n, seed);
    let folds = (0..k)
        .map(|f| {
            let mut val: Vec<usize> = order.iter().copied().skip(f).step_by(k).collect();
            val.sort_unstable();
            let mut in_val = vec![false; n];
            val.iter().for_each(|&i| in_val[i] = true);
            let train = (0..n).filter(|&i| !in_val[i]).collect();
            (train, val)
        })
        .collect();
    Ok(folds)
}
