//! Labeled/unlabeled pool state and its update rules.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featureio::LabelVector;
use crate::rng::sample_positions;

/// Disjoint partition of the train indices into labeled and unlabeled sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolState {
    labeled: BTreeSet<usize>,
    unlabeled: BTreeSet<usize>,
    cycle: usize,
}

/// Train indices selected by a strategy in one cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryBatch {
    pub indices: Vec<usize>,
    pub cycle: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedBatch {
    pub indices: Vec<usize>,
    pub labels: Vec<u32>,
}

impl PoolState {
    pub fn labeled(&self) -> &BTreeSet<usize> {
        &self.labeled
    }

    pub fn unlabeled(&self) -> &BTreeSet<usize> {
        &self.unlabeled
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    pub fn labeled_indices(&self) -> Vec<usize> {
        self.labeled.iter().copied().collect()
    }

    pub fn unlabeled_indices(&self) -> Vec<usize> {
        self.unlabeled.iter().copied().collect()
    }

    pub fn n_train(&self) -> usize {
        self.labeled.len() + self.unlabeled.len()
    }
}

/// Draws `init_size` labeled indices uniformly from `[0, n_train)`.
pub fn init_pools<R: Rng + ?Sized>(n_train: usize, init_size: usize, rng: &mut R) -> Result<PoolState> {
    if init_size > n_train {
        return Err(Error::InvalidConfig(format!(
            "initial pool size {init_size} exceeds train size {n_train}"
        )));
    }
    let labeled: BTreeSet<usize> = sample_positions(rng, n_train, init_size).into_iter().collect();
    let unlabeled = (0..n_train).filter(|i| !labeled.contains(i)).collect();
    Ok(PoolState {
        labeled,
        unlabeled,
        cycle: 0,
    })
}

/// Uniform sample of at most `subset_size` unlabeled indices, ascending.
///
/// When the subset covers the pool, the whole pool is returned without
/// touching `rng`, so a covering subset and a full-pool query see the same
/// candidates in the same order.
pub fn draw_subset<R: Rng + ?Sized>(
    state: &PoolState,
    subset_size: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if subset_size == 0 {
        return Err(Error::InvalidConfig("subset size must be at least 1".into()));
    }
    if state.unlabeled.is_empty() {
        return Err(Error::EmptyPool);
    }
    let pool = state.unlabeled_indices();
    if subset_size >= pool.len() {
        return Ok(pool);
    }
    let mut picked: Vec<usize> = sample_positions(rng, pool.len(), subset_size)
        .into_iter()
        .map(|p| pool[p])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Simulated oracle: looks up ground-truth labels.
pub fn annotate(batch: &QueryBatch, oracle: &LabelVector) -> Result<AnnotatedBatch> {
    let labels = batch
        .indices
        .iter()
        .map(|&i| {
            oracle
                .labels()
                .get(i)
                .copied()
                .ok_or(Error::Index {
                    index: i,
                    len: oracle.len(),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnnotatedBatch {
        indices: batch.indices.clone(),
        labels,
    })
}

/// Moves the batch from unlabeled to labeled and advances the cycle.
pub fn update_pools(state: &PoolState, batch: &AnnotatedBatch) -> Result<PoolState> {
    let mut next = state.clone();
    for &i in &batch.indices {
        if !next.unlabeled.remove(&i) {
            let why = if state.labeled.contains(&i) {
                "already labeled"
            } else if next.labeled.contains(&i) {
                "duplicated in batch"
            } else {
                "not a train index"
            };
            return Err(Error::PoolConsistency(format!("index {i} is {why}")));
        }
        next.labeled.insert(i);
    }
    next.cycle += 1;
    Ok(next)
}
