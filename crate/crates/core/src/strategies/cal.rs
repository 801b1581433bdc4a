use crate::classifier::ProbMatrix;
use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};
use crate::pools::QueryBatch;

use super::{top_b, StrategyInput, LOG_EPS};

/// `KL(p || q)` in nats with guarded logarithms.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pc, &qc)| pc * (pc.max(LOG_EPS) / qc.max(LOG_EPS)).ln())
        .sum()
}

/// Positions of the `k` nearest rows of `pool` to `x`, ties to the lowest position.
fn nearest(x: &[f64], pool: &Matrix, k: usize) -> Vec<usize> {
    let dists: Vec<f64> = pool.iter_rows().map(|r| squared_distance(x, r)).collect();
    let mut order: Vec<usize> = (0..pool.rows()).collect();
    order.sort_by(|&i, &j| dists[i].total_cmp(&dists[j]).then(i.cmp(&j)));
    order.truncate(k);
    order
}

/// Mean divergence between each candidate's prediction and those of its
/// `min(k, |labeled|)` nearest labeled neighbours in embedding space.
pub fn cal_scores(
    candidate_embeddings: &Matrix,
    candidate_probs: &ProbMatrix,
    labeled_embeddings: &Matrix,
    labeled_probs: &ProbMatrix,
    k: usize,
) -> Result<Vec<f64>> {
    if labeled_embeddings.rows() == 0 {
        return Err(Error::NeedsWarmStart);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("cal needs k >= 1".into()));
    }
    let k = k.min(labeled_embeddings.rows());
    Ok(candidate_embeddings
        .iter_rows()
        .zip(candidate_probs.iter_rows())
        .map(|(x, q)| {
            let total: f64 = nearest(x, labeled_embeddings, k)
                .into_iter()
                .map(|j| kl_divergence(labeled_probs.row(j), q))
                .sum();
            // guarded logs can push an exact zero a few ulps negative
            (total / k as f64).max(0.0)
        })
        .collect())
}

pub fn query_cal(input: &StrategyInput, b: usize, k: usize) -> Result<QueryBatch> {
    input.check(b)?;
    let scores = cal_scores(
        &input.candidate_embeddings,
        &input.candidate_probs,
        &input.labeled_embeddings,
        &input.labeled_probs,
        k,
    )?;
    Ok(input.batch(top_b(&scores, b)))
}
