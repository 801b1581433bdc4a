use crate::classifier::ProbMatrix;
use crate::error::Result;
use crate::pools::QueryBatch;

use super::{top_b, StrategyInput, LOG_EPS};

/// Shannon entropy in nats with a guarded logarithm.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&pc| pc * pc.max(LOG_EPS).ln()).sum::<f64>()
}

pub fn entropy_scores(probs: &ProbMatrix) -> Vec<f64> {
    probs.iter_rows().map(entropy).collect()
}

/// The `b` candidates with the highest predictive entropy.
pub fn query_entropy(input: &StrategyInput, b: usize) -> Result<QueryBatch> {
    input.check(b)?;
    let scores = entropy_scores(&input.candidate_probs);
    Ok(input.batch(top_b(&scores, b)))
}
