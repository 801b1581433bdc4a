use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};
use crate::pools::QueryBatch;

use super::{check_budget, StrategyInput};

/// Greedy k-center selection.
///
/// Centers start as the rows of `centers`; each round picks the candidate
/// farthest from its nearest center (ties to the lowest position) and adds
/// it as a center. Squared distances are compared, which preserves the
/// ordering of Euclidean distances.
pub fn coreset_select(candidates: &Matrix, centers: &Matrix, b: usize) -> Result<Vec<usize>> {
    if centers.rows() == 0 {
        return Err(Error::NeedsWarmStart);
    }
    check_budget(b, candidates.rows())?;
    let mut min_dist: Vec<f64> = candidates
        .iter_rows()
        .map(|x| {
            centers
                .iter_rows()
                .map(|c| squared_distance(x, c))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut chosen = vec![false; candidates.rows()];
    let mut picked = Vec::with_capacity(b);
    for _ in 0..b {
        let mut best: Option<usize> = None;
        for (i, &dist) in min_dist.iter().enumerate() {
            if chosen[i] {
                continue;
            }
            if best.is_none_or(|j| dist > min_dist[j]) {
                best = Some(i);
            }
        }
        let pick = best.expect("b <= #candidates");
        chosen[pick] = true;
        picked.push(pick);
        let center = candidates.row(pick);
        for (i, x) in candidates.iter_rows().enumerate() {
            let dist = squared_distance(x, center);
            if dist < min_dist[i] {
                min_dist[i] = dist;
            }
        }
    }
    Ok(picked)
}

/// Largest Euclidean distance from a candidate to its nearest center.
pub fn covering_radius(candidates: &Matrix, centers: &Matrix) -> f64 {
    candidates
        .iter_rows()
        .map(|x| {
            centers
                .iter_rows()
                .map(|c| squared_distance(x, c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        .sqrt()
}

pub fn query_coreset(input: &StrategyInput, b: usize) -> Result<QueryBatch> {
    input.validate()?;
    let positions = coreset_select(&input.candidate_embeddings, &input.labeled_embeddings, b)?;
    Ok(input.batch(positions))
}
