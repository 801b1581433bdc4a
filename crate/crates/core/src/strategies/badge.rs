use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{squared_distance, squared_norm, Matrix};
use crate::pools::QueryBatch;
use crate::rng::below;

use super::{check_budget, StrategyInput};

/// k-means++ seeding without Lloyd refinement.
///
/// The first point is drawn with probability proportional to its squared
/// norm (its squared distance from the zero gradient); every further point
/// proportional to the squared distance to the nearest point chosen so far.
/// When all remaining mass is zero the draw falls back to uniform over the
/// unchosen points. Returns `b` distinct positions in selection order.
pub fn kmeanspp_select<R: Rng + ?Sized>(points: &Matrix, b: usize, rng: &mut R) -> Result<Vec<usize>> {
    check_budget(b, points.rows())?;
    let n = points.rows();
    let mut weight: Vec<f64> = points.iter_rows().map(squared_norm).collect();
    let mut chosen = vec![false; n];
    let mut picked = Vec::with_capacity(b);

    for _ in 0..b {
        let total: f64 = weight
            .iter()
            .zip(&chosen)
            .filter(|(_, &c)| !c)
            .map(|(w, _)| w)
            .sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            let mut last_positive = None;
            for i in 0..n {
                if chosen[i] || weight[i] <= 0.0 {
                    continue;
                }
                last_positive = Some(i);
                acc += weight[i];
                if acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave `acc` a hair below `target`
            pick.or(last_positive).expect("positive mass")
        } else {
            let open: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            open[below(rng, open.len())]
        };
        chosen[pick] = true;
        weight[pick] = 0.0;
        picked.push(pick);
        let center = points.row(pick);
        for i in 0..n {
            if !chosen[i] {
                weight[i] = weight[i].min(squared_distance(points.row(i), center));
            }
        }
    }
    Ok(picked)
}

/// k-means++ seeding over the candidates' gradient embeddings.
pub fn query_badge<R: Rng + ?Sized>(input: &StrategyInput, b: usize, rng: &mut R) -> Result<QueryBatch> {
    input.check(b)?;
    let grads = input
        .grad_embeddings
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("badge requires gradient embeddings".into()))?;
    let positions = kmeanspp_select(grads, b, rng)?;
    Ok(input.batch(positions))
}
