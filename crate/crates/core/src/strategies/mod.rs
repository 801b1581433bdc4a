//! Batch query strategies.
//!
//! Every strategy scores the candidate rows of a [`StrategyInput`] and returns
//! `b` distinct candidates. Ties always resolve to the lowest candidate
//! position; the runner passes candidates in ascending train-index order, so
//! this is also the lowest train index.

mod badge;
mod cal;
mod coreset;
mod entropy;
mod random;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::ProbMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pools::QueryBatch;

pub use badge::{kmeanspp_select, query_badge};
pub use cal::{cal_scores, kl_divergence, query_cal};
pub use coreset::{coreset_select, covering_radius, query_coreset};
pub use entropy::{entropy, entropy_scores, query_entropy};
pub use random::query_random;

/// Guard for logarithms of probabilities.
pub const LOG_EPS: f64 = 1e-12;

pub const DEFAULT_CAL_NEIGHBORS: usize = 10;

/// Everything a strategy may look at for one query.
#[derive(Debug, Clone)]
pub struct StrategyInput {
    pub cycle: usize,
    /// Train indices of the candidates, one per candidate row below.
    pub candidate_indices: Vec<usize>,
    pub candidate_probs: ProbMatrix,
    pub candidate_embeddings: Matrix,
    pub labeled_embeddings: Matrix,
    pub labeled_probs: ProbMatrix,
    /// Only required by BADGE.
    pub grad_embeddings: Option<Matrix>,
}

impl StrategyInput {
    pub fn validate(&self) -> Result<()> {
        let n = self.candidate_indices.len();
        let mismatch = |what: &str, found: usize| {
            Err(Error::InvalidInput(format!(
                "{what} has {found} rows, expected {n}"
            )))
        };
        if self.candidate_probs.rows() != n {
            return mismatch("candidate_probs", self.candidate_probs.rows());
        }
        if self.candidate_embeddings.rows() != n {
            return mismatch("candidate_embeddings", self.candidate_embeddings.rows());
        }
        if let Some(g) = &self.grad_embeddings {
            if g.rows() != n {
                return mismatch("grad_embeddings", g.rows());
            }
        }
        if self.labeled_probs.rows() != self.labeled_embeddings.rows() {
            return Err(Error::InvalidInput(format!(
                "labeled_probs has {} rows but labeled_embeddings has {}",
                self.labeled_probs.rows(),
                self.labeled_embeddings.rows()
            )));
        }
        Ok(())
    }

    pub fn num_candidates(&self) -> usize {
        self.candidate_indices.len()
    }

    pub(crate) fn batch(&self, positions: Vec<usize>) -> QueryBatch {
        QueryBatch {
            indices: positions
                .into_iter()
                .map(|p| self.candidate_indices[p])
                .collect(),
            cycle: self.cycle,
        }
    }

    /// Shared precondition checks: consistent rows and `b <= #candidates`.
    pub(crate) fn check(&self, b: usize) -> Result<()> {
        self.validate()?;
        check_budget(b, self.num_candidates())
    }
}

pub(crate) fn check_budget(requested: usize, available: usize) -> Result<()> {
    if requested > available {
        return Err(Error::InsufficientCandidates {
            requested,
            available,
        });
    }
    Ok(())
}

/// Positions of the `b` highest scores; ties to the lowest position.
pub(crate) fn top_b(scores: &[f64], b: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    order.truncate(b);
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Random,
    Entropy,
    Coreset,
    Badge,
    Cal { k: usize },
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Random => "random",
            StrategyKind::Entropy => "entropy",
            StrategyKind::Coreset => "coreset",
            StrategyKind::Badge => "badge",
            StrategyKind::Cal { .. } => "cal",
        }
    }

    /// Coreset and CAL compare candidates against the labeled pool.
    pub fn needs_labeled_pool(&self) -> bool {
        matches!(self, StrategyKind::Coreset | StrategyKind::Cal { .. })
    }

    pub fn needs_gradients(&self) -> bool {
        matches!(self, StrategyKind::Badge)
    }

    pub fn validate(&self) -> Result<()> {
        if let StrategyKind::Cal { k: 0 } = self {
            return Err(Error::InvalidConfig("cal needs k >= 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::Cal { k } if *k != DEFAULT_CAL_NEIGHBORS => write!(f, "cal:k={k}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    /// Accepts `random`, `entropy`, `coreset`, `badge`, `cal` and `cal:k=<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.trim() {
            "random" => StrategyKind::Random,
            "entropy" => StrategyKind::Entropy,
            "coreset" => StrategyKind::Coreset,
            "badge" => StrategyKind::Badge,
            "cal" => StrategyKind::Cal {
                k: DEFAULT_CAL_NEIGHBORS,
            },
            other => {
                let k = other
                    .strip_prefix("cal:k=")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy {other:?}")))?;
                StrategyKind::Cal { k }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl Serialize for StrategyKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StrategyKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Runs the strategy `kind` on `input`, selecting `b` candidates.
pub fn select<R: Rng + ?Sized>(
    kind: StrategyKind,
    input: &StrategyInput,
    b: usize,
    rng: &mut R,
) -> Result<QueryBatch> {
    match kind {
        StrategyKind::Random => query_random(input, b, rng),
        StrategyKind::Entropy => query_entropy(input, b),
        StrategyKind::Coreset => query_coreset(input, b),
        StrategyKind::Badge => query_badge(input, b, rng),
        StrategyKind::Cal { k } => query_cal(input, b, k),
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Input with the given candidate probabilities and embeddings; labeled
    /// side may be empty.
    pub fn input(
        cand_probs: &[Vec<f64>],
        cand_emb: &[Vec<f64>],
        lab_probs: &[Vec<f64>],
        lab_emb: &[Vec<f64>],
    ) -> StrategyInput {
        let c = cand_probs.first().or(lab_probs.first()).map_or(2, Vec::len);
        let d = cand_emb.first().or(lab_emb.first()).map_or(1, Vec::len);
        let probs = |rows: &[Vec<f64>]| {
            if rows.is_empty() {
                ProbMatrix::new(Matrix::zeros(0, c)).unwrap()
            } else {
                ProbMatrix::from_rows(rows).unwrap()
            }
        };
        let emb = |rows: &[Vec<f64>]| {
            if rows.is_empty() {
                Matrix::zeros(0, d)
            } else {
                Matrix::from_rows(rows)
            }
        };
        let n = cand_probs.len();
        StrategyInput {
            cycle: 1,
            candidate_indices: (0..n).collect(),
            candidate_probs: probs(cand_probs),
            candidate_embeddings: if cand_emb.is_empty() {
                Matrix::zeros(n, d)
            } else {
                emb(cand_emb)
            },
            labeled_embeddings: emb(lab_emb),
            labeled_probs: probs(lab_probs),
            grad_embeddings: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in ["random", "entropy", "coreset", "badge", "cal", "cal:k=3"] {
            assert_eq!(s.parse::<StrategyKind>().unwrap().to_string(), s);
        }
        assert_eq!(
            "cal".parse::<StrategyKind>().unwrap(),
            StrategyKind::Cal { k: 10 }
        );
        assert!("cal:k=0".parse::<StrategyKind>().is_err());
        assert!("bald".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn top_b_tie_rule() {
        assert_eq!(top_b(&[1.0, 3.0, 3.0, 2.0], 2), vec![1, 2]);
        assert_eq!(top_b(&[0.5; 4], 2), vec![0, 1]);
        assert!(top_b(&[1.0], 0).is_empty());
    }
}
