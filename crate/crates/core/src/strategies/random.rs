use rand::Rng;

use crate::error::Result;
use crate::pools::QueryBatch;
use crate::rng::sample_positions;

use super::StrategyInput;

/// Uniform sample of `b` candidates without replacement.
pub fn query_random<R: Rng + ?Sized>(input: &StrategyInput, b: usize, rng: &mut R) -> Result<QueryBatch> {
    input.check(b)?;
    Ok(input.batch(sample_positions(rng, input.num_candidates(), b)))
}
