//! Seeded random substreams.
//!
//! Every random draw in a run comes from a ChaCha20 stream (a counter-based
//! generator). The 256-bit key is expanded from the experiment seed with
//! SplitMix64 and the 64-bit stream id packs `(cycle, purpose)`, so draws for
//! different purposes or cycles never share state. ChaCha output is fixed by
//! its specification and all integer sampling goes through `u64` ranges,
//! so streams are identical on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type DalRng = ChaCha20Rng;

/// What a substream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    Init = 1,
    Subset = 2,
    Strategy = 3,
    Shuffle = 4,
    ModelInit = 5,
    Synth = 6,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, cycle, purpose)`.
pub fn substream(seed: u64, cycle: u32, purpose: Purpose) -> DalRng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(((cycle as u64) << 8) | purpose as u64);
    rng
}

/// Uniform integer in `[0, n)`; `n` must be positive.
pub fn below<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    rng.random_range(0..n as u64) as usize
}

/// In-place Fisher-Yates shuffle using portable `u64` draws.
pub fn shuffle<T, R: Rng + ?Sized>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

/// `k` distinct positions from `[0, n)`, uniform without replacement, in draw order.
pub fn sample_positions<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut positions: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + below(rng, n - i);
        positions.swap(i, j);
    }
    positions.truncate(k);
    positions
}
