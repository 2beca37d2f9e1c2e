//! Counter-based randomness.
//!
//! Every sampled object in this crate is addressed, not drawn: a master
//! seed plus a stream index selects an independent ChaCha12 stream, and a
//! position within the stream selects a word. Parallel and serial
//! evaluation therefore agree bit for bit, and any single label or trial
//! can be re-derived in O(1) without replaying its predecessors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// An independent, seekable stream derived from `(master_seed, stream)`.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// The `pos`-th u64 of stream `(master_seed, stream)`. O(1) seek.
pub fn indexed_u64(master_seed: u64, stream: u64, pos: u64) -> u64 {
    let mut rng = stream_rng(master_seed, stream);
    // One u64 consumes two 32-bit words of ChaCha output.
    rng.set_word_pos(u128::from(pos) * 2);
    rng.gen()
}

/// Bernoulli draw with exact rational success probability `num/den`,
/// addressed by `(master_seed, stream, pos)`.
///
/// Compares a uniform 64-bit word against `num/den` scaled to 2^64, so two
/// calls with equal parameters agree on every platform.
pub fn indexed_bernoulli(master_seed: u64, stream: u64, pos: u64, num: u64, den: u64) -> bool {
    assert!(den > 0 && num <= den, "probability must lie in [0,1]");
    let u = indexed_u64(master_seed, stream, pos);
    // u < num/den * 2^64  <=>  u * den < num * 2^64, computed in u128.
    u128::from(u) * u128::from(den) < u128::from(num) << 64
}
