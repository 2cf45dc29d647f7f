//! Deterministic substream derivation.
//!
//! One master seed fans out into independent per-agent, per-iteration,
//! per-phase streams, so results never depend on evaluation order and
//! parallel and sequential builds produce identical output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a tag path.
pub fn derive(master: u64, tags: &[u64]) -> u64 {
    let mut state = mix(master ^ 0xA076_1D64_78BD_642F);
    for &t in tags {
        state = mix(state ^ mix(t));
    }
    state
}

/// A seeded generator for the given tag path.
pub fn substream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, tags))
}

/// Phase tags used by the optimizers.
#[derive(Debug, Clone, Copy)]
pub enum Phase {
    Init = 0,
    Individual = 1,
    Volitive = 2,
    Velocity = 3,
}

/// Stream for agent `index` in `phase` of iteration `t`.
pub fn agent_stream(master: u64, t: usize, phase: Phase, index: usize) -> ChaCha8Rng {
    substream(master, &[t as u64, phase as u64, index as u64])
}
