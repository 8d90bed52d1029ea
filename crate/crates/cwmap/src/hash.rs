//! Seeded 64-bit hash family used for level hashing and fingerprints.
//!
//! The family is MurmurHash64A with the family index used directly as the
//! algorithm seed, so `h_i` is simply `hash(key, HashSeed(i))`. The algorithm
//! id is recorded in the container header so files stay self-describing.

use crate::error::{Error, Result};

/// Container header id for MurmurHash64A.
pub const HASH_ALGORITHM_MURMUR2_64A: u8 = 1;

/// Index into the hash family; doubles as the raw Murmur seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashSeed(pub u64);

const M: u64 = 0xc6a4_a793_5bd1_e995;
const R: u32 = 47;

/// MurmurHash64A over raw bytes. Deterministic across platforms: blocks are
/// read little-endian regardless of host byte order.
pub fn hash(key: &[u8], seed: HashSeed) -> u64 {
    let len = key.len();
    let mut h = seed.0 ^ (len as u64).wrapping_mul(M);

    let mut chunks = key.chunks_exact(8);
    for block in &mut chunks {
        let mut k = u64::from_le_bytes(block.try_into().unwrap());
        k = k.wrapping_mul(M);
        k ^= k >> R;
        k = k.wrapping_mul(M);
        h ^= k;
        h = h.wrapping_mul(M);
    }

    let tail = chunks.remainder();
    if !tail.is_empty() {
        let mut t = 0u64;
        for (i, &b) in tail.iter().enumerate() {
            t |= (b as u64) << (8 * i);
        }
        h ^= t;
        h = h.wrapping_mul(M);
    }

    h ^= h >> R;
    h = h.wrapping_mul(M);
    h ^= h >> R;
    h
}

/// Reduces a hash value to a bucket in `[0, m)` by plain modulo.
pub fn reduce(h: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::invalid("reduce: bucket count m must be >= 1"));
    }
    Ok(h % m)
}
