//! Minimal perfect hash function over a static key set.
//!
//! Construction hashes the key set level by level: level `i` hashes the
//! surviving keys into exactly `ceil(gamma * |S_i|)` buckets with seed `i`,
//! marks singleton buckets with a 1, and sends colliding keys to the next
//! level. The per-level bit arrays concatenate into one bit vector whose
//! exclusive rank assigns each placed key its dense index in `[0, n)`.
//! Keys still unplaced after `max_levels` go to an exact spill map holding
//! the remaining indices, so the function stays minimal and total.

use std::collections::{HashMap, HashSet};

use crate::bits::{BitBuf, RankBitVector};
use crate::error::{Error, Result};
use crate::hash::{hash, reduce, HashSeed};

/// Level cap. Expected survivors decay by ~0.632 per level, so 64 levels
/// leave ~n * 0.632^64 keys for the spill map: zero for any sane input.
pub const DEFAULT_MAX_LEVELS: usize = 64;

/// Minimal perfect hash function: level sizes, concatenated level bits with
/// rank support, and the exact spill map for post-cap stragglers.
#[derive(Debug, Clone)]
pub struct Mphf {
    level_sizes: Vec<usize>,
    level_offsets: Vec<usize>,
    bits: RankBitVector,
    spill: HashMap<Vec<u8>, u64>,
    n_keys: u64,
    gamma: f64,
}

impl Mphf {
    /// Builds an MPHF with load factor 1 and the default level cap.
    pub fn construct<K: AsRef<[u8]>>(keys: &[K]) -> Result<Mphf> {
        Self::construct_with(keys, DEFAULT_MAX_LEVELS, 1.0)
    }

    /// Builds an MPHF. `gamma >= 1.0` widens each level's bucket range;
    /// files record it so evaluation always matches construction.
    pub fn construct_with<K: AsRef<[u8]>>(keys: &[K], max_levels: usize, gamma: f64) -> Result<Mphf> {
        if max_levels == 0 {
            return Err(Error::invalid("max_levels must be >= 1"));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::invalid("gamma must be a finite value >= 1.0"));
        }

        let mut survivors: Vec<&[u8]> = keys.iter().map(AsRef::as_ref).collect();
        {
            let mut seen = HashSet::with_capacity(survivors.len());
            for &k in &survivors {
                if !seen.insert(k) {
                    return Err(Error::duplicate_key(k));
                }
            }
        }

        let n_keys = survivors.len() as u64;
        let mut level_sizes = Vec::new();
        let mut all_bits = BitBuf::new();

        for level in 0..max_levels {
            if survivors.is_empty() {
                break;
            }
            let m = ((survivors.len() as f64 * gamma).ceil() as usize).max(1);
            let seed = HashSeed(level as u64);

            let positions: Vec<usize> = survivors
                .iter()
                .map(|k| reduce(hash(k, seed), m as u64).expect("m >= 1") as usize)
                .collect();

            let mut occupied = BitBuf::zeros(m);
            let mut collide = BitBuf::zeros(m);
            for &p in &positions {
                if occupied.get(p) {
                    collide.set(p);
                } else {
                    occupied.set(p);
                }
            }

            survivors = survivors
                .iter()
                .zip(&positions)
                .filter(|&(_, &p)| collide.get(p))
                .map(|(&k, _)| k)
                .collect();

            for i in 0..m {
                all_bits.push(occupied.get(i) && !collide.get(i));
            }
            level_sizes.push(m);
        }

        let bits = all_bits.into_rank_vector();
        let n_placed = bits.count_ones();
        let spill: HashMap<Vec<u8>, u64> = survivors
            .iter()
            .enumerate()
            .map(|(j, &k)| (k.to_vec(), n_placed + j as u64))
            .collect();

        Ok(Mphf::assemble(level_sizes, bits, spill, n_keys, gamma))
    }

    fn assemble(
        level_sizes: Vec<usize>,
        bits: RankBitVector,
        spill: HashMap<Vec<u8>, u64>,
        n_keys: u64,
        gamma: f64,
    ) -> Mphf {
        let mut level_offsets = Vec::with_capacity(level_sizes.len());
        let mut off = 0usize;
        for &s in &level_sizes {
            level_offsets.push(off);
            off += s;
        }
        debug_assert_eq!(off, bits.len());
        Mphf { level_sizes, level_offsets, bits, spill, n_keys, gamma }
    }

    /// Rebuilds an MPHF from deserialized parts, revalidating the structural
    /// invariants the container cannot express.
    pub(crate) fn from_parts(
        level_sizes: Vec<usize>,
        words: Vec<u64>,
        spill: Vec<(Vec<u8>, u64)>,
        n_keys: u64,
        gamma: f64,
    ) -> Result<Mphf> {
        let total_bits: usize = level_sizes.iter().sum();
        if words.len() < total_bits.div_ceil(64) {
            return Err(Error::Truncated);
        }
        let bits = RankBitVector::from_words(words, total_bits);
        let spill: HashMap<Vec<u8>, u64> = spill.into_iter().collect();
        if bits.count_ones() + spill.len() as u64 != n_keys {
            return Err(Error::Corrupt(format!(
                "placed bits ({}) + spill ({}) != key count ({})",
                bits.count_ones(),
                spill.len(),
                n_keys
            )));
        }
        Ok(Mphf::assemble(level_sizes, bits, spill, n_keys, gamma))
    }

    /// Index of `key` in `[0, n)` for construction keys. For other keys the
    /// result is `None` when the walk falls through every level, or an
    /// arbitrary colliding index; callers disambiguate with fingerprints.
    pub fn evaluate(&self, key: &[u8]) -> Option<u64> {
        self.spill_index(key).or_else(|| self.level_index(key))
    }

    /// Exact spill lookup; hit means the key is certainly a member.
    pub(crate) fn spill_index(&self, key: &[u8]) -> Option<u64> {
        if self.spill.is_empty() {
            return None;
        }
        self.spill.get(key).copied()
    }

    /// The level-walk half of `evaluate`: hash level by level until a set
    /// bit is reached, then return its rank in the concatenated bits.
    pub(crate) fn level_index(&self, key: &[u8]) -> Option<u64> {
        for (level, (&m, &offset)) in self.level_sizes.iter().zip(&self.level_offsets).enumerate() {
            let h = hash(key, HashSeed(level as u64));
            let pos = offset + (h % m as u64) as usize;
            if self.bits.get(pos).expect("position within level bounds") {
                return Some(self.bits.rank(pos).expect("position within level bounds"));
            }
        }
        None
    }

    pub fn n_keys(&self) -> u64 {
        self.n_keys
    }

    pub fn is_empty(&self) -> bool {
        self.n_keys == 0
    }

    /// Bucket count per level; with gamma = 1 this is exactly the surviving
    /// key count |S_i| entering each level.
    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn spill_len(&self) -> usize {
        self.spill.len()
    }

    pub(crate) fn bit_words(&self) -> &[u64] {
        self.bits.words()
    }

    pub(crate) fn total_bits(&self) -> usize {
        self.bits.len()
    }

    pub(crate) fn spill_entries(&self) -> Vec<(&[u8], u64)> {
        let mut entries: Vec<(&[u8], u64)> =
            self.spill.iter().map(|(k, &v)| (k.as_slice(), v)).collect();
        entries.sort_by_key(|&(_, v)| v);
        entries
    }

    /// Storage footprint by section, in bits, matching the container layout.
    pub fn size_bits(&self) -> MphfSize {
        let spill_payload: u64 = self
            .spill
            .keys()
            .map(|k| 32 + k.len() as u64 * 8 + 64)
            .sum();
        MphfSize {
            level_bits: self.bits.len() as u64,
            rank_directory_bits: self.bits.rank_directory_bits(),
            metadata_bits: 32 + 64 * self.level_sizes.len() as u64,
            spill_bits: 32 + spill_payload,
        }
    }
}

/// Per-section MPHF storage cost in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MphfSize {
    pub level_bits: u64,
    pub rank_directory_bits: u64,
    pub metadata_bits: u64,
    pub spill_bits: u64,
}

impl MphfSize {
    pub fn total(&self) -> u64 {
        self.level_bits + self.rank_directory_bits + self.metadata_bits + self.spill_bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_keys(n: usize, seed: u64) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|i| format!("m{:07}{:012x}", i, rng.gen::<u64>() & 0xffff_ffff_ffff)).collect()
    }

    fn assert_bijection(mphf: &Mphf, keys: &[String]) {
        let mut ids: Vec<u64> = keys.iter().map(|k| mphf.evaluate(k.as_bytes()).unwrap()).collect();
        ids.sort_unstable();
        let expected: Vec<u64> = (0..keys.len() as u64).collect();
        assert_eq!(ids, expected);
    }

    #[test]
    fn singleton_key() {
        let mphf = Mphf::construct(&["a"]).unwrap();
        assert_eq!(mphf.n_keys(), 1);
        assert_eq!(mphf.level_sizes(), &[1]);
        assert_eq!(mphf.evaluate(b"a"), Some(0));
    }

    #[test]
    fn empty_set() {
        let mphf = Mphf::construct::<&str>(&[]).unwrap();
        assert_eq!(mphf.n_keys(), 0);
        assert!(mphf.level_sizes().is_empty());
        assert_eq!(mphf.evaluate(b"anything"), None);
    }

    #[test]
    fn empty_string_key_is_legal() {
        let keys = ["", "a", "b"];
        let mphf = Mphf::construct(&keys).unwrap();
        let mut ids: Vec<u64> = keys.iter().map(|k| mphf.evaluate(k.as_bytes()).unwrap()).collect();
        ids.sort_unstable();
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn duplicate_keys_rejected() {
        let err = Mphf::construct(&["x", "y", "x"]).unwrap_err();
        match err {
            Error::DuplicateKey(k) => assert_eq!(k, "x"),
            other => panic!("expected DuplicateKey, got {other:?}"),
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Mphf::construct_with(&["a"], 0, 1.0).is_err());
        assert!(Mphf::construct_with(&["a"], 64, 0.5).is_err());
        assert!(Mphf::construct_with(&["a"], 64, f64::NAN).is_err());
    }

    #[test]
    fn bijective_on_ten_thousand_keys() {
        let keys = random_keys(10_000, 17);
        let mphf = Mphf::construct(&keys).unwrap();
        assert_bijection(&mphf, &keys);
    }

    #[test]
    fn gamma_above_one_still_bijective() {
        let keys = random_keys(2_000, 23);
        let mphf = Mphf::construct_with(&keys, DEFAULT_MAX_LEVELS, 1.5).unwrap();
        assert_bijection(&mphf, &keys);
        assert!(mphf.total_bits() >= 3_000);
    }

    #[test]
    fn level_survival_near_derived_rate() {
        // Derived from load factor 1: survivors/|S_i| -> 1 - (1 - 1/m)^(m-1),
        // which approaches 1 - 1/e = 0.632 for large m.
        let keys = random_keys(100_000, 5);
        let mphf = Mphf::construct(&keys).unwrap();
        let sizes = mphf.level_sizes();
        let mut checked = 0;
        for w in sizes.windows(2) {
            if w[0] >= 10_000 {
                let ratio = w[1] as f64 / w[0] as f64;
                assert!((0.61..=0.65).contains(&ratio), "survival {ratio:.4} at size {}", w[0]);
                checked += 1;
            }
        }
        assert!(checked >= 3, "expected several levels with |S_i| >= 10^4");
    }

    #[test]
    fn total_level_bits_near_e_n() {
        // Geometric series over level survival: sum |S_i| ~ n/(1 - 0.632) ~ e*n.
        let n = 100_000;
        let keys = random_keys(n, 29);
        let mphf = Mphf::construct(&keys).unwrap();
        let bits_per_key = mphf.total_bits() as f64 / n as f64;
        let e = std::f64::consts::E;
        assert!(
            (bits_per_key - e).abs() <= 0.1 * e,
            "level bits/key {bits_per_key:.3} not within 10% of e"
        );
    }

    #[test]
    fn non_member_collision_rate_is_high_without_fingerprints() {
        // Raw pre-fingerprint collision rate: nearly every non-member walk
        // hits some set bit before falling through ~30 levels.
        let keys = random_keys(100_000, 31);
        let mphf = Mphf::construct(&keys).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let probes = 1_000_000;
        let mut non_absent = 0u64;
        for _ in 0..probes {
            let probe = format!("q{:019x}", rng.gen::<u64>());
            if mphf.evaluate(probe.as_bytes()).is_some() {
                non_absent += 1;
            }
        }
        let fraction = non_absent as f64 / probes as f64;
        assert!(fraction >= 0.99, "non-absent fraction {fraction}");
    }

    #[test]
    fn from_parts_roundtrip_preserves_evaluation() {
        let keys = random_keys(5_000, 41);
        let mphf = Mphf::construct(&keys).unwrap();
        let spill: Vec<(Vec<u8>, u64)> =
            mphf.spill_entries().into_iter().map(|(k, v)| (k.to_vec(), v)).collect();
        let rebuilt = Mphf::from_parts(
            mphf.level_sizes().to_vec(),
            mphf.bit_words().to_vec(),
            spill,
            mphf.n_keys(),
            mphf.gamma(),
        )
        .unwrap();
        for k in &keys {
            assert_eq!(mphf.evaluate(k.as_bytes()), rebuilt.evaluate(k.as_bytes()));
        }
    }

    #[test]
    fn from_parts_rejects_count_mismatch() {
        let keys = random_keys(100, 43);
        let mphf = Mphf::construct(&keys).unwrap();
        let err = Mphf::from_parts(
            mphf.level_sizes().to_vec(),
            mphf.bit_words().to_vec(),
            vec![],
            mphf.n_keys() + 1,
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Corrupt(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn bijective_on_arbitrary_key_sets(keys in proptest::collection::hash_set("[a-z]{0,12}", 0..200)) {
            let keys: Vec<String> = keys.into_iter().collect();
            let mphf = Mphf::construct(&keys).unwrap();
            let mut ids: Vec<u64> = keys.iter().map(|k| mphf.evaluate(k.as_bytes()).unwrap()).collect();
            ids.sort_unstable();
            let expected: Vec<u64> = (0..keys.len() as u64).collect();
            prop_assert_eq!(ids, expected);
        }
    }
}
