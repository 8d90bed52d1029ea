//! Packed bit storage: an immutable rank-indexed bit vector, a mutable bit
//! buffer used during construction, and fixed-width packed integer arrays.
//!
//! All layouts share one convention: bit `j` of a vector is bit `j % 64` of
//! little-endian word `j / 64`, trailing bits zero. Serialized payloads are
//! the raw words in little-endian byte order.

/// Bits per rank chunk. One 64-bit cumulative counter per chunk puts the
/// rank directory overhead at 64/512 = 12.5% of the data bits.
pub const CHUNK_BITS: usize = 512;

const CHUNK_WORDS: usize = CHUNK_BITS / 64;

fn words_for(n_bits: usize) -> usize {
    n_bits.div_ceil(64)
}

/// Immutable bit vector with one-level chunked rank support.
///
/// `rank(i)` is exclusive: it counts set bits at positions strictly below
/// `i`, so the dense id handed to a set bit at position `p` is `rank(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankBitVector {
    words: Vec<u64>,
    n_bits: usize,
    /// `chunk_ranks[j]` = number of ones strictly before chunk `j`.
    /// Always at least one entry; the total popcount is kept separately.
    chunk_ranks: Vec<u64>,
    total_ones: u64,
}

impl RankBitVector {
    /// Builds the rank directory over `n_bits` bits of `words`. Extra words
    /// are dropped and trailing bits of the last word are zeroed.
    pub fn from_words(mut words: Vec<u64>, n_bits: usize) -> Self {
        let needed = words_for(n_bits);
        assert!(words.len() >= needed, "word payload shorter than n_bits");
        words.truncate(needed);
        if n_bits % 64 != 0 {
            let mask = (1u64 << (n_bits % 64)) - 1;
            if let Some(last) = words.last_mut() {
                *last &= mask;
            }
        }

        let num_chunks = n_bits.div_ceil(CHUNK_BITS).max(1);
        let mut chunk_ranks = Vec::with_capacity(num_chunks);
        let mut ones = 0u64;
        for chunk in 0..num_chunks {
            chunk_ranks.push(ones);
            let start = chunk * CHUNK_WORDS;
            let end = ((chunk + 1) * CHUNK_WORDS).min(words.len());
            for w in &words[start..end] {
                ones += w.count_ones() as u64;
            }
        }

        RankBitVector { words, n_bits, chunk_ranks, total_ones: ones }
    }

    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.total_ones
    }

    /// The stored bit, or `None` past the end.
    pub fn get(&self, i: usize) -> Option<bool> {
        if i >= self.n_bits {
            return None;
        }
        Some((self.words[i / 64] >> (i % 64)) & 1 == 1)
    }

    /// Number of set bits strictly before position `i`, or `None` when
    /// `i > len()`. One directory read plus a scan bounded by the chunk.
    pub fn rank(&self, i: usize) -> Option<u64> {
        if i > self.n_bits {
            return None;
        }
        if i == self.n_bits {
            return Some(self.total_ones);
        }
        let chunk = i / CHUNK_BITS;
        let mut r = self.chunk_ranks[chunk];
        let last = i / 64;
        for w in &self.words[chunk * CHUNK_WORDS..last] {
            r += w.count_ones() as u64;
        }
        let rem = i % 64;
        if rem > 0 {
            r += (self.words[last] & ((1u64 << rem) - 1)).count_ones() as u64;
        }
        Some(r)
    }

    /// Raw little-endian word payload (trailing bits zero).
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Size of the rank directory in bits (64 per chunk counter).
    pub fn rank_directory_bits(&self) -> u64 {
        self.chunk_ranks.len() as u64 * 64
    }
}

/// Growable bit buffer used while assembling level bit arrays.
#[derive(Debug, Clone, Default)]
pub struct BitBuf {
    words: Vec<u64>,
    n_bits: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(n_bits: usize) -> Self {
        BitBuf { words: vec![0; words_for(n_bits)], n_bits }
    }

    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.n_bits);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.n_bits);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn clear(&mut self, i: usize) {
        assert!(i < self.n_bits);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn push(&mut self, bit: bool) {
        if self.n_bits % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.n_bits / 64] |= 1 << (self.n_bits % 64);
        }
        self.n_bits += 1;
    }

    pub fn into_rank_vector(self) -> RankBitVector {
        RankBitVector::from_words(self.words, self.n_bits)
    }
}

/// Fixed-width unsigned integers packed LSB-first into little-endian words.
/// Width 0 is legal and stores nothing; every `get` then returns 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedIntVec {
    words: Vec<u64>,
    width: u8,
    len: usize,
}

impl PackedIntVec {
    pub fn new(width: u8) -> Self {
        assert!(width <= 64, "width must be <= 64");
        PackedIntVec { words: Vec::new(), width, len: 0 }
    }

    pub fn with_capacity(width: u8, n: usize) -> Self {
        assert!(width <= 64, "width must be <= 64");
        PackedIntVec {
            words: Vec::with_capacity(words_for(n * width as usize)),
            width,
            len: 0,
        }
    }

    /// Reassembles a packed vector from its serialized parts.
    pub fn from_words(words: Vec<u64>, width: u8, len: usize) -> Self {
        assert!(width <= 64, "width must be <= 64");
        assert!(words.len() >= words_for(len * width as usize));
        PackedIntVec { words, width, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    /// Appends `v`, keeping only the low `width` bits.
    pub fn push(&mut self, v: u64) {
        let w = self.width as usize;
        if w == 0 {
            self.len += 1;
            return;
        }
        let v = v & self.mask();
        let start = self.len * w;
        let word = start / 64;
        let off = start % 64;
        if self.words.len() < words_for(start + w) {
            self.words.resize(words_for(start + w), 0);
        }
        self.words[word] |= v << off;
        if off + w > 64 {
            self.words[word + 1] |= v >> (64 - off);
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> u64 {
        assert!(i < self.len, "packed index {} out of range {}", i, self.len);
        let w = self.width as usize;
        if w == 0 {
            return 0;
        }
        let start = i * w;
        let word = start / 64;
        let off = start % 64;
        let mut v = self.words[word] >> off;
        if off + w > 64 {
            v |= self.words[word + 1] << (64 - off);
        }
        v & self.mask()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Payload size in bits (`len * width`).
    pub fn bit_len(&self) -> u64 {
        self.len as u64 * self.width as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_rank(words: &[u64], i: usize) -> u64 {
        (0..i).filter(|&j| (words[j / 64] >> (j % 64)) & 1 == 1).count() as u64
    }

    #[test]
    fn empty_vector() {
        let v = RankBitVector::from_words(vec![], 0);
        assert_eq!(v.len(), 0);
        assert_eq!(v.chunk_ranks, vec![0]);
        assert_eq!(v.count_ones(), 0);
        assert_eq!(v.rank(0), Some(0));
        assert_eq!(v.rank(1), None);
        assert_eq!(v.get(0), None);
    }

    #[test]
    fn full_single_chunk() {
        let v = RankBitVector::from_words(vec![u64::MAX; 8], 512);
        assert_eq!(v.chunk_ranks, vec![0]);
        assert_eq!(v.count_ones(), 512);
        assert_eq!(v.rank(512), Some(512));
        assert_eq!(v.rank(513), None);
    }

    #[test]
    fn small_examples() {
        // bits = 11111: rank(3) = 3.
        let v = RankBitVector::from_words(vec![0b11111], 5);
        assert_eq!(v.rank(3), Some(3));
        // bits = 10 (index 0 set, index 1 clear).
        let v = RankBitVector::from_words(vec![0b01], 2);
        assert_eq!(v.get(0), Some(true));
        assert_eq!(v.get(1), Some(false));
        // all zeros: rank is 0 everywhere.
        let v = RankBitVector::from_words(vec![0; 4], 200);
        for i in [0, 1, 63, 64, 199, 200] {
            assert_eq!(v.rank(i), Some(0));
        }
    }

    #[test]
    fn rank_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n_bits = 100_000;
        let words: Vec<u64> = (0..words_for(n_bits)).map(|_| rng.gen()).collect();
        let v = RankBitVector::from_words(words.clone(), n_bits);
        for _ in 0..1_000 {
            let i = rng.gen_range(0..=n_bits);
            assert_eq!(v.rank(i), Some(naive_rank(&words, i)), "rank({})", i);
        }
        assert_eq!(v.count_ones(), naive_rank(&words, n_bits));
    }

    #[test]
    fn get_matches_source() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n_bits = 5_000;
        let words: Vec<u64> = (0..words_for(n_bits)).map(|_| rng.gen()).collect();
        let v = RankBitVector::from_words(words.clone(), n_bits);
        for i in 0..n_bits {
            let want = (words[i / 64] >> (i % 64)) & 1 == 1;
            assert_eq!(v.get(i), Some(want));
        }
    }

    #[test]
    fn chunk_ranks_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n_bits = 100_000;
        let words: Vec<u64> = (0..words_for(n_bits)).map(|_| rng.gen()).collect();
        let v = RankBitVector::from_words(words, n_bits);
        assert_eq!(v.chunk_ranks[0], 0);
        for j in 0..v.chunk_ranks.len() {
            let lo = v.chunk_ranks[j];
            let hi = if j + 1 < v.chunk_ranks.len() { v.chunk_ranks[j + 1] } else { v.total_ones };
            assert!(hi >= lo);
            assert_eq!(hi - lo, v.rank(((j + 1) * CHUNK_BITS).min(n_bits)).unwrap() - v.rank(j * CHUNK_BITS).unwrap());
        }
        // Directory overhead stays within 64/CHUNK_BITS per data bit plus one
        // counter of slack for the final partial chunk.
        assert!(v.rank_directory_bits() <= (n_bits as u64 * 64).div_ceil(CHUNK_BITS as u64) + 64);
    }

    #[test]
    fn bitbuf_roundtrip() {
        let mut b = BitBuf::zeros(130);
        b.set(0);
        b.set(64);
        b.set(129);
        b.clear(64);
        assert!(b.get(0) && !b.get(64) && b.get(129));
        let v = b.into_rank_vector();
        assert_eq!(v.count_ones(), 2);
        assert_eq!(v.rank(130), Some(2));
    }

    proptest! {
        #[test]
        fn rank_increment_equals_get(bits in proptest::collection::vec(any::<bool>(), 0..700)) {
            let mut buf = BitBuf::new();
            for &b in &bits {
                buf.push(b);
            }
            let v = buf.into_rank_vector();
            prop_assert_eq!(v.len(), bits.len());
            for i in 0..bits.len() {
                prop_assert_eq!(v.rank(i + 1).unwrap() - v.rank(i).unwrap(), u64::from(bits[i]));
                prop_assert_eq!(v.get(i), Some(bits[i]));
            }
            prop_assert_eq!(v.rank(bits.len()).unwrap(), v.count_ones());
        }

        #[test]
        fn packed_roundtrip(width in 0u8..=64, values in proptest::collection::vec(any::<u64>(), 0..200)) {
            let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
            let mut p = PackedIntVec::new(width);
            for &v in &values {
                p.push(v);
            }
            prop_assert_eq!(p.len(), values.len());
            for (i, &v) in values.iter().enumerate() {
                prop_assert_eq!(p.get(i), v & mask);
            }
            let q = PackedIntVec::from_words(p.words().to_vec(), width, values.len());
            for (i, &v) in values.iter().enumerate() {
                prop_assert_eq!(q.get(i), v & mask);
            }
        }
    }
}
