//! The deployable compressed weight map: an MPHF over the key set, packed
//! per-slot fingerprints and quantized weight indices, and the quantizer
//! table, wrapped in a versioned, checksummed binary container.
//!
//! Keys are not stored. A member lookup always returns its quantized weight;
//! a non-member lookup either falls through the MPHF levels or fails the
//! fingerprint check (absent with certainty), or passes both with
//! probability about 2^-b and returns some stored parameter's weight.

use std::io::{Read, Write};

use crate::bits::PackedIntVec;
use crate::error::{Error, Result};
use crate::hash::{hash, HashSeed, HASH_ALGORITHM_MURMUR2_64A};
use crate::mphf::{Mphf, MphfSize, DEFAULT_MAX_LEVELS};
use crate::quantizer::QuantizerTable;

const MAGIC: [u8; 4] = *b"CWM1";
const FORMAT_VERSION: u16 = 1;
const FLAG_MODULO_REDUCTION: u8 = 0b0000_0001;
/// Fixed header length in bytes: magic, version, algorithm id, flags, k,
/// fingerprint bits, gamma, key count.
pub const HEADER_BYTES: usize = 4 + 2 + 1 + 1 + 4 + 1 + 8 + 8;

/// Seed of the fingerprint hash f, far outside the level-seed range 0..64.
pub const FP_SEED: HashSeed = HashSeed(1 << 32);

fn fp_mask(bits: u8) -> u64 {
    match bits {
        0 => 0,
        64 => u64::MAX,
        b => (1u64 << b) - 1,
    }
}

/// Whether a lookup produced a weight or a certain miss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookupStatus {
    /// The key maps to a stored slot and its fingerprint matches; correct
    /// for every construction key, a false positive with rate ~2^-b
    /// otherwise.
    PresentProbably,
    /// The key is certainly not in the map; the weight is 0.
    AbsentCertain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LookupResult {
    pub weight: f64,
    pub status: LookupStatus,
}

impl LookupResult {
    fn absent() -> Self {
        LookupResult { weight: 0.0, status: LookupStatus::AbsentCertain }
    }

    fn present(weight: f64) -> Self {
        LookupResult { weight, status: LookupStatus::PresentProbably }
    }

    pub fn is_present(&self) -> bool {
        self.status == LookupStatus::PresentProbably
    }
}

/// Key-free compressed map from byte-string keys to quantized weights.
#[derive(Debug, Clone)]
pub struct CompressedWeightMap {
    mphf: Mphf,
    fingerprints: PackedIntVec,
    qindices: PackedIntVec,
    table: QuantizerTable,
    fingerprint_bits: u8,
}

impl CompressedWeightMap {
    /// Builds a map with load factor 1 and the default level cap.
    ///
    /// Zero-weight entries are dropped first; `epsilon` in (0, 1] sets the
    /// false-positive budget, realized as `ceil(log2(1/epsilon))` whole
    /// fingerprint bits (0 bits when epsilon = 1).
    pub fn build<K: AsRef<[u8]>>(entries: &[(K, f64)], k: u32, epsilon: f64) -> Result<Self> {
        Self::build_with(entries, k, epsilon, 1.0, DEFAULT_MAX_LEVELS)
    }

    pub fn build_with<K: AsRef<[u8]>>(
        entries: &[(K, f64)],
        k: u32,
        epsilon: f64,
        gamma: f64,
        max_levels: usize,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::invalid(format!("epsilon must be in (0, 1], got {epsilon}")));
        }
        if entries.is_empty() {
            return Err(Error::empty("cannot build a map from no entries"));
        }
        {
            let mut seen = std::collections::HashSet::with_capacity(entries.len());
            for (key, _) in entries {
                if !seen.insert(key.as_ref()) {
                    return Err(Error::duplicate_key(key.as_ref()));
                }
            }
        }

        let kept: Vec<(&[u8], f64)> = entries
            .iter()
            .filter(|(_, w)| *w != 0.0)
            .map(|(key, w)| (key.as_ref(), *w))
            .collect();
        if kept.is_empty() {
            return Err(Error::empty("all entries have zero weight"));
        }

        let fingerprint_bits = fingerprint_bits_for(epsilon);
        let keys: Vec<&[u8]> = kept.iter().map(|(key, _)| *key).collect();
        let mphf = Mphf::construct_with(&keys, max_levels, gamma)?;
        let table = QuantizerTable::fit_linear(kept.iter().map(|(_, w)| *w), k)?;

        let n = kept.len();
        let mut fp_by_slot = vec![0u64; n];
        let mut qi_by_slot = vec![0u64; n];
        for (key, w) in &kept {
            let slot = mphf.evaluate(key).expect("member key must map to a slot") as usize;
            fp_by_slot[slot] = hash(key, FP_SEED) & fp_mask(fingerprint_bits);
            qi_by_slot[slot] = table.quantize(*w) as u64;
        }

        let mut fingerprints = PackedIntVec::with_capacity(fingerprint_bits, n);
        let mut qindices = PackedIntVec::with_capacity(table.index_bits(), n);
        for slot in 0..n {
            fingerprints.push(fp_by_slot[slot]);
            qindices.push(qi_by_slot[slot]);
        }

        Ok(CompressedWeightMap { mphf, fingerprints, qindices, table, fingerprint_bits })
    }

    /// Looks up a key. Members always come back `PresentProbably` with
    /// their quantized weight; spill keys match exactly and skip the
    /// fingerprint check.
    pub fn lookup(&self, key: &[u8]) -> LookupResult {
        if let Some(slot) = self.mphf.spill_index(key) {
            return LookupResult::present(self.weight_at(slot));
        }
        let Some(slot) = self.mphf.level_index(key) else {
            return LookupResult::absent();
        };
        if self.fingerprint_bits > 0 {
            let expected = hash(key, FP_SEED) & fp_mask(self.fingerprint_bits);
            if self.fingerprints.get(slot as usize) != expected {
                return LookupResult::absent();
            }
        }
        LookupResult::present(self.weight_at(slot))
    }

    fn weight_at(&self, slot: u64) -> f64 {
        let qi = self.qindices.get(slot as usize) as u32;
        self.table.dequantize(qi).expect("stored index within table")
    }

    pub fn n_keys(&self) -> u64 {
        self.mphf.n_keys()
    }

    pub fn k(&self) -> u32 {
        self.table.k()
    }

    pub fn fingerprint_bits(&self) -> u8 {
        self.fingerprint_bits
    }

    /// False-positive rate actually realized by the whole-bit fingerprint
    /// width: 2^-b, or 1 when fingerprinting is off.
    pub fn effective_epsilon(&self) -> f64 {
        2f64.powi(-i32::from(self.fingerprint_bits))
    }

    pub fn quantizer(&self) -> &QuantizerTable {
        &self.table
    }

    pub fn mphf(&self) -> &Mphf {
        &self.mphf
    }

    /// Serializes the container (see the format notes in this module).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.stats().file_bits as usize / 8);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(HASH_ALGORITHM_MURMUR2_64A);
        out.push(FLAG_MODULO_REDUCTION);
        out.extend_from_slice(&self.table.k().to_le_bytes());
        out.push(self.fingerprint_bits);
        out.extend_from_slice(&self.mphf.gamma().to_le_bytes());
        out.extend_from_slice(&self.mphf.n_keys().to_le_bytes());

        // MPHF levels and concatenated bit payload.
        let sizes = self.mphf.level_sizes();
        out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
        for &s in sizes {
            out.extend_from_slice(&(s as u64).to_le_bytes());
        }
        for w in self.mphf.bit_words() {
            out.extend_from_slice(&w.to_le_bytes());
        }

        // Quantizer table.
        out.extend_from_slice(&self.table.k().to_le_bytes());
        for c in self.table.centers() {
            out.extend_from_slice(&c.to_le_bytes());
        }

        // Packed fingerprints, then packed indices.
        for w in self.fingerprints.words() {
            out.extend_from_slice(&w.to_le_bytes());
        }
        for w in self.qindices.words() {
            out.extend_from_slice(&w.to_le_bytes());
        }

        // Spill map, ordered by assigned index.
        let spill = self.mphf.spill_entries();
        out.extend_from_slice(&(spill.len() as u32).to_le_bytes());
        for (key, index) in spill {
            out.extend_from_slice(&(key.len() as u32).to_le_bytes());
            out.extend_from_slice(key);
            out.extend_from_slice(&index.to_le_bytes());
        }

        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    /// Writes the container to `sink`, returning the byte count.
    pub fn save<W: Write>(&self, sink: &mut W) -> Result<u64> {
        let bytes = self.to_bytes();
        sink.write_all(&bytes)?;
        Ok(bytes.len() as u64)
    }

    pub fn save_to_file(&self, path: &std::path::Path) -> Result<u64> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        let n = self.save(&mut f)?;
        f.flush()?;
        Ok(n)
    }

    /// Parses a container. The checksum is verified before any field is
    /// trusted, so single-byte corruption anywhere surfaces as
    /// `ChecksumMismatch` rather than a half-parsed map.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        if data.len() < HEADER_BYTES + 4 {
            return Err(Error::Truncated);
        }
        let (payload, crc_bytes) = data.split_at(data.len() - 4);
        let stored_crc = u32::from_le_bytes(crc_bytes.try_into().unwrap());
        if crc32fast::hash(payload) != stored_crc {
            return Err(Error::ChecksumMismatch);
        }

        let mut cur = Cursor::new(payload);
        if cur.bytes(4)? != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = cur.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let algo = cur.u8()?;
        if algo != HASH_ALGORITHM_MURMUR2_64A {
            return Err(Error::UnknownHashAlgorithm(algo));
        }
        let flags = cur.u8()?;
        if flags != FLAG_MODULO_REDUCTION {
            return Err(Error::Corrupt(format!("unsupported flags 0x{flags:02x}")));
        }
        let k = cur.u32()?;
        let fingerprint_bits = cur.u8()?;
        if fingerprint_bits > 64 {
            return Err(Error::Corrupt(format!("fingerprint width {fingerprint_bits} > 64")));
        }
        let gamma = cur.f64()?;
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::Corrupt(format!("gamma {gamma} out of range")));
        }
        let n_keys = cur.u64()?;

        let level_count = cur.u32()? as usize;
        let mut level_sizes = Vec::with_capacity(level_count);
        let mut total_bits = 0u64;
        for _ in 0..level_count {
            let s = cur.u64()?;
            total_bits = total_bits
                .checked_add(s)
                .ok_or_else(|| Error::Corrupt("level sizes overflow".into()))?;
            level_sizes.push(s as usize);
        }
        let bit_words = cur.words(total_bits.div_ceil(64) as usize)?;

        let table_k = cur.u32()?;
        if table_k != k {
            return Err(Error::Corrupt(format!(
                "header k ({k}) disagrees with quantizer table k ({table_k})"
            )));
        }
        let mut centers = Vec::with_capacity(table_k as usize);
        for _ in 0..table_k {
            centers.push(cur.f64()?);
        }
        let table = QuantizerTable::from_centers(centers)?;

        let n = n_keys as usize;
        let fp_words = cur.words((n as u64 * fingerprint_bits as u64).div_ceil(64) as usize)?;
        let fingerprints = PackedIntVec::from_words(fp_words, fingerprint_bits, n);
        let index_bits = table.index_bits();
        let qi_words = cur.words((n as u64 * index_bits as u64).div_ceil(64) as usize)?;
        let qindices = PackedIntVec::from_words(qi_words, index_bits, n);

        let spill_count = cur.u32()? as usize;
        let mut spill = Vec::with_capacity(spill_count);
        for _ in 0..spill_count {
            let len = cur.u32()? as usize;
            let key = cur.bytes(len)?.to_vec();
            let index = cur.u64()?;
            spill.push((key, index));
        }
        if !cur.at_end() {
            return Err(Error::Corrupt("trailing bytes after spill section".into()));
        }

        let mphf = Mphf::from_parts(level_sizes, bit_words, spill, n_keys, gamma)?;
        Ok(CompressedWeightMap { mphf, fingerprints, qindices, table, fingerprint_bits })
    }

    pub fn load<R: Read>(source: &mut R) -> Result<Self> {
        let mut data = Vec::new();
        source.read_to_end(&mut data)?;
        Self::from_bytes(&data)
    }

    pub fn load_from_file(path: &std::path::Path) -> Result<Self> {
        let data = std::fs::read(path)?;
        Self::from_bytes(&data)
    }

    /// Per-section storage report. `file_bits` is the exact serialized
    /// container size; the MPHF numbers are the in-memory costs (the rank
    /// directory is rebuilt at load time, not stored).
    pub fn stats(&self) -> MapStats {
        let n = self.mphf.n_keys();
        let mphf = self.mphf.size_bits();
        let index_bits = self.table.index_bits();
        let fingerprint_section_bits = n * self.fingerprint_bits as u64;
        let index_section_bits = n * index_bits as u64;
        let table_bits = 32 + 64 * self.table.k() as u64;

        let file_bytes = (HEADER_BYTES as u64)
            + 4
            + 8 * self.mphf.level_sizes().len() as u64
            + 8 * (self.mphf.total_bits() as u64).div_ceil(64)
            + 4
            + 8 * self.table.k() as u64
            + 8 * fingerprint_section_bits.div_ceil(64)
            + 8 * index_section_bits.div_ceil(64)
            + (mphf.spill_bits / 8)
            + 4;

        MapStats {
            n_keys: n,
            k: self.table.k(),
            fingerprint_bits: self.fingerprint_bits,
            index_bits,
            effective_epsilon: self.effective_epsilon(),
            levels: self.mphf.level_sizes().len(),
            spill_keys: self.mphf.spill_len(),
            mphf: mphf,
            fingerprint_section_bits,
            index_section_bits,
            table_bits,
            file_bits: file_bytes * 8,
        }
    }
}

/// Computes the fingerprint width for a requested false-positive rate:
/// log2(1/epsilon) rounded up to whole bits, capped at the hash width.
pub fn fingerprint_bits_for(epsilon: f64) -> u8 {
    if epsilon >= 1.0 {
        return 0;
    }
    let bits = (1.0 / epsilon).log2().ceil();
    if bits >= 64.0 {
        64
    } else {
        bits as u8
    }
}

/// Size report for one built map, everything in bits.
#[derive(Debug, Clone, Copy)]
pub struct MapStats {
    pub n_keys: u64,
    pub k: u32,
    pub fingerprint_bits: u8,
    pub index_bits: u8,
    pub effective_epsilon: f64,
    pub levels: usize,
    pub spill_keys: usize,
    pub mphf: MphfSize,
    pub fingerprint_section_bits: u64,
    pub index_section_bits: u64,
    pub table_bits: u64,
    /// Exact serialized container size.
    pub file_bits: u64,
}

impl MapStats {
    pub fn bits_per_entry(&self) -> f64 {
        self.file_bits as f64 / self.n_keys as f64
    }

    /// The uncompressed hash-map baseline n*(s + w): raw key bytes plus a
    /// 64-bit weight per entry, for a given mean key length in bytes.
    pub fn baseline_bits(&self, mean_key_bytes: f64) -> f64 {
        self.n_keys as f64 * (8.0 * mean_key_bytes + 64.0)
    }

    pub fn fold_reduction(&self, mean_key_bytes: f64) -> f64 {
        self.baseline_bits(mean_key_bytes) / self.file_bits as f64
    }

    pub fn render_text(&self, mean_key_bytes: Option<f64>) -> String {
        let mut s = String::new();
        s.push_str(&format!("entries              {}\n", self.n_keys));
        s.push_str(&format!("k (clusters)         {}\n", self.k));
        s.push_str(&format!(
            "fingerprint bits     {} (effective epsilon {:.3e})\n",
            self.fingerprint_bits, self.effective_epsilon
        ));
        s.push_str(&format!("index bits           {}\n", self.index_bits));
        s.push_str(&format!("mphf levels          {}\n", self.levels));
        s.push_str(&format!("spill keys           {}\n", self.spill_keys));
        s.push_str(&format!(
            "mphf bits            {} (levels {} + rank {} + meta {} + spill {})\n",
            self.mphf.total(),
            self.mphf.level_bits,
            self.mphf.rank_directory_bits,
            self.mphf.metadata_bits,
            self.mphf.spill_bits
        ));
        s.push_str(&format!("fingerprint bits tot {}\n", self.fingerprint_section_bits));
        s.push_str(&format!("index bits total     {}\n", self.index_section_bits));
        s.push_str(&format!("table bits           {}\n", self.table_bits));
        s.push_str(&format!("file bits            {}\n", self.file_bits));
        s.push_str(&format!("bits per entry       {:.2}\n", self.bits_per_entry()));
        if let Some(skb) = mean_key_bytes {
            s.push_str(&format!("baseline bits        {:.0} ({:.1} bits/entry)\n",
                self.baseline_bits(skb), self.baseline_bits(skb) / self.n_keys as f64));
            s.push_str(&format!("fold reduction       {:.2}\n", self.fold_reduction(skb)));
        }
        s
    }

    pub fn render_kv(&self, mean_key_bytes: Option<f64>) -> String {
        let mut s = String::new();
        s.push_str(&format!("n_keys={}\n", self.n_keys));
        s.push_str(&format!("k={}\n", self.k));
        s.push_str(&format!("fingerprint_bits={}\n", self.fingerprint_bits));
        s.push_str(&format!("effective_epsilon={:e}\n", self.effective_epsilon));
        s.push_str(&format!("index_bits={}\n", self.index_bits));
        s.push_str(&format!("levels={}\n", self.levels));
        s.push_str(&format!("spill_keys={}\n", self.spill_keys));
        s.push_str(&format!("mphf_level_bits={}\n", self.mphf.level_bits));
        s.push_str(&format!("mphf_rank_directory_bits={}\n", self.mphf.rank_directory_bits));
        s.push_str(&format!("mphf_metadata_bits={}\n", self.mphf.metadata_bits));
        s.push_str(&format!("mphf_spill_bits={}\n", self.mphf.spill_bits));
        s.push_str(&format!("fingerprint_section_bits={}\n", self.fingerprint_section_bits));
        s.push_str(&format!("index_section_bits={}\n", self.index_section_bits));
        s.push_str(&format!("table_bits={}\n", self.table_bits));
        s.push_str(&format!("file_bits={}\n", self.file_bits));
        s.push_str(&format!("bits_per_entry={:.4}\n", self.bits_per_entry()));
        if let Some(skb) = mean_key_bytes {
            s.push_str(&format!("baseline_bits={:.0}\n", self.baseline_bits(skb)));
            s.push_str(&format!("fold_reduction={:.4}\n", self.fold_reduction(skb)));
        }
        s
    }
}

/// Bounds-checked little-endian reader over the container payload.
struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8]) -> Self {
        Cursor { data, pos: 0 }
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::Truncated)?;
        if end > self.data.len() {
            return Err(Error::Truncated);
        }
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    fn words(&mut self, n: usize) -> Result<Vec<u64>> {
        let raw = self.bytes(n.checked_mul(8).ok_or(Error::Truncated)?)?;
        Ok(raw.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn at_end(&self) -> bool {
        self.pos == self.data.len()
    }
}
