//! Shared generators for the integration and acceptance suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Distinct 20-byte member keys ("k" + counter + hex salt).
pub fn random_keys(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| format!("k{:06}{:013x}", i, rng.gen::<u64>() & 0xf_ffff_ffff_ffff)).collect()
}

/// Entries with 20-byte keys and near-zero-mean normal weights, no zeros.
pub fn random_entries(n: usize, seed: u64) -> Vec<(String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    random_keys(n, seed.wrapping_add(1))
        .into_iter()
        .map(|k| {
            let mut w: f64 = normal.sample(&mut rng);
            if w == 0.0 {
                w = 1e-6;
            }
            (k, w)
        })
        .collect()
}

/// Non-member probes, disjoint from member keys by prefix.
pub fn probe_keys(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| format!("q{:019x}", rng.gen::<u64>())).collect()
}

const TOPICS: [(&str, [&str; 10]); 4] = [
    ("music", ["play", "song", "tune", "album", "artist", "volume", "track", "band", "playlist", "radio"]),
    ("shopping", ["buy", "order", "cart", "item", "deliver", "price", "basket", "checkout", "refund", "store"]),
    ("weather", ["rain", "sunny", "forecast", "temperature", "cold", "wind", "cloudy", "storm", "humid", "degrees"]),
    ("timer", ["timer", "alarm", "minutes", "remind", "countdown", "snooze", "hours", "stopwatch", "seconds", "repeat"]),
];

const FILLER: [&str; 12] =
    ["please", "the", "my", "a", "now", "can", "you", "set", "me", "for", "this", "today"];

/// Synthetic 4-class utterances. With `with_oov`, about a third of the
/// utterances carry one or two words from a large out-of-vocabulary pool,
/// so scoring them hits parameters absent from any trained model.
pub fn synth_dataset(n: usize, seed: u64, with_oov: bool) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (class, vocab) = TOPICS[rng.gen_range(0..TOPICS.len())];
            let mut words: Vec<String> = Vec::new();
            for _ in 0..rng.gen_range(2..=4) {
                words.push(vocab[rng.gen_range(0..vocab.len())].to_string());
            }
            for _ in 0..rng.gen_range(1..=3) {
                words.push(FILLER[rng.gen_range(0..FILLER.len())].to_string());
            }
            if with_oov && rng.gen_bool(0.35) {
                for _ in 0..rng.gen_range(1..=2) {
                    words.push(format!("rare{}", rng.gen_range(0..4000)));
                }
            }
            // Shuffle word order so bigrams vary.
            for i in (1..words.len()).rev() {
                words.swap(i, rng.gen_range(0..=i));
            }
            (class.to_string(), words.join(" "))
        })
        .collect()
}
