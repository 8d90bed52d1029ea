//! Seed-deterministic SGD trainer for the multinomial logistic model.
//!
//! Plain per-example updates with an L1 proximal step on the touched
//! coordinates. Each epoch is accepted only if the full-data objective
//! (mean log-loss plus L1 penalty) does not increase; otherwise the epoch
//! is rolled back and retried at half the learning rate, so the reported
//! objective trace is non-increasing by construction.

use std::collections::HashMap;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{extract_features, softmax, SourceModel, KEY_SEPARATOR};

/// Weights below this magnitude are pruned from the final model.
pub const PRUNE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l1: f64,
    pub seed: u64,
    pub max_ngram: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 10, learning_rate: 0.5, l1: 0.0, seed: 1, max_ngram: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Objective after each accepted epoch; index 0 is the initial model.
    /// Non-increasing.
    pub epoch_objectives: Vec<f64>,
    pub lr_halvings: usize,
    pub n_params: usize,
}

struct Problem {
    classes: Vec<String>,
    features: Vec<String>,
    examples: Vec<(usize, Vec<u32>)>,
}

fn index_dataset(dataset: &[(String, String)], max_ngram: usize) -> Result<Problem> {
    let mut classes: Vec<String> = Vec::new();
    for (label, utterance) in dataset {
        if label.is_empty() || label.bytes().any(|b| b == KEY_SEPARATOR) {
            return Err(Error::invalid(format!("bad class label {label:?}")));
        }
        if utterance.bytes().any(|b| b == KEY_SEPARATOR) {
            return Err(Error::invalid("utterance contains the reserved separator 0x1f"));
        }
        if !classes.iter().any(|c| c == label) {
            classes.push(label.clone());
        }
    }
    if classes.len() < 2 {
        return Err(Error::invalid("training needs at least two distinct classes"));
    }

    let mut feature_ids: HashMap<String, u32> = HashMap::new();
    let mut features: Vec<String> = Vec::new();
    let mut examples = Vec::with_capacity(dataset.len());
    for (label, utterance) in dataset {
        let gold = classes.iter().position(|c| c == label).unwrap();
        let fv = extract_features(utterance, max_ngram);
        let ids = fv
            .features()
            .iter()
            .map(|f| {
                *feature_ids.entry(f.clone()).or_insert_with(|| {
                    features.push(f.clone());
                    features.len() as u32 - 1
                })
            })
            .collect();
        examples.push((gold, ids));
    }
    Ok(Problem { classes, features, examples })
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

struct State {
    weights: Vec<f64>,
    biases: Vec<f64>,
    n_features: usize,
}

impl State {
    fn scores(&self, gold_features: &[u32]) -> Vec<f64> {
        let n_classes = self.biases.len();
        let mut scores = self.biases.clone();
        for c in 0..n_classes {
            let row = c * self.n_features;
            for &fid in gold_features {
                scores[c] += self.weights[row + fid as usize];
            }
        }
        scores
    }

    fn objective(&self, problem: &Problem, l1: f64) -> f64 {
        let mut loss = 0.0;
        for (gold, ids) in &problem.examples {
            let p = softmax(&self.scores(ids));
            loss -= p[*gold].max(1e-300).ln();
        }
        let penalty: f64 = self.weights.iter().map(|w| w.abs()).sum();
        loss / problem.examples.len() as f64 + l1 * penalty
    }

    fn run_epoch(&mut self, problem: &Problem, order: &[usize], lr: f64, l1: f64) {
        let n_classes = self.biases.len();
        for &i in order {
            let (gold, ids) = &problem.examples[i];
            let p = softmax(&self.scores(ids));
            for c in 0..n_classes {
                let g = p[c] - if c == *gold { 1.0 } else { 0.0 };
                if g == 0.0 {
                    continue;
                }
                self.biases[c] -= lr * g;
                let row = c * self.n_features;
                for &fid in ids {
                    let w = &mut self.weights[row + fid as usize];
                    *w = soft_threshold(*w - lr * g, lr * l1);
                }
            }
        }
    }
}

/// Trains a multinomial logistic model. Deterministic for a fixed seed.
pub fn train_sgd(dataset: &[(String, String)], cfg: &TrainConfig) -> Result<(SourceModel, TrainReport)> {
    if cfg.epochs == 0 {
        return Err(Error::invalid("epochs must be >= 1"));
    }
    if !(cfg.learning_rate > 0.0) || !cfg.learning_rate.is_finite() {
        return Err(Error::invalid("learning rate must be positive"));
    }
    if cfg.l1 < 0.0 || !cfg.l1.is_finite() {
        return Err(Error::invalid("l1 must be >= 0"));
    }
    if cfg.max_ngram == 0 {
        return Err(Error::invalid("max_ngram must be >= 1"));
    }
    if dataset.is_empty() {
        return Err(Error::empty("training set has no utterances"));
    }

    let problem = index_dataset(dataset, cfg.max_ngram)?;
    let n_classes = problem.classes.len();
    let n_features = problem.features.len();
    let mut state = State {
        weights: vec![0.0; n_classes * n_features],
        biases: vec![0.0; n_classes],
        n_features,
    };

    let mut lr = cfg.learning_rate;
    let mut best = state.objective(&problem, cfg.l1);
    let mut epoch_objectives = vec![best];
    let mut lr_halvings = 0usize;
    let mut epoch = 0usize;
    let mut order: Vec<usize> = (0..problem.examples.len()).collect();

    while epoch < cfg.epochs {
        let epoch_seed = cfg.seed ^ (epoch as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut rng = ChaCha8Rng::seed_from_u64(epoch_seed);
        order.shuffle(&mut rng);

        let snapshot = (state.weights.clone(), state.biases.clone());
        state.run_epoch(&problem, &order, lr, cfg.l1);
        let obj = state.objective(&problem, cfg.l1);
        if obj <= best {
            best = obj;
            epoch_objectives.push(obj);
            epoch += 1;
        } else {
            state.weights = snapshot.0;
            state.biases = snapshot.1;
            lr /= 2.0;
            lr_halvings += 1;
            if lr_halvings > 30 {
                break;
            }
        }
    }

    let mut entries = Vec::new();
    for (c, class) in problem.classes.iter().enumerate() {
        let row = c * n_features;
        for (fid, feature) in problem.features.iter().enumerate() {
            let w = state.weights[row + fid];
            if w.abs() >= PRUNE_THRESHOLD {
                entries.push((class.clone(), feature.clone(), w));
            }
        }
    }
    let model = SourceModel::from_parts(problem.classes, state.biases, entries)?;
    let report = TrainReport { epoch_objectives, lr_halvings, n_params: model.n_params() };
    Ok((model, report))
}

/// Parses dataset TSV: `class<TAB>utterance` per line, `#` comments and
/// blank lines skipped. The utterance keeps any further tabs.
pub fn read_dataset_tsv<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((class, utterance)) = trimmed.split_once('\t') else {
            return Err(Error::Parse {
                line: lineno,
                msg: "expected class<TAB>utterance".into(),
            });
        };
        if class.is_empty() {
            return Err(Error::Parse { line: lineno, msg: "empty class label".into() });
        }
        out.push((class.to_owned(), utterance.to_owned()));
    }
    if out.is_empty() {
        return Err(Error::empty("dataset TSV has no rows"));
    }
    Ok(out)
}

pub fn read_dataset_tsv_file(path: &std::path::Path) -> Result<Vec<(String, String)>> {
    let f = std::fs::File::open(path)?;
    read_dataset_tsv(std::io::BufReader::new(f))
}
