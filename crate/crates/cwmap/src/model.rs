//! Sparse multinomial linear classifier over n-gram features, scoring
//! against either the full-precision weight map or a compressed one.
//!
//! Parameters live in a single key space: the composite key
//! `class 0x1F feature`. The unit separator is forbidden inside class
//! labels and features, which ingest validates.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::map::CompressedWeightMap;

/// Byte separating class from feature inside a composite key.
pub const KEY_SEPARATOR: u8 = 0x1F;

/// Feature column marking a per-class bias row in model TSV files.
pub const BIAS_FEATURE: &str = "__BIAS__";

/// Builds the composite key `class 0x1F feature`.
pub fn composite_key(class: &str, feature: &str) -> Vec<u8> {
    let mut key = Vec::with_capacity(class.len() + 1 + feature.len());
    key.extend_from_slice(class.as_bytes());
    key.push(KEY_SEPARATOR);
    key.extend_from_slice(feature.as_bytes());
    key
}

fn validate_component(kind: &str, s: &str) -> Result<()> {
    if s.is_empty() {
        return Err(Error::invalid(format!("{kind} must not be empty")));
    }
    if s.bytes().any(|b| b == KEY_SEPARATOR) {
        return Err(Error::invalid(format!("{kind} {s:?} contains the reserved separator 0x1f")));
    }
    Ok(())
}

/// Active feature strings extracted from one utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    features: Vec<String>,
}

impl FeatureVector {
    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Lowercases, whitespace-tokenizes, and emits all n-grams for
/// n = 1..=max_ngram with set semantics. Boundary markers `<s>`/`</s>`
/// participate in n-grams of order 2 and up but are not unigrams.
pub fn extract_features(utterance: &str, max_ngram: usize) -> FeatureVector {
    assert!(max_ngram >= 1, "max_ngram must be >= 1");
    let tokens: Vec<String> = utterance.to_lowercase().split_whitespace().map(str::to_owned).collect();

    let mut seen = HashSet::new();
    let mut features = Vec::new();
    let mut emit = |f: String| {
        if seen.insert(f.clone()) {
            features.push(f);
        }
    };

    for t in &tokens {
        emit(t.clone());
    }
    if max_ngram >= 2 {
        let mut padded: Vec<&str> = Vec::with_capacity(tokens.len() + 2);
        padded.push("<s>");
        padded.extend(tokens.iter().map(String::as_str));
        padded.push("</s>");
        for n in 2..=max_ngram {
            if padded.len() < n {
                break;
            }
            for window in padded.windows(n) {
                emit(window.join(" "));
            }
        }
    }
    FeatureVector { features }
}

/// Anything that can score a feature vector against an ordered class list.
pub trait Classifier {
    fn classes(&self) -> &[String];

    /// Per-class linear scores: bias plus the sum of active feature
    /// weights, with missing parameters contributing 0.
    fn scores(&self, fv: &FeatureVector) -> Vec<f64>;

    /// Argmax class index; ties go to the earlier class.
    fn predict(&self, fv: &FeatureVector) -> usize {
        let scores = self.scores(fv);
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = i;
            }
        }
        best
    }
}

/// Softmax probabilities of a score vector.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.iter().map(|e| e / z).collect()
}

fn score_against<F: Fn(&[u8]) -> f64>(
    classes: &[String],
    biases: &[f64],
    weight_of: F,
    fv: &FeatureVector,
) -> Vec<f64> {
    let mut scores = biases.to_vec();
    let mut key = Vec::new();
    for (c, class) in classes.iter().enumerate() {
        for f in fv.features() {
            key.clear();
            key.extend_from_slice(class.as_bytes());
            key.push(KEY_SEPARATOR);
            key.extend_from_slice(f.as_bytes());
            scores[c] += weight_of(&key);
        }
    }
    scores
}

/// Full-precision sparse linear model: the uncompressed baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    classes: Vec<String>,
    weights: BTreeMap<Vec<u8>, f64>,
    biases: Vec<f64>,
}

impl SourceModel {
    /// An empty model over an ordered class list.
    pub fn new(classes: Vec<String>) -> Result<SourceModel> {
        if classes.is_empty() {
            return Err(Error::invalid("model needs at least one class"));
        }
        let mut seen = HashSet::new();
        for c in &classes {
            validate_component("class label", c)?;
            if !seen.insert(c.as_str()) {
                return Err(Error::invalid(format!("duplicate class label {c:?}")));
            }
        }
        let biases = vec![0.0; classes.len()];
        Ok(SourceModel { classes, weights: BTreeMap::new(), biases })
    }

    /// Builds a model from (class, feature) -> weight pairs. Zero weights
    /// are dropped; duplicate pairs are rejected.
    pub fn from_parts<I>(classes: Vec<String>, biases: Vec<f64>, entries: I) -> Result<SourceModel>
    where
        I: IntoIterator<Item = (String, String, f64)>,
    {
        let mut model = SourceModel::new(classes)?;
        if biases.len() != model.classes.len() {
            return Err(Error::invalid("bias count must match class count"));
        }
        model.biases = biases;
        let mut seen = HashSet::new();
        for (class, feature, w) in entries {
            if !seen.insert(composite_key(&class, &feature)) {
                return Err(Error::duplicate_key(&composite_key(&class, &feature)));
            }
            model.set_weight(&class, &feature, w)?;
        }
        Ok(model)
    }

    /// Sets (or with weight 0, removes) one parameter.
    pub fn set_weight(&mut self, class: &str, feature: &str, w: f64) -> Result<()> {
        if !self.classes.iter().any(|c| c == class) {
            return Err(Error::invalid(format!("unknown class {class:?}")));
        }
        validate_component("feature", feature)?;
        if feature == BIAS_FEATURE {
            return Err(Error::invalid(format!("{BIAS_FEATURE} is reserved for bias rows")));
        }
        if !w.is_finite() {
            return Err(Error::invalid(format!("non-finite weight for {class:?}/{feature:?}")));
        }
        let key = composite_key(class, feature);
        if w == 0.0 {
            self.weights.remove(&key);
        } else {
            self.weights.insert(key, w);
        }
        Ok(())
    }

    pub fn weight(&self, class: &str, feature: &str) -> f64 {
        self.weights.get(&composite_key(class, feature)).copied().unwrap_or(0.0)
    }

    pub fn bias(&self, class: &str) -> Option<f64> {
        self.classes.iter().position(|c| c == class).map(|i| self.biases[i])
    }

    pub fn set_bias(&mut self, class: &str, b: f64) -> Result<()> {
        let i = self
            .classes
            .iter()
            .position(|c| c == class)
            .ok_or_else(|| Error::invalid(format!("unknown class {class:?}")))?;
        if !b.is_finite() {
            return Err(Error::invalid(format!("non-finite bias for {class:?}")));
        }
        self.biases[i] = b;
        Ok(())
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Number of stored (non-zero) feature weights.
    pub fn n_params(&self) -> usize {
        self.weights.len()
    }

    /// The composite-key weight map, for compression and benchmarks.
    pub fn weight_entries(&self) -> &BTreeMap<Vec<u8>, f64> {
        &self.weights
    }

    /// Parses the model TSV format: `class<TAB>feature<TAB>weight` rows,
    /// bias rows marked by the `__BIAS__` feature, `#` comments skipped.
    pub fn from_tsv<R: BufRead>(reader: R) -> Result<SourceModel> {
        let mut classes: Vec<String> = Vec::new();
        let mut rows: Vec<(usize, String, String, f64)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split('\t');
            let (class, feature, weight) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(c), Some(f), Some(w), None) => (c, f, w),
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected 3 tab-separated fields: class, feature, weight".into(),
                    })
                }
            };
            let w: f64 = weight.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad weight {weight:?}"),
            })?;
            if !w.is_finite() {
                return Err(Error::Parse { line: lineno, msg: format!("non-finite weight {weight:?}") });
            }
            if !classes.iter().any(|c| c == class) {
                validate_component("class label", class)
                    .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
                classes.push(class.to_owned());
            }
            rows.push((lineno, class.to_owned(), feature.to_owned(), w));
        }
        if classes.is_empty() {
            return Err(Error::empty("model TSV has no rows"));
        }

        let mut model = SourceModel::new(classes)?;
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut seen_bias: HashSet<String> = HashSet::new();
        for (lineno, class, feature, w) in rows {
            let to_parse_err = |e: Error| match e {
                Error::InvalidArgument(msg) => Error::Parse { line: lineno, msg },
                other => other,
            };
            if feature == BIAS_FEATURE {
                if !seen_bias.insert(class.clone()) {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("duplicate bias row for class {class:?}"),
                    });
                }
                model.set_bias(&class, w).map_err(to_parse_err)?;
            } else {
                if !seen.insert(composite_key(&class, &feature)) {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("duplicate entry for class {class:?} feature {feature:?}"),
                    });
                }
                model.set_weight(&class, &feature, w).map_err(to_parse_err)?;
            }
        }
        Ok(model)
    }

    pub fn from_tsv_file(path: &std::path::Path) -> Result<SourceModel> {
        let f = std::fs::File::open(path)?;
        Self::from_tsv(std::io::BufReader::new(f))
    }

    /// Writes the model TSV: per class, the bias row then features in
    /// lexicographic order.
    pub fn to_tsv<W: Write>(&self, out: &mut W) -> Result<()> {
        let mut by_class: BTreeMap<&str, Vec<(&str, f64)>> = BTreeMap::new();
        for (key, &w) in &self.weights {
            let sep = key.iter().position(|&b| b == KEY_SEPARATOR).expect("composite key");
            let class = std::str::from_utf8(&key[..sep]).expect("validated utf-8");
            let feature = std::str::from_utf8(&key[sep + 1..]).expect("validated utf-8");
            by_class.entry(class).or_default().push((feature, w));
        }
        for (i, class) in self.classes.iter().enumerate() {
            writeln!(out, "{class}\t{BIAS_FEATURE}\t{}", self.biases[i])?;
            if let Some(feats) = by_class.get(class.as_str()) {
                for (feature, w) in feats {
                    writeln!(out, "{class}\t{feature}\t{w}")?;
                }
            }
        }
        Ok(())
    }

    pub fn to_tsv_file(&self, path: &std::path::Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.to_tsv(&mut f)?;
        f.flush()?;
        Ok(())
    }

    /// Mean composite-key length in bytes: the `s` of the n*(s + w)
    /// uncompressed baseline.
    pub fn mean_key_bytes(&self) -> f64 {
        if self.weights.is_empty() {
            return 0.0;
        }
        let total: usize = self.weights.keys().map(Vec::len).sum();
        total as f64 / self.weights.len() as f64
    }
}

impl Classifier for SourceModel {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn scores(&self, fv: &FeatureVector) -> Vec<f64> {
        score_against(
            &self.classes,
            &self.biases,
            |key| self.weights.get(key).copied().unwrap_or(0.0),
            fv,
        )
    }
}

/// The same classifier backed by a compressed weight map. Biases stay in
/// full precision outside the map.
#[derive(Debug, Clone)]
pub struct CompressedModel {
    classes: Vec<String>,
    biases: Vec<f64>,
    map: CompressedWeightMap,
}

impl CompressedModel {
    /// Compresses a source model's weight map with the given quantizer
    /// size and false-positive budget.
    pub fn compress(src: &SourceModel, k: u32, epsilon: f64) -> Result<CompressedModel> {
        let entries: Vec<(&Vec<u8>, f64)> =
            src.weights.iter().map(|(key, &w)| (key, w)).collect();
        let map = CompressedWeightMap::build(&entries, k, epsilon)?;
        Ok(CompressedModel { classes: src.classes.clone(), biases: src.biases.clone(), map })
    }

    /// Pairs an already-built container with the class list and biases it
    /// was compressed from.
    pub fn from_parts(classes: Vec<String>, biases: Vec<f64>, map: CompressedWeightMap) -> Result<CompressedModel> {
        if classes.is_empty() || classes.len() != biases.len() {
            return Err(Error::invalid("class and bias lists must be non-empty and equal length"));
        }
        Ok(CompressedModel { classes, biases, map })
    }

    pub fn map(&self) -> &CompressedWeightMap {
        &self.map
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }
}

impl Classifier for CompressedModel {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn scores(&self, fv: &FeatureVector) -> Vec<f64> {
        score_against(&self.classes, &self.biases, |key| self.map.lookup(key).weight, fv)
    }
}

/// Prediction agreement between two classifiers over a labeled test set.
#[derive(Debug, Clone, Copy)]
pub struct AgreementReport {
    pub n_utterances: usize,
    pub agreement_rate: f64,
    pub src_accuracy: f64,
    pub comp_accuracy: f64,
    /// (comp error - src error) / src error; 0 when both are error-free,
    /// infinite when only the compressed model errs.
    pub relative_error_increase: f64,
}

impl AgreementReport {
    pub fn render_text(&self) -> String {
        format!(
            "utterances           {}\nagreement rate       {:.4}\nsource accuracy      {:.4}\ncompressed accuracy  {:.4}\nrel. error increase  {:.4}\n",
            self.n_utterances,
            self.agreement_rate,
            self.src_accuracy,
            self.comp_accuracy,
            self.relative_error_increase
        )
    }

    pub fn render_kv(&self) -> String {
        format!(
            "n_utterances={}\nagreement_rate={:.6}\nsrc_accuracy={:.6}\ncomp_accuracy={:.6}\nrelative_error_increase={:.6}\n",
            self.n_utterances,
            self.agreement_rate,
            self.src_accuracy,
            self.comp_accuracy,
            self.relative_error_increase
        )
    }
}

/// Compares two classifiers sharing a class list on a labeled test set:
/// prediction agreement, each model's accuracy, and the relative error
/// increase of `comp` over `src`.
pub fn evaluate_agreement<A: Classifier, B: Classifier>(
    src: &A,
    comp: &B,
    testset: &[(String, String)],
    max_ngram: usize,
) -> Result<AgreementReport> {
    if src.classes() != comp.classes() {
        return Err(Error::ClassMismatch);
    }
    if testset.is_empty() {
        return Err(Error::empty("test set has no utterances"));
    }
    let classes = src.classes();
    let mut agree = 0usize;
    let mut src_ok = 0usize;
    let mut comp_ok = 0usize;
    for (label, utterance) in testset {
        let fv = extract_features(utterance, max_ngram);
        let ps = src.predict(&fv);
        let pc = comp.predict(&fv);
        if ps == pc {
            agree += 1;
        }
        let gold = classes.iter().position(|c| c == label);
        if gold == Some(ps) {
            src_ok += 1;
        }
        if gold == Some(pc) {
            comp_ok += 1;
        }
    }
    let n = testset.len() as f64;
    let src_err = 1.0 - src_ok as f64 / n;
    let comp_err = 1.0 - comp_ok as f64 / n;
    let relative_error_increase = if src_err == 0.0 {
        if comp_err == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (comp_err - src_err) / src_err
    };
    Ok(AgreementReport {
        n_utterances: testset.len(),
        agreement_rate: agree as f64 / n,
        src_accuracy: src_ok as f64 / n,
        comp_accuracy: comp_ok as f64 / n,
        relative_error_increase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(features: &[&str]) -> FeatureVector {
        FeatureVector { features: features.iter().map(|s| s.to_string()).collect() }
    }

    #[test]
    fn extract_bigrams_with_boundaries() {
        let got = extract_features("Play Music", 2);
        let want = ["play", "music", "<s> play", "play music", "music </s>"];
        assert_eq!(got.features(), &want);
    }

    #[test]
    fn extract_empty_utterance() {
        assert!(extract_features("", 1).is_empty());
        assert_eq!(extract_features("", 2).features(), &["<s> </s>"]);
    }

    #[test]
    fn extract_set_semantics() {
        assert_eq!(extract_features("a b a", 1).features(), &["a", "b"]);
    }

    #[test]
    fn extract_trigrams() {
        let got = extract_features("a", 3);
        assert_eq!(got.features(), &["a", "<s> a", "a </s>", "<s> a </s>"]);
    }

    #[test]
    fn scoring_hand_example() {
        let model = SourceModel::from_parts(
            vec!["A".into(), "B".into()],
            vec![0.0, 0.0],
            vec![
                ("A".to_string(), "x".to_string(), 2.0),
                ("B".to_string(), "x".to_string(), 1.0),
            ],
        )
        .unwrap();
        let scores = model.scores(&fv(&["x"]));
        assert_eq!(scores, vec![2.0, 1.0]);
        assert_eq!(model.predict(&fv(&["x"])), 0);
        assert!((scores[0] - scores[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_class_always_predicted() {
        let model = SourceModel::new(vec!["only".into()]).unwrap();
        assert_eq!(model.predict(&fv(&["whatever"])), 0);
    }

    #[test]
    fn ties_break_toward_earlier_class() {
        let model = SourceModel::new(vec!["A".into(), "B".into()]).unwrap();
        assert_eq!(model.predict(&fv(&["x"])), 0);
    }

    #[test]
    fn separator_rejected_at_ingest() {
        assert!(SourceModel::new(vec!["bad\u{1f}class".into()]).is_err());
        let mut m = SourceModel::new(vec!["A".into()]).unwrap();
        assert!(m.set_weight("A", "bad\u{1f}feat", 1.0).is_err());
        assert!(m.set_weight("A", BIAS_FEATURE, 1.0).is_err());
    }

    #[test]
    fn zero_weights_not_stored() {
        let mut m = SourceModel::new(vec!["A".into()]).unwrap();
        m.set_weight("A", "x", 0.0).unwrap();
        assert_eq!(m.n_params(), 0);
        m.set_weight("A", "x", 1.5).unwrap();
        assert_eq!(m.n_params(), 1);
    }

    #[test]
    fn tsv_roundtrip() {
        let model = SourceModel::from_parts(
            vec!["music".into(), "shopping".into()],
            vec![0.25, -0.5],
            vec![
                ("music".to_string(), "play".to_string(), 1.5),
                ("music".to_string(), "<s> play".to_string(), 0.75),
                ("shopping".to_string(), "buy".to_string(), 2.0),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        model.to_tsv(&mut buf).unwrap();
        let parsed = SourceModel::from_tsv(buf.as_slice()).unwrap();
        assert_eq!(parsed, model);
    }

    #[test]
    fn tsv_parse_errors_name_lines() {
        let bad = "music\tplay\t1.0\nmusic\tonly-two-fields\nmusic\tbuy\t2.0\n";
        match SourceModel::from_tsv(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad_weight = "music\tplay\tnot-a-number\n";
        assert!(matches!(
            SourceModel::from_tsv(bad_weight.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        let dup = "music\tplay\t1.0\nmusic\tplay\t2.0\n";
        assert!(matches!(
            SourceModel::from_tsv(dup.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn tsv_comments_and_blanks_skipped() {
        let text = "# a comment\n\nmusic\t__BIAS__\t0.5\nmusic\tplay\t1.0\n";
        let m = SourceModel::from_tsv(text.as_bytes()).unwrap();
        assert_eq!(m.bias("music"), Some(0.5));
        assert_eq!(m.weight("music", "play"), 1.0);
    }

    #[test]
    fn compressed_model_tracks_source_within_quantization_error() {
        let mut entries = Vec::new();
        for i in 0..500 {
            let class = if i % 2 == 0 { "A" } else { "B" };
            entries.push((class.to_string(), format!("f{i}"), (i as f64 / 250.0) - 1.0));
        }
        // Weight 0.0 at i = 250 is dropped by from_parts before compression.
        let src = SourceModel::from_parts(vec!["A".into(), "B".into()], vec![0.1, -0.1], entries).unwrap();
        let comp = CompressedModel::compress(&src, 256, 1e-4).unwrap();
        let half = comp.map().quantizer().step() / 2.0;
        for (key, &w) in src.weight_entries() {
            let r = comp.map().lookup(key);
            assert!(r.is_present());
            assert!((r.weight - w).abs() <= half);
        }
    }

    #[test]
    fn compressed_scores_within_composed_quantization_bound() {
        // Bound per class: (active features) * step / 2, when no false
        // positive fires (epsilon 1e-6 makes that overwhelmingly likely).
        let mut entries = Vec::new();
        for i in 0..200 {
            entries.push(("A".to_string(), format!("w{i}"), (i as f64).sin()));
            entries.push(("B".to_string(), format!("w{i}"), (i as f64).cos()));
        }
        let src = SourceModel::from_parts(vec!["A".into(), "B".into()], vec![0.0, 0.0], entries).unwrap();
        let comp = CompressedModel::compress(&src, 64, 1e-6).unwrap();
        let step = comp.map().quantizer().step();
        let fv = extract_features("w3 w17 w42 w160 unseen-token", 1);
        let bound = fv.len() as f64 * step / 2.0;
        let s = src.scores(&fv);
        let c = comp.scores(&fv);
        for i in 0..s.len() {
            assert!((s[i] - c[i]).abs() <= bound, "class {i}: {} vs {}", s[i], c[i]);
        }
    }

    #[test]
    fn agreement_of_model_with_itself_is_total() {
        let src = SourceModel::from_parts(
            vec!["A".into(), "B".into()],
            vec![0.0, 0.0],
            vec![
                ("A".to_string(), "left".to_string(), 1.0),
                ("B".to_string(), "right".to_string(), 1.0),
            ],
        )
        .unwrap();
        let testset = vec![
            ("A".to_string(), "left left".to_string()),
            ("B".to_string(), "right".to_string()),
            ("A".to_string(), "right left".to_string()),
        ];
        let report = evaluate_agreement(&src, &src, &testset, 2).unwrap();
        assert_eq!(report.agreement_rate, 1.0);
        assert_eq!(report.src_accuracy, report.comp_accuracy);
        assert_eq!(report.relative_error_increase, 0.0);
    }

    #[test]
    fn agreement_rejects_class_mismatch() {
        let a = SourceModel::new(vec!["A".into()]).unwrap();
        let b = SourceModel::new(vec!["B".into()]).unwrap();
        let testset = vec![("A".to_string(), "x".to_string())];
        assert!(matches!(evaluate_agreement(&a, &b, &testset, 1), Err(Error::ClassMismatch)));
    }

    #[test]
    fn softmax_normalizes() {
        let p = softmax(&[1.0, 2.0, 3.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[2] > p[1] && p[1] > p[0]);
    }
}
