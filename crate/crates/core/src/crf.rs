//! Linear-chain CRF tagger trained by maximizing the L2-regularized
//! conditional log-likelihood with full-batch gradient ascent.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::chain::{ChainScores, TagVec};
use crate::corpus::{decode_utf8, Corpus, LangTag, Sentence, NUM_TAGS};
use crate::error::{Error, ParseError, Result};
use crate::hmm::{parse_f64, parse_usize, Lines};
use crate::normalize::collapse;

/// Start-of-sentence row in the transition block.
const BOS: usize = NUM_TAGS;
const TRANSITION_ROWS: usize = NUM_TAGS + 1;

/// Observation attributes of every position in a sentence. Each attribute
/// is later paired with every tag to form a feature.
pub fn extract_attributes(sentence: &Sentence) -> Vec<Vec<String>> {
    let surfaces: Vec<&str> = sentence.surfaces().collect();
    let bases: Vec<String> = surfaces.iter().map(|s| collapse(s)).collect();
    (0..surfaces.len())
        .map(|t| {
            let surface = surfaces[t];
            let lower = surface.to_lowercase();
            let folded: Vec<char> = collapse(&lower).chars().collect();
            let mut attrs = vec![format!("b={}", bases[t]), format!("w={lower}")];
            for n in 1..=3 {
                if folded.len() >= n {
                    attrs.push(format!("p{n}={}", folded[..n].iter().collect::<String>()));
                    attrs.push(format!(
                        "s{n}={}",
                        folded[folded.len() - n..].iter().collect::<String>()
                    ));
                }
            }
            if surface.chars().any(|c| c.is_ascii_digit() || c.is_numeric()) {
                attrs.push("digit".into());
            }
            if !surface.chars().any(char::is_alphanumeric) {
                attrs.push("punct".into());
            }
            attrs.push(match t {
                0 => "prev=<s>".to_string(),
                _ => format!("prev={}", bases[t - 1]),
            });
            attrs.push(match bases.get(t + 1) {
                Some(b) => format!("next={b}"),
                None => "next=</s>".to_string(),
            });
            attrs
        })
        .collect()
}

/// Attribute vocabulary fixed at training time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureSet {
    attributes: Vec<String>,
    index: HashMap<String, usize>,
}

impl FeatureSet {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut set = FeatureSet::default();
        for s in corpus.sentences() {
            for attrs in extract_attributes(s) {
                for a in attrs {
                    set.insert(a);
                }
            }
        }
        set
    }

    fn insert(&mut self, attr: String) -> usize {
        if let Some(&i) = self.index.get(&attr) {
            return i;
        }
        let i = self.attributes.len();
        self.index.insert(attr.clone(), i);
        self.attributes.push(attr);
        i
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn get(&self, attr: &str) -> Option<usize> {
        self.index.get(attr).copied()
    }

    /// Number of weights: one per (attribute, tag) plus the transition block.
    pub fn weight_count(&self) -> usize {
        self.len() * NUM_TAGS + TRANSITION_ROWS * NUM_TAGS
    }

    /// Attribute ids per position; attributes unseen in training are dropped.
    pub fn encode(&self, sentence: &Sentence) -> Vec<Vec<usize>> {
        extract_attributes(sentence)
            .into_iter()
            .map(|attrs| attrs.iter().filter_map(|a| self.get(a)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrfConfig {
    pub l2: f64,
    pub epochs: usize,
    pub step: f64,
}

impl Default for CrfConfig {
    fn default() -> Self {
        CrfConfig {
            l2: 0.01,
            epochs: 50,
            step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    pub features: FeatureSet,
    /// `[attr * 3 + tag]` observation weights, then the `(BOS | tag) x tag`
    /// transition block.
    pub weights: Vec<f64>,
    pub l2: f64,
}

/// A sentence reduced to attribute ids, with gold tag indices when known.
#[derive(Debug, Clone)]
struct Encoded {
    attrs: Vec<Vec<usize>>,
    gold: Vec<usize>,
}

impl CrfModel {
    pub fn zeros(features: FeatureSet, l2: f64) -> Self {
        let weights = vec![0.0; features.weight_count()];
        CrfModel {
            features,
            weights,
            l2,
        }
    }

    fn transition_offset(&self) -> usize {
        self.features.len() * NUM_TAGS
    }

    pub fn transition_weight(&self, prev: Option<LangTag>, next: LangTag) -> f64 {
        let row = prev.map_or(BOS, LangTag::index);
        self.weights[self.transition_offset() + row * NUM_TAGS + next.index()]
    }

    fn chain_of(&self, attrs: &[Vec<usize>]) -> ChainScores {
        let off = self.transition_offset();
        let w = &self.weights;
        ChainScores {
            start: std::array::from_fn(|j| w[off + BOS * NUM_TAGS + j]),
            transition: std::array::from_fn(|i| std::array::from_fn(|j| w[off + i * NUM_TAGS + j])),
            emission: attrs
                .iter()
                .map(|ids| {
                    let mut row: TagVec = [0.0; NUM_TAGS];
                    for &a in ids {
                        for (j, r) in row.iter_mut().enumerate() {
                            *r += w[a * NUM_TAGS + j];
                        }
                    }
                    row
                })
                .collect(),
        }
    }

    pub fn chain(&self, sentence: &Sentence) -> ChainScores {
        self.chain_of(&self.features.encode(sentence))
    }

    pub fn log_partition(&self, sentence: &Sentence) -> f64 {
        self.chain(sentence).log_partition()
    }

    pub fn decode(&self, sentence: &Sentence) -> Vec<LangTag> {
        self.chain(sentence).viterbi().0
    }

    /// `log p(tags | sentence)`
    pub fn log_probability(&self, sentence: &Sentence, tags: &[LangTag]) -> f64 {
        let chain = self.chain(sentence);
        chain.path_score(tags) - chain.log_partition()
    }

    fn encode_corpus(&self, corpus: &Corpus) -> Result<Vec<Encoded>> {
        if !corpus.is_annotated() {
            return Err(Error::NotAnnotated);
        }
        Ok(corpus
            .sentences()
            .iter()
            .map(|s| Encoded {
                attrs: self.features.encode(s),
                gold: s.tags().unwrap_or_default().iter().map(|t| t.index()).collect(),
            })
            .collect())
    }

    fn objective_on(&self, data: &[Encoded]) -> f64 {
        let ll: f64 = data
            .iter()
            .map(|e| {
                let chain = self.chain_of(&e.attrs);
                let tags: Vec<LangTag> = e.gold.iter().map(|&g| LangTag::from_index(g)).collect();
                chain.path_score(&tags) - chain.log_partition()
            })
            .sum();
        ll - 0.5 * self.l2 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    fn gradient_on(&self, data: &[Encoded]) -> Vec<f64> {
        let off = self.transition_offset();
        let mut grad: Vec<f64> = self.weights.iter().map(|w| -self.l2 * w).collect();
        for e in data {
            let m = self.chain_of(&e.attrs).marginals();
            for (t, ids) in e.attrs.iter().enumerate() {
                for &a in ids {
                    grad[a * NUM_TAGS + e.gold[t]] += 1.0;
                    for j in 0..NUM_TAGS {
                        grad[a * NUM_TAGS + j] -= m.unary[t][j];
                    }
                }
            }
            grad[off + BOS * NUM_TAGS + e.gold[0]] += 1.0;
            for j in 0..NUM_TAGS {
                grad[off + BOS * NUM_TAGS + j] -= m.unary[0][j];
            }
            for (t, pw) in m.pairwise.iter().enumerate() {
                grad[off + e.gold[t] * NUM_TAGS + e.gold[t + 1]] += 1.0;
                for i in 0..NUM_TAGS {
                    for j in 0..NUM_TAGS {
                        grad[off + i * NUM_TAGS + j] -= pw[i][j];
                    }
                }
            }
        }
        grad
    }

    /// Regularized conditional log-likelihood of an annotated corpus.
    pub fn objective(&self, corpus: &Corpus) -> Result<f64> {
        Ok(self.objective_on(&self.encode_corpus(corpus)?))
    }

    /// Gradient of [`CrfModel::objective`]: empirical minus expected
    /// feature counts, minus the L2 term.
    pub fn gradient(&self, corpus: &Corpus) -> Result<Vec<f64>> {
        Ok(self.gradient_on(&self.encode_corpus(corpus)?))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("CMCRF 1\n");
        writeln!(out, "l2 {}", self.l2).unwrap();
        writeln!(out, "attributes {}", self.features.len()).unwrap();
        for (i, attr) in self.features.attributes().iter().enumerate() {
            let w = &self.weights[i * NUM_TAGS..(i + 1) * NUM_TAGS];
            writeln!(out, "{attr}\t{}\t{}\t{}", w[0], w[1], w[2]).unwrap();
        }
        out.push_str("transitions\n");
        let off = self.transition_offset();
        for (row, name) in ["en", "ru", "rs", "bos"].iter().enumerate() {
            let w = &self.weights[off + row * NUM_TAGS..off + (row + 1) * NUM_TAGS];
            writeln!(out, "{name}\t{}\t{}\t{}", w[0], w[1], w[2]).unwrap();
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        parse_crf_bytes(&bytes).map_err(|e| Error::parse_file(path, e))
    }
}

pub fn crf_log_partition(model: &CrfModel, sentence: &Sentence) -> f64 {
    model.log_partition(sentence)
}

pub fn crf_decode(model: &CrfModel, sentence: &Sentence) -> Vec<LangTag> {
    model.decode(sentence)
}

/// Trained model together with the objective after each epoch (index 0 is
/// the starting point).
#[derive(Debug, Clone)]
pub struct CrfFit {
    pub model: CrfModel,
    pub objective: Vec<f64>,
}

/// Full-batch gradient ascent from zero weights. The step is applied to
/// the gradient divided by the sentence count; when a step would lower
/// the objective it is halved until it does not, so the objective never
/// decreases between epochs.
/// Step multiplier after an accepted update.
const GROWTH: f64 = 2.0;

pub fn fit_crf(train: &Corpus, features: FeatureSet, cfg: &CrfConfig) -> Result<CrfFit> {
    if !(cfg.l2 >= 0.0 && cfg.l2.is_finite()) {
        return Err(Error::InvalidArgument(format!("l2 must be non-negative, got {}", cfg.l2)));
    }
    if !(cfg.step > 0.0 && cfg.step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {}", cfg.step)));
    }
    if train.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut model = CrfModel::zeros(features, cfg.l2);
    let data = model.encode_corpus(train)?;
    let scale = 1.0 / data.len() as f64;

    let mut current = model.objective_on(&data);
    let mut history = vec![current];
    let mut step = cfg.step;
    for _ in 0..cfg.epochs {
        let grad = model.gradient_on(&data);
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = model.clone();
            for (w, g) in trial.weights.iter_mut().zip(&grad) {
                *w += step * scale * g;
            }
            let value = trial.objective_on(&data);
            if value >= current {
                model = trial;
                current = value;
                accepted = true;
                step *= GROWTH;
                break;
            }
            step *= 0.5;
        }
        history.push(current);
        if !accepted {
            break;
        }
    }
    Ok(CrfFit {
        model,
        objective: history,
    })
}

pub fn train_crf(train: &Corpus, features: FeatureSet, cfg: &CrfConfig) -> Result<CrfModel> {
    fit_crf(train, features, cfg).map(|fit| fit.model)
}

pub fn parse_crf(text: &str) -> Result<CrfModel, ParseError> {
    let mut lines = Lines::new(text);
    if lines.next_line("header")?.trim_end() != "CMCRF 1" {
        return Err(lines.err("expected header `CMCRF 1`"));
    }
    let l2 = match lines.keyed("l2")?.as_slice() {
        [v] => parse_f64(&lines, v)?,
        _ => return Err(lines.err("expected `l2 <value>`")),
    };
    if l2 < 0.0 {
        return Err(lines.err("l2 must be non-negative"));
    }
    let n = match lines.keyed("attributes")?.as_slice() {
        [v] => parse_usize(&lines, v)?,
        _ => return Err(lines.err("expected `attributes <count>`")),
    };
    let mut features = FeatureSet::default();
    let mut weights = Vec::new();
    let row = |lines: &Lines<'_>, line: &str| -> Result<(String, [f64; NUM_TAGS]), ParseError> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 1 + NUM_TAGS || fields[0].is_empty() {
            return Err(lines.err("expected `name<TAB>w_en<TAB>w_ru<TAB>w_rs`"));
        }
        Ok((
            fields[0].to_string(),
            [
                parse_f64(lines, fields[1])?,
                parse_f64(lines, fields[2])?,
                parse_f64(lines, fields[3])?,
            ],
        ))
    };
    for _ in 0..n {
        let line = lines.next_line("attribute weights")?;
        let (attr, w) = row(&lines, line)?;
        if features.get(&attr).is_some() {
            return Err(lines.err(format!("duplicate attribute {attr:?}")));
        }
        features.insert(attr);
        weights.extend_from_slice(&w);
    }
    if lines.next_line("transitions")?.trim_end() != "transitions" {
        return Err(lines.err("expected `transitions`"));
    }
    for name in ["en", "ru", "rs", "bos"] {
        let line = lines.next_line("transition row")?;
        let (prev, w) = row(&lines, line)?;
        if prev != name {
            return Err(lines.err(format!("expected transition row `{name}`")));
        }
        weights.extend_from_slice(&w);
    }
    lines.finish()?;
    Ok(CrfModel {
        features,
        weights,
        l2,
    })
}

pub fn parse_crf_bytes(bytes: &[u8]) -> Result<CrfModel, ParseError> {
    parse_crf(decode_utf8(bytes)?)
}
