//! Skipgram embeddings with character n-gram subwords.
//!
//! The hidden vector of a word is its input row plus the mean of its
//! n-gram rows; there is no activation. Scores over the vocabulary come
//! from the output matrix and are normalized with a softmax, or trained
//! with negative sampling when `negative_samples > 0`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::corpus::{decode_utf8, Corpus};
use crate::error::{Error, ParseError, Result};
use crate::hmm::{parse_f64, parse_usize, Lines};
use crate::linalg::{axpy, dot, log_sum_exp, sigmoid, softmax, Matrix};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbedConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_ngram: usize,
    pub max_ngram: usize,
    /// 0 selects the full softmax.
    pub negative_samples: usize,
    /// Set from the global seed, never from a config table.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            dim: 50,
            window: 2,
            epochs: 50,
            learning_rate: 0.1,
            min_ngram: 3,
            max_ngram: 6,
            negative_samples: 5,
            seed: 0,
        }
    }
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.dim == 0 {
            return bad("embedding dim must be at least 1".into());
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if self.min_ngram == 0 || self.min_ngram > self.max_ngram {
            return bad(format!(
                "n-gram bounds must satisfy 1 <= min <= max, got {}..{}",
                self.min_ngram, self.max_ngram
            ));
        }
        Ok(())
    }
}

/// Vocabulary key of a surface form: lowercased, every digit mapped to `0`.
pub fn embed_key(surface: &str) -> String {
    surface
        .to_lowercase()
        .chars()
        .map(|c| if c.is_numeric() { '0' } else { c })
        .collect()
}

/// Distinct character n-grams of `<word>` with lengths in `min..=max`, in
/// order of first occurrence.
pub fn char_ngrams(word: &str, min: usize, max: usize) -> Vec<String> {
    let chars: Vec<char> = format!("<{word}>").chars().collect();
    let mut out: Vec<String> = Vec::new();
    for n in min..=max.min(chars.len()) {
        for start in 0..=chars.len() - n {
            let g: String = chars[start..start + n].iter().collect();
            if !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookupKind {
    InVocab,
    /// Out of vocabulary, built from known n-grams.
    Subword,
    /// Nothing known; the vector is zero.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    words: Vec<String>,
    word_index: HashMap<String, usize>,
    ngrams: Vec<String>,
    ngram_index: HashMap<String, usize>,
    /// Known n-gram ids of every vocabulary word.
    word_ngrams: Vec<Vec<usize>>,
    pub min_ngram: usize,
    pub max_ngram: usize,
    /// `|V| x N`
    pub input: Matrix,
    /// `|G| x N`
    pub ngram_input: Matrix,
    /// `|V| x N`, one row per predicted context word.
    pub output: Matrix,
}

/// Parameter gradient of a single (center, context) loss term.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub input: Vec<f64>,
    /// One gradient row per n-gram of the center word.
    pub ngrams: Vec<(usize, Vec<f64>)>,
    pub output: Matrix,
}

impl EmbeddingTable {
    fn build(words: Vec<String>, ngrams: Vec<String>, min_ngram: usize, max_ngram: usize, dim: usize) -> Self {
        let word_index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let ngram_index: HashMap<String, usize> =
            ngrams.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let word_ngrams = words
            .iter()
            .map(|w| {
                char_ngrams(w, min_ngram, max_ngram)
                    .iter()
                    .filter_map(|g| ngram_index.get(g).copied())
                    .collect()
            })
            .collect();
        EmbeddingTable {
            input: Matrix::zeros(words.len(), dim),
            ngram_input: Matrix::zeros(ngrams.len(), dim),
            output: Matrix::zeros(words.len(), dim),
            words,
            word_index,
            ngrams,
            ngram_index,
            word_ngrams,
            min_ngram,
            max_ngram,
        }
    }

    /// Vocabulary in first-occurrence order with all n-grams of its words.
    fn from_corpus(corpus: &Corpus, cfg: &EmbedConfig) -> Self {
        let mut words = Vec::new();
        let mut seen = HashMap::new();
        for s in corpus.sentences() {
            for w in s.surfaces() {
                let k = embed_key(w);
                if !seen.contains_key(&k) {
                    seen.insert(k.clone(), ());
                    words.push(k);
                }
            }
        }
        let mut ngrams = Vec::new();
        let mut seen_g = HashMap::new();
        for w in &words {
            for g in char_ngrams(w, cfg.min_ngram, cfg.max_ngram) {
                if !seen_g.contains_key(&g) {
                    seen_g.insert(g.clone(), ());
                    ngrams.push(g);
                }
            }
        }
        Self::build(words, ngrams, cfg.min_ngram, cfg.max_ngram, cfg.dim)
    }

    pub fn dim(&self) -> usize {
        self.input.cols
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn ngrams(&self) -> &[String] {
        &self.ngrams
    }

    pub fn word_id(&self, word: &str) -> Option<usize> {
        self.word_index.get(&embed_key(word)).copied()
    }

    pub fn word_ngram_ids(&self, id: usize) -> &[usize] {
        &self.word_ngrams[id]
    }

    fn add_ngram_mean(&self, ids: &[usize], out: &mut [f64]) {
        if ids.is_empty() {
            return;
        }
        let scale = 1.0 / ids.len() as f64;
        for &g in ids {
            axpy(scale, self.ngram_input.row(g), out);
        }
    }

    /// Hidden vector of a vocabulary word.
    pub fn hidden(&self, id: usize) -> Vec<f64> {
        let mut h = self.input.row(id).to_vec();
        self.add_ngram_mean(&self.word_ngrams[id], &mut h);
        h
    }

    /// Feature vector for any token. Total and pure.
    pub fn lookup(&self, token: &str) -> (Vec<f64>, LookupKind) {
        if let Some(id) = self.word_id(token) {
            return (self.hidden(id), LookupKind::InVocab);
        }
        let ids: Vec<usize> = char_ngrams(&embed_key(token), self.min_ngram, self.max_ngram)
            .iter()
            .filter_map(|g| self.ngram_index.get(g).copied())
            .collect();
        let mut v = vec![0.0; self.dim()];
        if ids.is_empty() {
            return (v, LookupKind::Unknown);
        }
        self.add_ngram_mean(&ids, &mut v);
        (v, LookupKind::Subword)
    }

    pub fn vector(&self, token: &str) -> Vec<f64> {
        self.lookup(token).0
    }

    /// Softmax distribution over context words given a center word.
    pub fn context_distribution(&self, center: usize) -> Vec<f64> {
        softmax(&self.output.mul_vec(&self.hidden(center)))
    }

    /// Full-softmax cross-entropy `-log p(context | center)`.
    pub fn pair_loss(&self, center: usize, context: usize) -> f64 {
        let u = self.output.mul_vec(&self.hidden(center));
        log_sum_exp(&u) - u[context]
    }

    /// Negative-sampling loss for one positive pair and explicit negatives.
    pub fn pair_loss_negative(&self, center: usize, context: usize, negatives: &[usize]) -> f64 {
        let h = self.hidden(center);
        let mut loss = -sigmoid(dot(self.output.row(context), &h)).ln();
        for &n in negatives {
            loss -= sigmoid(-dot(self.output.row(n), &h)).ln();
        }
        loss
    }

    fn gradient_from_output_delta(&self, center: usize, h: &[f64], delta: &[(usize, f64)]) -> PairGradient {
        let dim = self.dim();
        let mut output = Matrix::zeros(self.vocab_size(), dim);
        let mut dh = vec![0.0; dim];
        for &(v, d) in delta {
            axpy(d, h, output.row_mut(v));
            axpy(d, self.output.row(v), &mut dh);
        }
        let ids = &self.word_ngrams[center];
        let scale = 1.0 / ids.len().max(1) as f64;
        let ngrams = ids
            .iter()
            .map(|&g| (g, dh.iter().map(|x| x * scale).collect()))
            .collect();
        PairGradient {
            input: dh,
            ngrams,
            output,
        }
    }

    /// Gradient of [`EmbeddingTable::pair_loss`].
    pub fn pair_gradient(&self, center: usize, context: usize) -> PairGradient {
        let h = self.hidden(center);
        let mut p = softmax(&self.output.mul_vec(&h));
        p[context] -= 1.0;
        let delta: Vec<(usize, f64)> = p.into_iter().enumerate().collect();
        self.gradient_from_output_delta(center, &h, &delta)
    }

    /// Gradient of [`EmbeddingTable::pair_loss_negative`].
    pub fn pair_gradient_negative(&self, center: usize, context: usize, negatives: &[usize]) -> PairGradient {
        let h = self.hidden(center);
        let mut delta = vec![(context, sigmoid(dot(self.output.row(context), &h)) - 1.0)];
        for &n in negatives {
            delta.push((n, sigmoid(dot(self.output.row(n), &h))));
        }
        self.gradient_from_output_delta(center, &h, &delta)
    }

    fn apply(&mut self, center: usize, g: &PairGradient, lr: f64) {
        axpy(-lr, &g.input, self.input.row_mut(center));
        for (id, row) in &g.ngrams {
            axpy(-lr, row, self.ngram_input.row_mut(*id));
        }
        for v in 0..self.vocab_size() {
            let row = g.output.row(v);
            if row.iter().any(|&x| x != 0.0) {
                axpy(-lr, row, self.output.row_mut(v));
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.input, &self.ngram_input, &self.output]
            .iter()
            .all(|m| m.data.iter().all(|x| x.is_finite()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("CMEMB 1 {} {}\n", self.dim(), self.vocab_size());
        let row = |out: &mut String, name: &str, values: &[f64]| {
            out.push_str(name);
            for v in values {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        };
        for (i, w) in self.words.iter().enumerate() {
            row(&mut out, w, self.input.row(i));
        }
        writeln!(out, "NGRAMS {} {} {}", self.ngrams.len(), self.min_ngram, self.max_ngram).unwrap();
        for (i, g) in self.ngrams.iter().enumerate() {
            row(&mut out, g, self.ngram_input.row(i));
        }
        writeln!(out, "OUTPUT {}", self.vocab_size()).unwrap();
        for (i, w) in self.words.iter().enumerate() {
            row(&mut out, w, self.output.row(i));
        }
        out
    }

    /// Hex SHA-256 of the serialized table; neural models record it.
    pub fn digest(&self) -> String {
        hex_digest(self.to_text().as_bytes())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        parse_embeddings_bytes(&bytes).map_err(|e| Error::parse_file(path, e))
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Trained table with the mean pair loss of every epoch.
#[derive(Debug, Clone)]
pub struct SkipgramFit {
    pub table: EmbeddingTable,
    pub epoch_loss: Vec<f64>,
}

pub fn fit_skipgram(corpus: &Corpus, cfg: &EmbedConfig) -> Result<SkipgramFit> {
    cfg.validate()?;
    if corpus.token_count() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = EmbeddingTable::from_corpus(corpus, cfg);
    let bound = 0.5 / cfg.dim as f64;
    table.input = Matrix::uniform(table.vocab_size(), cfg.dim, bound, &mut rng);
    table.ngram_input = Matrix::uniform(table.ngrams.len(), cfg.dim, bound, &mut rng);

    let sentences: Vec<Vec<usize>> = corpus
        .sentences()
        .iter()
        .map(|s| s.surfaces().map(|w| table.word_index[&embed_key(w)]).collect())
        .collect();

    // unigram^0.75 table for negative sampling
    let mut noise = Vec::new();
    if cfg.negative_samples > 0 {
        let mut counts = vec![0usize; table.vocab_size()];
        for s in &sentences {
            for &w in s {
                counts[w] += 1;
            }
        }
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        let total: f64 = weights.iter().sum();
        let slots = (table.vocab_size() * 100).max(1000);
        for (w, wt) in weights.iter().enumerate() {
            let n = ((wt / total) * slots as f64).round().max(1.0) as usize;
            noise.extend(std::iter::repeat(w).take(n));
        }
    }

    let mut order: Vec<usize> = (0..sentences.len()).collect();
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut pairs = 0usize;
        for &si in &order {
            let s = &sentences[si];
            for (pos, &center) in s.iter().enumerate() {
                let lo = pos.saturating_sub(cfg.window);
                let hi = (pos + cfg.window).min(s.len() - 1);
                for (cpos, &context) in s.iter().enumerate().take(hi + 1).skip(lo) {
                    if cpos == pos {
                        continue;
                    }
                    let grad = if cfg.negative_samples == 0 {
                        total += table.pair_loss(center, context);
                        table.pair_gradient(center, context)
                    } else {
                        let negatives: Vec<usize> = (0..cfg.negative_samples)
                            .map(|_| noise[rng.gen_range(0..noise.len())])
                            .collect();
                        total += table.pair_loss_negative(center, context, &negatives);
                        table.pair_gradient_negative(center, context, &negatives)
                    };
                    table.apply(center, &grad, cfg.learning_rate);
                    pairs += 1;
                }
            }
        }
        epoch_loss.push(if pairs == 0 { 0.0 } else { total / pairs as f64 });
    }
    if !table.is_finite() {
        return Err(Error::InvalidArgument(
            "embedding training diverged; lower the learning rate".into(),
        ));
    }
    Ok(SkipgramFit { table, epoch_loss })
}

pub fn train_skipgram(corpus: &Corpus, cfg: &EmbedConfig) -> Result<EmbeddingTable> {
    fit_skipgram(corpus, cfg).map(|f| f.table)
}

pub fn lookup(table: &EmbeddingTable, token: &str) -> Vec<f64> {
    table.vector(token)
}

pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable, ParseError> {
    let mut lines = Lines::new(text);
    let header = lines.next_line("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (dim, vocab) = match fields.as_slice() {
        ["CMEMB", "1", d, v] => (parse_usize(&lines, d)?, parse_usize(&lines, v)?),
        _ => return Err(lines.err("expected header `CMEMB 1 <dim> <vocab-size>`")),
    };
    if dim == 0 {
        return Err(lines.err("dim must be at least 1"));
    }
    fn rows<'a>(
        lines: &mut Lines<'a>,
        count: usize,
        dim: usize,
        what: &str,
    ) -> Result<(Vec<String>, Vec<f64>), ParseError> {
        let mut names = Vec::with_capacity(count.min(1 << 16));
        let mut data = Vec::with_capacity(count.saturating_mul(dim).min(1 << 20));
        for _ in 0..count {
            let line = lines.next_line(what)?;
            let mut parts = line.split(' ');
            let name = parts.next().unwrap_or_default();
            if name.is_empty() {
                return Err(lines.err(format!("empty {what} name")));
            }
            let mut n = 0;
            for p in parts {
                data.push(parse_f64(lines, p)?);
                n += 1;
            }
            if n != dim {
                return Err(lines.err(format!("expected {dim} values, found {n}")));
            }
            names.push(name.to_string());
        }
        Ok((names, data))
    }
    let (words, input) = rows(&mut lines, vocab, dim, "word row")?;
    let g = lines.keyed("NGRAMS")?;
    let (count, min, max) = match g.as_slice() {
        [c, a, b] => (parse_usize(&lines, c)?, parse_usize(&lines, a)?, parse_usize(&lines, b)?),
        _ => return Err(lines.err("expected `NGRAMS <count> <min> <max>`")),
    };
    if min == 0 || min > max {
        return Err(lines.err("n-gram bounds must satisfy 1 <= min <= max"));
    }
    let (ngrams, ngram_data) = rows(&mut lines, count, dim, "n-gram row")?;
    let o = lines.keyed("OUTPUT")?;
    match o.as_slice() {
        [v] if parse_usize(&lines, v)? == vocab => {}
        _ => return Err(lines.err(format!("expected `OUTPUT {vocab}`"))),
    }
    let (out_words, output) = rows(&mut lines, vocab, dim, "output row")?;
    lines.finish()?;
    if out_words != words {
        return Err(ParseError::new(1, 1, "output rows do not match the vocabulary"));
    }
    let mut seen = HashMap::new();
    for w in &words {
        if seen.insert(w.as_str(), ()).is_some() {
            return Err(ParseError::new(1, 1, format!("duplicate word {w:?}")));
        }
    }
    let mut seen = HashMap::new();
    for g in &ngrams {
        let n = g.chars().count();
        if n < min || n > max {
            return Err(ParseError::new(1, 1, format!("n-gram {g:?} outside length bounds")));
        }
        if seen.insert(g.as_str(), ()).is_some() {
            return Err(ParseError::new(1, 1, format!("duplicate n-gram {g:?}")));
        }
    }
    let mut table = EmbeddingTable::build(words, ngrams, min, max, dim);
    table.input = Matrix::from_vec(vocab, dim, input);
    table.ngram_input = Matrix::from_vec(count, dim, ngram_data);
    table.output = Matrix::from_vec(vocab, dim, output);
    Ok(table)
}

pub fn parse_embeddings_bytes(bytes: &[u8]) -> Result<EmbeddingTable, ParseError> {
    parse_embeddings(decode_utf8(bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, CorpusFormat};

    fn plain(text: &str) -> Corpus {
        parse_corpus(text, CorpusFormat::Plain).unwrap()
    }

    fn toy() -> Corpus {
        plain(&format!("{}\n", vec!["a b"; 30].join(" ")))
    }

    #[test]
    fn ngrams_of_short_words() {
        assert_eq!(char_ngrams("a", 3, 6), ["<a>"]);
        assert_eq!(char_ngrams("kia", 3, 4), ["<ki", "kia", "ia>", "<kia", "kia>"]);
        assert!(char_ngrams("", 3, 6).is_empty());
    }

    #[test]
    fn toy_language_is_learned() {
        let cfg = EmbedConfig { dim: 4, window: 1, epochs: 30, learning_rate: 0.1, negative_samples: 0, ..Default::default() };
        let fit = fit_skipgram(&toy(), &cfg).unwrap();
        let t = &fit.table;
        let (a, b) = (t.word_id("a").unwrap(), t.word_id("b").unwrap());
        assert!(t.context_distribution(a)[b] > 0.9, "{:?}", t.context_distribution(a));
        assert!(t.context_distribution(b)[a] > 0.9);
        assert!(fit.epoch_loss.windows(2).take(3).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn distributions_are_normalized() {
        let c = plain("kia hal hai\nkiya scene hai yaar\nyou are good\n");
        let t = train_skipgram(&c, &EmbedConfig { dim: 8, epochs: 2, ..Default::default() }).unwrap();
        for id in 0..t.vocab_size() {
            let p = t.context_distribution(id);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    fn perturbed(t: &EmbeddingTable, which: u8, row: usize, col: usize, h: f64) -> EmbeddingTable {
        let mut t = t.clone();
        let m = match which {
            0 => &mut t.input,
            1 => &mut t.ngram_input,
            _ => &mut t.output,
        };
        m.data[row * m.cols + col] += h;
        t
    }

    fn check_gradient(
        t: &EmbeddingTable,
        center: usize,
        loss: impl Fn(&EmbeddingTable) -> f64,
        g: &PairGradient,
    ) {
        let h = 1e-6;
        let fd = |which, row, col| {
            (loss(&perturbed(t, which, row, col, h)) - loss(&perturbed(t, which, row, col, -h))) / (2.0 * h)
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-5 * a.abs().max(b.abs()).max(1e-4);
        for col in 0..t.dim() {
            assert!(close(fd(0, center, col), g.input[col]));
            for (id, row) in &g.ngrams {
                assert!(close(fd(1, *id, col), row[col]));
            }
            for v in 0..t.vocab_size() {
                assert!(close(fd(2, v, col), g.output.get(v, col)));
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let c = plain("kia yaar\nyaar kia hai\n");
        let mut t = train_skipgram(&c, &EmbedConfig { dim: 5, epochs: 3, learning_rate: 0.5, ..Default::default() }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        t.output = Matrix::uniform(t.vocab_size(), 5, 0.5, &mut rng);
        assert_eq!(t.vocab_size(), 3);
        for center in 0..3 {
            for context in 0..3 {
                check_gradient(&t, center, |t| t.pair_loss(center, context), &t.pair_gradient(center, context));
                let neg = [(context + 1) % 3, (context + 2) % 3];
                check_gradient(
                    &t,
                    center,
                    |t| t.pair_loss_negative(center, context, &neg),
                    &t.pair_gradient_negative(center, context, &neg),
                );
            }
        }
    }

    #[test]
    fn lookup_kinds() {
        let c = plain("kia hal hai\nkiya scene hai\n");
        let t = train_skipgram(&c, &EmbedConfig { dim: 6, epochs: 2, ..Default::default() }).unwrap();
        let (v, kind) = t.lookup("kia");
        assert_eq!(kind, LookupKind::InVocab);
        assert!(v.iter().all(|x| x.is_finite()));
        assert_eq!(t.lookup("KIA").1, LookupKind::InVocab);

        let (v, kind) = t.lookup("kiyaa");
        assert_eq!(kind, LookupKind::Subword);
        assert!(v.iter().any(|&x| x != 0.0));

        let (v, kind) = t.lookup("zzq");
        assert_eq!(kind, LookupKind::Unknown);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn training_is_deterministic() {
        let c = plain("kia hal hai\nkiya scene hai yaar\nyou are good\n");
        for neg in [0, 2] {
            let cfg = EmbedConfig { dim: 7, epochs: 3, negative_samples: neg, seed: 11, ..Default::default() };
            let a = train_skipgram(&c, &cfg).unwrap();
            let b = train_skipgram(&c, &cfg).unwrap();
            assert_eq!(a.to_text(), b.to_text());
            let other = train_skipgram(&c, &EmbedConfig { seed: 12, ..cfg }).unwrap();
            assert_ne!(a.digest(), other.digest());
        }
    }

    #[test]
    fn config_and_corpus_errors() {
        let c = plain("a b\n");
        assert!(train_skipgram(&c, &EmbedConfig { dim: 0, ..Default::default() }).is_err());
        assert!(train_skipgram(&c, &EmbedConfig { min_ngram: 4, max_ngram: 3, ..Default::default() }).is_err());
        assert!(train_skipgram(&c, &EmbedConfig { learning_rate: 0.0, ..Default::default() }).is_err());
        assert!(matches!(
            train_skipgram(&Corpus::empty(false), &EmbedConfig::default()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn file_round_trip_is_exact() {
        let c = plain("kia hal hai\nkiya scene hai yaar\n");
        let t = train_skipgram(&c, &EmbedConfig { dim: 4, epochs: 2, ..Default::default() }).unwrap();
        let text = t.to_text();
        let back = parse_embeddings(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
        assert!(parse_embeddings(&text.replacen("CMEMB 1 4", "CMEMB 1 5", 1)).is_err());
        assert!(parse_embeddings(&text.replace("OUTPUT", "OUT")).is_err());
        assert!(parse_embeddings("CMEMB 1 2 1\nx 1 NaN\nNGRAMS 0 3 6\nOUTPUT 1\nx 0 0\n").is_err());
    }
}
