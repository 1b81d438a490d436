//! Neural taggers over embedding features: a BiLSTM with a per-position
//! softmax head, and a bidirectional RNN encoder with an attentive RNN
//! decoder. Gradients are computed by hand through time.

mod cell;
mod io;

pub use cell::{CellKind, CellStep, RnnCell};
pub use io::{parse_neural, parse_neural_bytes};

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::chain::TagVec;
use crate::corpus::{Corpus, LangTag, Sentence, NUM_TAGS};
use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};
use crate::linalg::{argmax, axpy, dot, softmax, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arch {
    Bilstm,
    Attn,
}

impl Arch {
    pub fn as_str(self) -> &'static str {
        match self {
            Arch::Bilstm => "bilstm",
            Arch::Attn => "attn",
        }
    }

    pub fn default_encoder(self) -> CellKind {
        CellKind::Lstm
    }
}

impl fmt::Display for Arch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Arch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bilstm" => Ok(Arch::Bilstm),
            "attn" => Ok(Arch::Attn),
            _ => Err(format!("unknown architecture {s:?} (expected bilstm or attn)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeuralDims {
    pub input: usize,
    pub hidden: usize,
    pub tag_dim: usize,
    pub encoder: CellKind,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NeuralConfig {
    pub hidden: usize,
    pub tag_dim: usize,
    pub epochs: usize,
    pub step: f64,
    pub clip: f64,
    /// Set from the global seed, never from a config table.
    #[serde(skip)]
    pub seed: u64,
    /// Encoder cell; `None` picks LSTM.
    pub encoder: Option<CellKind>,
}

impl Default for NeuralConfig {
    fn default() -> Self {
        NeuralConfig {
            hidden: 16,
            tag_dim: 8,
            epochs: 30,
            step: 0.1,
            clip: 5.0,
            seed: 0,
            encoder: None,
        }
    }
}

impl NeuralConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.hidden == 0 || self.tag_dim == 0 {
            return bad("hidden and tag_dim must be at least 1".into());
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad(format!("step must be positive, got {}", self.step));
        }
        if !(self.clip > 0.0) {
            return bad(format!("clip must be positive, got {}", self.clip));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    pub forward: RnnCell,
    pub backward: RnnCell,
}

/// Hidden states of both directions, one row per position.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderState {
    pub forward: Matrix,
    pub backward: Matrix,
}

impl EncoderState {
    pub fn len(&self) -> usize {
        self.forward.rows
    }

    pub fn is_empty(&self) -> bool {
        self.forward.rows == 0
    }

    /// `[forward_i; backward_i]`
    pub fn state(&self, i: usize) -> Vec<f64> {
        let mut v = self.forward.row(i).to_vec();
        v.extend_from_slice(self.backward.row(i));
        v
    }

    /// All concatenated states, `T x 2H`.
    pub fn states(&self) -> Matrix {
        let t = self.len();
        let mut data = Vec::with_capacity(t * 2 * self.forward.cols);
        for i in 0..t {
            data.extend(self.state(i));
        }
        Matrix::from_vec(t, 2 * self.forward.cols, data)
    }
}

struct EncoderTrace {
    state: EncoderState,
    forward: Vec<CellStep>,
    /// Indexed by position, not by processing order.
    backward: Vec<CellStep>,
}

fn run_encoder(features: &Matrix, enc: &Encoder) -> Result<EncoderTrace> {
    if features.cols != enc.forward.input_size() {
        return Err(Error::DimensionMismatch {
            expected: enc.forward.input_size(),
            found: features.cols,
        });
    }
    let t = features.rows;
    let h = enc.forward.hidden();
    let run = |cell: &RnnCell, order: &mut dyn Iterator<Item = usize>| {
        let mut steps: Vec<Option<CellStep>> = vec![None; t];
        let mut hs = vec![0.0; h];
        let mut cs = cell.initial_memory();
        for i in order {
            let st = cell.step(features.row(i), &hs, &cs);
            hs.clone_from(&st.h);
            cs.clone_from(&st.c);
            steps[i] = Some(st);
        }
        steps.into_iter().map(|s| s.expect("every position visited")).collect::<Vec<_>>()
    };
    let forward = run(&enc.forward, &mut (0..t));
    let backward = run(&enc.backward, &mut (0..t).rev());
    let collect = |steps: &[CellStep]| {
        Matrix::from_vec(t, h, steps.iter().flat_map(|s| s.h.iter().copied()).collect())
    };
    Ok(EncoderTrace {
        state: EncoderState {
            forward: collect(&forward),
            backward: collect(&backward),
        },
        forward,
        backward,
    })
}

/// Runs the forward cell over positions `0..T` and the backward cell over
/// `T-1..=0`, both from zero state.
pub fn encode(features: &Matrix, enc: &Encoder) -> Result<EncoderState> {
    run_encoder(features, enc).map(|tr| tr.state)
}

/// Additive attention `e_i = v . tanh(W_s s + W_h h_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    pub ws: Matrix,
    pub wh: Matrix,
    /// Row vector.
    pub v: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attention {
    pub alpha: Vec<f64>,
    pub context: Vec<f64>,
}

struct AttentionTrace {
    /// `tanh(W_s s + W_h h_i)` per position.
    act: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    context: Vec<f64>,
}

impl AttentionParams {
    fn keys(&self, states: &Matrix) -> Vec<Vec<f64>> {
        (0..states.rows).map(|i| self.wh.mul_vec(states.row(i))).collect()
    }

    fn run(&self, s_prev: &[f64], states: &Matrix, keys: &[Vec<f64>]) -> AttentionTrace {
        let q = self.ws.mul_vec(s_prev);
        let act: Vec<Vec<f64>> = keys
            .iter()
            .map(|k| k.iter().zip(&q).map(|(a, b)| (a + b).tanh()).collect())
            .collect();
        let e: Vec<f64> = act.iter().map(|a| dot(self.v.row(0), a)).collect();
        let alpha = softmax(&e);
        let mut context = vec![0.0; states.cols];
        for (i, &a) in alpha.iter().enumerate() {
            axpy(a, states.row(i), &mut context);
        }
        AttentionTrace { act, alpha, context }
    }
}

pub fn attend(s_prev: &[f64], enc: &EncoderState, params: &AttentionParams) -> Attention {
    let states = enc.states();
    let keys = params.keys(&states);
    let tr = params.run(s_prev, &states, &keys);
    Attention {
        alpha: tr.alpha,
        context: tr.context,
    }
}

/// tanh-RNN decoder over `[tag_embedding(y_prev); h_t; c_t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams {
    pub tag_embed: Matrix,
    pub cell: RnnCell,
    pub out_w: Matrix,
    pub out_b: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilstmHead {
    pub out_w: Matrix,
    pub out_b: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Head {
    Bilstm(BilstmHead),
    Attn {
        attention: AttentionParams,
        decoder: DecoderParams,
    },
}

struct DecoderStep {
    s_prev: Vec<f64>,
    prev_tag: Option<usize>,
    attention: AttentionTrace,
    cell: CellStep,
    probs: TagVec,
}

fn output_distribution(w: &Matrix, b: &Matrix, h: &[f64]) -> TagVec {
    let mut logits = b.data.clone();
    w.mul_vec_acc(h, &mut logits);
    let p = softmax(&logits);
    [p[0], p[1], p[2]]
}

fn run_decoder(
    enc: &EncoderState,
    dec: &DecoderParams,
    att: &AttentionParams,
    gold: Option<&[LangTag]>,
) -> Vec<DecoderStep> {
    let states = enc.states();
    let keys = att.keys(&states);
    let e = dec.tag_embed.cols;
    let mut s = vec![0.0; dec.cell.hidden()];
    let mut prev: Option<usize> = None;
    let mut steps = Vec::with_capacity(enc.len());
    for t in 0..enc.len() {
        let attention = att.run(&s, &states, &keys);
        let mut input = match prev {
            Some(y) => dec.tag_embed.row(y).to_vec(),
            None => vec![0.0; e],
        };
        input.extend_from_slice(states.row(t));
        input.extend_from_slice(&attention.context);
        let cell = dec.cell.step(&input, &s, &[]);
        let probs = output_distribution(&dec.out_w, &dec.out_b, &cell.h);
        let s_prev = std::mem::replace(&mut s, cell.h.clone());
        let prev_tag = prev;
        prev = Some(match gold {
            Some(g) => g[t].index(),
            None => argmax(&probs),
        });
        steps.push(DecoderStep {
            s_prev,
            prev_tag,
            attention,
            cell,
            probs,
        });
    }
    steps
}

/// Greedy decoding, feeding back the predicted tag.
pub fn decode_tags(
    enc: &EncoderState,
    dec: &DecoderParams,
    att: &AttentionParams,
) -> (Vec<LangTag>, Vec<TagVec>) {
    let steps = run_decoder(enc, dec, att, None);
    let dists: Vec<TagVec> = steps.iter().map(|s| s.probs).collect();
    (dists.iter().map(|p| LangTag::from_index(argmax(p))).collect(), dists)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuralModel {
    pub arch: Arch,
    /// Digest of the embedding table the model was trained on.
    pub embedding: String,
    pub dims: NeuralDims,
    pub encoder: Encoder,
    pub head: Head,
}

impl NeuralModel {
    /// Freshly initialized parameters.
    pub fn init(arch: Arch, dims: NeuralDims, embedding: String, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = dims.hidden;
        let bound = 1.0 / (h as f64).sqrt();
        let encoder = Encoder {
            forward: RnnCell::new(dims.encoder, dims.input, h, &mut rng),
            backward: RnnCell::new(dims.encoder, dims.input, h, &mut rng),
        };
        let head = match arch {
            Arch::Bilstm => Head::Bilstm(BilstmHead {
                out_w: Matrix::uniform(NUM_TAGS, 2 * h, bound, &mut rng),
                out_b: Matrix::zeros(NUM_TAGS, 1),
            }),
            Arch::Attn => Head::Attn {
                attention: AttentionParams {
                    ws: Matrix::uniform(h, h, bound, &mut rng),
                    wh: Matrix::uniform(h, 2 * h, bound, &mut rng),
                    v: Matrix::uniform(1, h, bound, &mut rng),
                },
                decoder: DecoderParams {
                    tag_embed: Matrix::uniform(NUM_TAGS, dims.tag_dim, bound, &mut rng),
                    cell: RnnCell::new(CellKind::Tanh, dims.tag_dim + 4 * h, h, &mut rng),
                    out_w: Matrix::uniform(NUM_TAGS, h, bound, &mut rng),
                    out_b: Matrix::zeros(NUM_TAGS, 1),
                },
            },
        };
        NeuralModel {
            arch,
            embedding,
            dims,
            encoder,
            head,
        }
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for m in z.blocks_mut() {
            m.data.iter_mut().for_each(|v| *v = 0.0);
        }
        z
    }

    /// Named parameter blocks in a fixed order.
    pub fn blocks(&self) -> Vec<(&'static str, &Matrix)> {
        let (f, b) = (&self.encoder.forward, &self.encoder.backward);
        let mut out = vec![
            ("enc.fwd.wx", &f.wx),
            ("enc.fwd.wh", &f.wh),
            ("enc.fwd.b", &f.b),
            ("enc.bwd.wx", &b.wx),
            ("enc.bwd.wh", &b.wh),
            ("enc.bwd.b", &b.b),
        ];
        match &self.head {
            Head::Bilstm(hd) => {
                out.extend([("out.w", &hd.out_w), ("out.b", &hd.out_b)]);
            }
            Head::Attn { attention, decoder } => out.extend([
                ("attn.ws", &attention.ws),
                ("attn.wh", &attention.wh),
                ("attn.v", &attention.v),
                ("dec.tag", &decoder.tag_embed),
                ("dec.wx", &decoder.cell.wx),
                ("dec.wh", &decoder.cell.wh),
                ("dec.b", &decoder.cell.b),
                ("out.w", &decoder.out_w),
                ("out.b", &decoder.out_b),
            ]),
        }
        out
    }

    /// Same order as [`NeuralModel::blocks`].
    pub fn blocks_mut(&mut self) -> Vec<&mut Matrix> {
        let Encoder { forward: f, backward: b } = &mut self.encoder;
        let mut out = vec![&mut f.wx, &mut f.wh, &mut f.b, &mut b.wx, &mut b.wh, &mut b.b];
        match &mut self.head {
            Head::Bilstm(hd) => out.extend([&mut hd.out_w, &mut hd.out_b]),
            Head::Attn { attention, decoder } => out.extend([
                &mut attention.ws,
                &mut attention.wh,
                &mut attention.v,
                &mut decoder.tag_embed,
                &mut decoder.cell.wx,
                &mut decoder.cell.wh,
                &mut decoder.cell.b,
                &mut decoder.out_w,
                &mut decoder.out_b,
            ]),
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.blocks().iter().map(|(_, m)| m.data.len()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.blocks()
            .iter()
            .flat_map(|(_, m)| m.data.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn check_embedding(&self, table: &EmbeddingTable) -> Result<()> {
        let found = table.digest();
        if found != self.embedding {
            return Err(Error::EmbeddingMismatch {
                expected: self.embedding.clone(),
                found,
            });
        }
        if table.dim() != self.dims.input {
            return Err(Error::DimensionMismatch {
                expected: self.dims.input,
                found: table.dim(),
            });
        }
        Ok(())
    }

    /// Tag distributions for a feature matrix.
    pub fn predict_features(&self, features: &Matrix) -> Result<(Vec<LangTag>, Vec<TagVec>)> {
        let enc = encode(features, &self.encoder)?;
        Ok(match &self.head {
            Head::Bilstm(hd) => {
                let dists: Vec<TagVec> = (0..enc.len())
                    .map(|i| output_distribution(&hd.out_w, &hd.out_b, &enc.state(i)))
                    .collect();
                (dists.iter().map(|p| LangTag::from_index(argmax(p))).collect(), dists)
            }
            Head::Attn { attention, decoder } => decode_tags(&enc, decoder, attention),
        })
    }

    pub fn predict(&self, sentence: &Sentence, table: &EmbeddingTable) -> Result<(Vec<LangTag>, Vec<TagVec>)> {
        self.predict_features(&features(sentence, table))
    }

    pub fn tag(&self, sentence: &Sentence, table: &EmbeddingTable) -> Result<Vec<LangTag>> {
        self.predict(sentence, table).map(|p| p.0)
    }

    /// Summed cross-entropy of the gold tags (teacher forced).
    pub fn loss(&self, features: &Matrix, gold: &[LangTag]) -> Result<f64> {
        self.loss_and_gradient(features, gold).map(|r| r.0)
    }

    /// Loss and full gradient by backpropagation through time.
    pub fn loss_and_gradient(&self, features: &Matrix, gold: &[LangTag]) -> Result<(f64, NeuralModel)> {
        if gold.len() != features.rows {
            return Err(Error::LengthMismatch {
                sentence: 0,
                gold: gold.len(),
                predicted: features.rows,
            });
        }
        let trace = run_encoder(features, &self.encoder)?;
        let t_len = features.rows;
        let h = self.dims.hidden;
        let mut grad = self.zeros_like();
        let mut d_states = Matrix::zeros(t_len, 2 * h);
        let mut loss = 0.0;

        match (&self.head, &mut grad.head) {
            (Head::Bilstm(hd), Head::Bilstm(g)) => {
                for t in 0..t_len {
                    let state = trace.state.state(t);
                    let p = output_distribution(&hd.out_w, &hd.out_b, &state);
                    let y = gold[t].index();
                    loss -= p[y].ln();
                    let mut dl = p.to_vec();
                    dl[y] -= 1.0;
                    g.out_w.add_outer(&dl, &state, 1.0);
                    axpy(1.0, &dl, &mut g.out_b.data);
                    hd.out_w.mul_vec_t_acc(&dl, d_states.row_mut(t));
                }
            }
            (
                Head::Attn { attention, decoder },
                Head::Attn {
                    attention: ga,
                    decoder: gd,
                },
            ) => {
                let states = trace.state.states();
                let steps = run_decoder(&trace.state, decoder, attention, Some(gold));
                let e = decoder.tag_embed.cols;
                let mut d_keys = vec![vec![0.0; h]; t_len];
                let mut ds_next = vec![0.0; h];
                for t in (0..t_len).rev() {
                    let st = &steps[t];
                    let y = gold[t].index();
                    loss -= st.probs[y].ln();
                    let mut dl = st.probs.to_vec();
                    dl[y] -= 1.0;
                    gd.out_w.add_outer(&dl, &st.cell.h, 1.0);
                    axpy(1.0, &dl, &mut gd.out_b.data);
                    let mut ds = ds_next;
                    decoder.out_w.mul_vec_t_acc(&dl, &mut ds);

                    let (du, mut ds_prev, _) = decoder.cell.backward(&st.cell, &ds, &[], &mut gd.cell);
                    if let Some(prev) = st.prev_tag {
                        axpy(1.0, &du[..e], gd.tag_embed.row_mut(prev));
                    }
                    axpy(1.0, &du[e..e + 2 * h], d_states.row_mut(t));
                    let dc = &du[e + 2 * h..];

                    // context = sum_i alpha_i h_i
                    let at = &st.attention;
                    let d_alpha: Vec<f64> = (0..t_len).map(|i| dot(dc, states.row(i))).collect();
                    let mean: f64 = at.alpha.iter().zip(&d_alpha).map(|(a, d)| a * d).sum();
                    let mut dq = vec![0.0; h];
                    for i in 0..t_len {
                        axpy(at.alpha[i], dc, d_states.row_mut(i));
                        let de = at.alpha[i] * (d_alpha[i] - mean);
                        axpy(de, &at.act[i], &mut ga.v.data);
                        let dz: Vec<f64> = (0..h)
                            .map(|k| de * attention.v.data[k] * (1.0 - at.act[i][k] * at.act[i][k]))
                            .collect();
                        axpy(1.0, &dz, &mut dq);
                        axpy(1.0, &dz, &mut d_keys[i]);
                    }
                    ga.ws.add_outer(&dq, &st.s_prev, 1.0);
                    attention.ws.mul_vec_t_acc(&dq, &mut ds_prev);
                    ds_next = ds_prev;
                }
                for (i, dk) in d_keys.iter().enumerate() {
                    ga.wh.add_outer(dk, states.row(i), 1.0);
                    attention.wh.mul_vec_t_acc(dk, d_states.row_mut(i));
                }
            }
            _ => unreachable!("gradient mirrors the model"),
        }

        let Encoder { forward: gf, backward: gb } = &mut grad.encoder;
        let pass = |cell: &RnnCell, steps: &[CellStep], g: &mut RnnCell, offset: usize, order: &mut dyn Iterator<Item = usize>| {
            let mut dh_next = vec![0.0; h];
            let mut dc_next = cell.initial_memory();
            for t in order {
                let mut dh = d_states.row(t)[offset..offset + h].to_vec();
                axpy(1.0, &dh_next, &mut dh);
                let (_, dh_prev, dc_prev) = cell.backward(&steps[t], &dh, &dc_next, g);
                dh_next = dh_prev;
                dc_next = dc_prev;
            }
        };
        pass(&self.encoder.forward, &trace.forward, gf, 0, &mut (0..t_len).rev());
        pass(&self.encoder.backward, &trace.backward, gb, h, &mut (0..t_len));
        Ok((loss, grad))
    }

    /// `self -= step * grad`, with `grad` rescaled to global norm `clip`
    /// when larger. Returns the norm of the applied update.
    pub fn apply_gradient(&mut self, grad: &NeuralModel, step: f64, clip: f64) -> f64 {
        let norm = grad.norm();
        let scale = if norm > clip { clip / norm } else { 1.0 };
        for (p, (_, g)) in self.blocks_mut().into_iter().zip(grad.blocks()) {
            axpy(-step * scale, &g.data, &mut p.data);
        }
        step * scale * norm
    }
}

/// Embedding features of a sentence, `T x N`, each row scaled to unit
/// length. Unknown tokens keep the zero vector.
pub fn features(sentence: &Sentence, table: &EmbeddingTable) -> Matrix {
    let data = sentence
        .surfaces()
        .flat_map(|w| {
            let mut v = table.vector(w);
            let norm = crate::linalg::l2_norm(&v);
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            }
            v
        })
        .collect();
    Matrix::from_vec(sentence.len(), table.dim(), data)
}

/// Summed loss and gradient over several sentences.
pub fn batch_gradient(model: &NeuralModel, data: &[(Matrix, Vec<LangTag>)]) -> Result<(f64, NeuralModel)> {
    let mut total = model.zeros_like();
    let mut loss = 0.0;
    for (x, y) in data {
        let (l, g) = model.loss_and_gradient(x, y)?;
        loss += l;
        for (acc, (_, part)) in total.blocks_mut().into_iter().zip(g.blocks()) {
            axpy(1.0, &part.data, &mut acc.data);
        }
    }
    Ok((loss, total))
}

/// Trained model with the mean per-token loss of every epoch.
#[derive(Debug, Clone)]
pub struct NeuralFit {
    pub model: NeuralModel,
    pub epoch_loss: Vec<f64>,
}

/// Per-sentence SGD in a seeded random order each epoch.
pub fn fit_neural(train: &Corpus, table: &EmbeddingTable, arch: Arch, cfg: &NeuralConfig) -> Result<NeuralFit> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let tags = train.tag_sequences()?;
    let data: Vec<(Matrix, Vec<LangTag>)> = train
        .sentences()
        .iter()
        .map(|s| features(s, table))
        .zip(tags)
        .collect();
    let dims = NeuralDims {
        input: table.dim(),
        hidden: cfg.hidden,
        tag_dim: cfg.tag_dim,
        encoder: cfg.encoder.unwrap_or(arch.default_encoder()),
    };
    let mut model = NeuralModel::init(arch, dims, table.digest(), cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let tokens = train.token_count().max(1) as f64;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            let (x, y) = &data[i];
            let (l, g) = model.loss_and_gradient(x, y)?;
            total += l;
            model.apply_gradient(&g, cfg.step, cfg.clip);
        }
        epoch_loss.push(total / tokens);
    }
    Ok(NeuralFit { model, epoch_loss })
}

pub fn train_neural(train: &Corpus, table: &EmbeddingTable, arch: Arch, cfg: &NeuralConfig) -> Result<NeuralModel> {
    fit_neural(train, table, arch, cfg).map(|f| f.model)
}

pub fn tag_bilstm(sentence: &Sentence, table: &EmbeddingTable, model: &NeuralModel) -> Result<Vec<LangTag>> {
    if model.arch != Arch::Bilstm {
        return Err(Error::InvalidArgument("model is not a bilstm tagger".into()));
    }
    model.tag(sentence, table)
}

pub fn tag_attention(sentence: &Sentence, table: &EmbeddingTable, model: &NeuralModel) -> Result<Vec<LangTag>> {
    if model.arch != Arch::Attn {
        return Err(Error::InvalidArgument("model is not an attention tagger".into()));
    }
    model.tag(sentence, table)
}

#[cfg(test)]
mod tests;
