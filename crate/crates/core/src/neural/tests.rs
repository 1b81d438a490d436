use super::*;
use crate::corpus::{parse_corpus, CorpusFormat};
use crate::embed::{train_skipgram, EmbedConfig};
use rand::Rng;

fn random_features(rng: &mut ChaCha8Rng, t: usize, n: usize) -> Matrix {
    Matrix::uniform(t, n, 1.0, rng)
}

fn random_model(arch: Arch, encoder: CellKind, seed: u64) -> NeuralModel {
    let dims = NeuralDims {
        input: 4,
        hidden: 3,
        tag_dim: 2,
        encoder,
    };
    let mut m = NeuralModel::init(arch, dims, "0".repeat(64), seed);
    // move biases away from zero so every block gets a gradient
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
    for block in m.blocks_mut() {
        for v in &mut block.data {
            *v += rng.gen_range(-0.3..0.3);
        }
    }
    m
}

fn gradient_check(model: &NeuralModel, x: &Matrix, gold: &[LangTag]) {
    let (_, grad) = model.loss_and_gradient(x, gold).unwrap();
    let h = 1e-6;
    let names: Vec<&str> = model.blocks().iter().map(|(n, _)| *n).collect();
    for (b, name) in names.iter().enumerate() {
        let len = model.blocks()[b].1.data.len();
        for k in 0..len {
            let mut plus = model.clone();
            plus.blocks_mut()[b].data[k] += h;
            let mut minus = model.clone();
            minus.blocks_mut()[b].data[k] -= h;
            let numeric = (plus.loss(x, gold).unwrap() - minus.loss(x, gold).unwrap()) / (2.0 * h);
            let analytic = grad.blocks()[b].1.data[k];
            let denom = numeric.abs().max(analytic.abs()).max(1e-5);
            assert!(
                (numeric - analytic).abs() / denom < 1e-4,
                "{name}[{k}]: numeric {numeric} analytic {analytic}"
            );
        }
    }
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (arch, cell) in [
        (Arch::Bilstm, CellKind::Lstm),
        (Arch::Bilstm, CellKind::Tanh),
        (Arch::Attn, CellKind::Tanh),
        (Arch::Attn, CellKind::Lstm),
    ] {
        for t in 1..=4 {
            let model = random_model(arch, cell, t as u64);
            let x = random_features(&mut rng, t, 4);
            let gold: Vec<LangTag> = (0..t).map(|i| LangTag::from_index((i * 2 + 1) % 3)).collect();
            gradient_check(&model, &x, &gold);
        }
    }
}

#[test]
fn single_position_encoding() {
    let model = random_model(Arch::Attn, CellKind::Tanh, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = random_features(&mut rng, 1, 4);
    let enc = encode(&x, &model.encoder).unwrap();
    let f = model.encoder.forward.step(x.row(0), &[0.0; 3], &[]).h;
    let b = model.encoder.backward.step(x.row(0), &[0.0; 3], &[]).h;
    assert_eq!(enc.state(0), [f, b].concat());
}

#[test]
fn zero_inputs_and_biases_give_zero_states() {
    for cell in [CellKind::Tanh, CellKind::Lstm] {
        let mut model = random_model(Arch::Bilstm, cell, 3);
        model.encoder.forward.b.data.iter_mut().for_each(|v| *v = 0.0);
        model.encoder.backward.b.data.iter_mut().for_each(|v| *v = 0.0);
        let enc = encode(&Matrix::zeros(5, 4), &model.encoder).unwrap();
        assert!(enc.states().data.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn reversed_input_with_swapped_cells_mirrors_states() {
    let model = random_model(Arch::Attn, CellKind::Tanh, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_features(&mut rng, 6, 4);
    let reversed = Matrix::from_vec(6, 4, (0..6).rev().flat_map(|i| x.row(i).to_vec()).collect());
    let swapped = Encoder {
        forward: model.encoder.backward.clone(),
        backward: model.encoder.forward.clone(),
    };
    let a = encode(&x, &model.encoder).unwrap();
    let b = encode(&reversed, &swapped).unwrap();
    for i in 0..6 {
        assert_eq!(b.forward.row(i), a.backward.row(5 - i));
        assert_eq!(b.backward.row(i), a.forward.row(5 - i));
    }
}

#[test]
fn feature_width_is_checked() {
    let model = random_model(Arch::Bilstm, CellKind::Lstm, 1);
    assert!(matches!(
        encode(&Matrix::zeros(2, 5), &model.encoder),
        Err(Error::DimensionMismatch { expected: 4, found: 5 })
    ));
}

fn attention_params(model: &NeuralModel) -> (&AttentionParams, &DecoderParams) {
    match &model.head {
        Head::Attn { attention, decoder } => (attention, decoder),
        Head::Bilstm(_) => panic!("not an attention model"),
    }
}

#[test]
fn attention_invariants() {
    let model = random_model(Arch::Attn, CellKind::Tanh, 6);
    let (att, _) = attention_params(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let one = encode(&random_features(&mut rng, 1, 4), &model.encoder).unwrap();
    let a = attend(&s, &one, att);
    assert_eq!(a.alpha, [1.0]);
    assert_eq!(a.context, one.state(0));

    let many = encode(&random_features(&mut rng, 7, 4), &model.encoder).unwrap();
    let a = attend(&s, &many, att);
    assert!((a.alpha.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(a.alpha.iter().all(|&p| p > 0.0 && p < 1.0));

    let row = random_features(&mut rng, 1, 6);
    let same = EncoderState {
        forward: Matrix::from_vec(4, 3, row.data[..3].repeat(4)),
        backward: Matrix::from_vec(4, 3, row.data[3..].repeat(4)),
    };
    for p in attend(&s, &same, att).alpha {
        assert!((p - 0.25).abs() < 1e-12);
    }
}

#[test]
fn decoder_output_shape() {
    let model = random_model(Arch::Attn, CellKind::Tanh, 8);
    let (att, dec) = attention_params(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let enc = encode(&random_features(&mut rng, 5, 4), &model.encoder).unwrap();
    let (tags, dists) = decode_tags(&enc, dec, att);
    assert_eq!(tags.len(), 5);
    for (tag, d) in tags.iter().zip(&dists) {
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(tag.index(), argmax(d));
    }
}

#[test]
fn clipping_bounds_the_update() {
    let mut model = random_model(Arch::Attn, CellKind::Tanh, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = random_features(&mut rng, 3, 4);
    let (_, g) = model.loss_and_gradient(&x, &[LangTag::En, LangTag::Ru, LangTag::Rs]).unwrap();
    let before = model.clone();
    model.apply_gradient(&g, 0.5, 1e-9);
    let diff: f64 = model
        .blocks()
        .iter()
        .zip(before.blocks())
        .flat_map(|((_, a), (_, b))| a.data.iter().zip(&b.data).map(|(x, y)| (x - y) * (x - y)).collect::<Vec<_>>())
        .sum::<f64>()
        .sqrt();
    assert!(diff <= 0.5 * 1e-9 * (1.0 + 1e-6), "{diff}");
}

#[test]
fn batch_gradient_ignores_sentence_order() {
    let model = random_model(Arch::Attn, CellKind::Lstm, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut data: Vec<(Matrix, Vec<LangTag>)> = (1..=5)
        .map(|t| {
            let gold = (0..t).map(|_| LangTag::from_index(rng.gen_range(0..3))).collect();
            (random_features(&mut rng, t, 4), gold)
        })
        .collect();
    let (la, ga) = batch_gradient(&model, &data).unwrap();
    data.reverse();
    data.swap(0, 2);
    let (lb, gb) = batch_gradient(&model, &data).unwrap();
    assert!((la - lb).abs() <= 1e-12 * la.abs().max(1.0));
    for ((_, a), (_, b)) in ga.blocks().iter().zip(gb.blocks()) {
        for (x, y) in a.data.iter().zip(&b.data) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}

fn separable() -> Corpus {
    parse_corpus(
        "qat\ten\nzor\tru\nqi\ten\n!\trs\n\n\
         zaz\tru\nzi\tru\nqoq\ten\n\n\
         qe\ten\nqat\ten\nzu\tru\n?\trs\n\n\
         zor\tru\nqe\ten\nzaz\tru\n\n\
         qi\ten\nqoq\ten\n!\trs\nzu\tru\nzi\tru\n",
        CorpusFormat::Conll,
    )
    .unwrap()
}

fn small_table(c: &Corpus) -> EmbeddingTable {
    train_skipgram(&c.without_tags(), &EmbedConfig { dim: 10, epochs: 5, learning_rate: 0.05, negative_samples: 0, min_ngram: 2, max_ngram: 4, ..Default::default() }).unwrap()
}

#[test]
fn both_architectures_fit_separable_corpus() {
    let c = separable();
    let table = small_table(&c);
    for arch in [Arch::Bilstm, Arch::Attn] {
        let fit = fit_neural(&c, &table, arch, &NeuralConfig { step: 0.1, epochs: 100, ..Default::default() }).unwrap();
        assert!(fit.epoch_loss.windows(2).take(3).all(|w| w[1] < w[0]), "{arch}: {:?}", fit.epoch_loss);
        for s in c.sentences() {
            let (tags, dists) = fit.model.predict(s, &table).unwrap();
            assert_eq!(tags, s.tags().unwrap(), "{arch}");
            assert!(dists.iter().all(|d| (d.iter().sum::<f64>() - 1.0).abs() < 1e-9));
        }
    }
}

#[test]
fn training_is_deterministic() {
    let c = separable();
    let table = small_table(&c);
    let cfg = NeuralConfig { epochs: 3, seed: 5, ..Default::default() };
    for arch in [Arch::Bilstm, Arch::Attn] {
        let a = train_neural(&c, &table, arch, &cfg).unwrap();
        let b = train_neural(&c, &table, arch, &cfg).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }
}

#[test]
fn training_errors() {
    let c = separable();
    let table = small_table(&c);
    assert!(matches!(
        train_neural(&Corpus::empty(true), &table, Arch::Attn, &NeuralConfig::default()),
        Err(Error::EmptyCorpus)
    ));
    assert!(matches!(
        train_neural(&c.without_tags(), &table, Arch::Attn, &NeuralConfig::default()),
        Err(Error::NotAnnotated)
    ));
    assert!(train_neural(&c, &table, Arch::Attn, &NeuralConfig { clip: 0.0, ..Default::default() }).is_err());
}

#[test]
fn model_file_round_trip_and_embedding_check() {
    let c = separable();
    let table = small_table(&c);
    let model = train_neural(&c, &table, Arch::Attn, &NeuralConfig { epochs: 2, ..Default::default() }).unwrap();
    let text = model.to_text();
    assert!(text.starts_with("CMNN 1 attn\n"));
    let back = parse_neural(&text).unwrap();
    assert_eq!(back, model);
    assert_eq!(back.to_text(), text);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.nn");
    model.save(&path).unwrap();
    assert_eq!(NeuralModel::load(&path, &table).unwrap(), model);
    let other = train_skipgram(&c.without_tags(), &EmbedConfig { dim: 10, epochs: 1, ..Default::default() }).unwrap();
    assert!(matches!(NeuralModel::load(&path, &other), Err(Error::EmbeddingMismatch { .. })));

    assert!(parse_neural(&text.replace("block attn.v", "block attn.q")).is_err());
    assert!(parse_neural(&text.replacen("CMNN 1 attn", "CMNN 1 bilstm", 1)).is_err());
}

#[test]
fn taggers_check_architecture() {
    let c = separable();
    let table = small_table(&c);
    let m = train_neural(&c, &table, Arch::Bilstm, &NeuralConfig { epochs: 1, ..Default::default() }).unwrap();
    let s = &c.sentences()[0];
    assert_eq!(tag_bilstm(s, &table, &m).unwrap().len(), s.len());
    assert!(tag_attention(s, &table, &m).is_err());
}

