//! Token-level language identification for code-switched English / Roman
//! Urdu text.
//!
//! The pipeline runs raw chat text through normalization ([`normalize`]),
//! lexicon-driven annotation ([`annotate`]) and subword skipgram features
//! ([`embed`]), then tags it with one of four models: an HMM ([`hmm`]), a
//! linear-chain CRF ([`crf`]), a BiLSTM, or a BiRNN encoder with an
//! attention decoder ([`neural`]). [`eval`] scores predictions against a
//! gold corpus.

pub mod annotate;
pub mod chain;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod crf;
pub mod embed;
pub mod error;
pub mod eval;
pub mod hmm;
pub mod linalg;
pub mod neural;
pub mod normalize;
pub mod synth;

pub use corpus::{Corpus, CorpusFormat, LangTag, Sentence, TaggedToken, Token};
pub use error::{Error, ParseError, Result};
