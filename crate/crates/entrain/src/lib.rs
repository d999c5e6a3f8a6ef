//! Conversational entrainment analysis for code-switched dyadic speech.
//!
//! This crate measures how two speakers in a conversation become more similar
//! to each other — in the words they choose, in their voices, and in how they
//! mix two languages. It covers three feature sets:
//!
//! - **Lexical**: word-class entrainment scores over frequent words, cue words
//!   and filled pauses, plus overall-language entrainment via cross-speaker
//!   trigram perplexity (Kneser-Ney smoothed).
//! - **Acoustic-prosodic**: 12 per-utterance features (pitch, intensity,
//!   jitter, shimmer, HNR, speaking rate) extracted from WAV audio and
//!   z-normalized per speaker.
//! - **Code-switching**: binary presence, amount (ratio), and strategy
//!   (insertional / alternational / other) per utterance, with manual-override
//!   support.
//!
//! Entrainment itself is measured as **proximity**, **convergence**, and
//! **synchrony** at the turn level, plus proximity and convergence at the
//! conversation level, with a thirds-of-conversation breakdown.
//!
//! Every detector in [`measures`] can be validated against the synthetic
//! conversation generator in [`synth`], which injects known entrainment into
//! generated dyads so sensitivity and false-positive rates are testable.
//!
//! See the crate's `examples/` directory for a runnable tour of each
//! capability, and the `entrain` binary for the batch pipeline
//! (`ingest`, `csw`, `prosody`, `entrain`, `synth`, `report`).

pub mod audio;
pub mod corpus;
pub mod csw;
pub mod lexical;
pub mod lexicon;
pub mod measures;
pub mod report;
pub mod synth;

pub use corpus::{Conversation, Corpus, Gender, Lang, Speaker, Token, Turn, Utterance};
pub use csw::{CswFeatures, CswStrategy};
