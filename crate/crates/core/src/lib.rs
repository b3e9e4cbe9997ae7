//! Core algorithms for automated implicit-motive analysis of short social
//! media posts.
//!
//! The crate is `no_std` (with `alloc`): everything here is a pure function
//! over in-memory data. File formats, IO and the command line live in the
//! `motive` companion crate.
//!
//! Pipeline overview:
//!
//! 1. [`textprep`] normalizes raw posts, drops stop words and caps the token
//!    stream at the first 20 tokens (primacy rule).
//! 2. [`model`] classifies the token stream into one of 30 motive × level
//!    [`Label`]s with a stacked bidirectional LSTM and additive attention.
//! 3. [`lexicon`] scores the full token stream against LIWC-style
//!    dictionaries.
//! 4. [`stats`] and [`indicators`] aggregate two corpora into a comparison
//!    report with Welch t-tests.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod embeddings;
pub mod indicators;
pub mod label;
pub mod lexicon;
pub mod model;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod textprep;

pub use label::{Label, Level, Motive};
pub use rng::SeededRng;
