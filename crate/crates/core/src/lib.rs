//! Readability features and classifiers for annotated Turkish text.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod features;
pub mod hybrid;
pub mod learn;
pub mod lexicon;
pub mod matrix;
pub mod synth;

pub use error::{Error, Result};
