//! Morphological Complexity Index for nouns, verbs and adjectives.
//!
//! An exponent is what remains of a (lowercased) word form once its longest
//! common prefix with the lemma is removed. MCI is the mean number of distinct
//! exponents in random samples of `sample_size` forms, minus one.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::MorphConfig;
use crate::corpus::{turkish_lowercase, word_tokens, Document, Upos};
use crate::error::{Error, Result};

pub const EMPTY_EXPONENT: &str = "∅";

pub const POS_CLASSES: [(Upos, &str); 3] = [
    (Upos::NOUN, "noun"),
    (Upos::VERB, "verb"),
    (Upos::ADJ, "adj"),
];

pub fn names() -> Vec<String> {
    let mut out = Vec::new();
    for (_, pos) in POS_CLASSES {
        out.push(format!("mci_{pos}_rep"));
        out.push(format!("mci_{pos}_norep"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentInventory {
    pub pos: Upos,
    /// One exponent per token occurrence, in document order.
    pub exponents: Vec<String>,
}

impl ExponentInventory {
    pub fn from_document(document: &Document, pos: Upos) -> Self {
        let exponents = word_tokens(document)
            .into_iter()
            .filter(|t| t.upos == pos)
            .map(|t| extract_exponent(&t.surface, &t.lemma))
            .collect();
        ExponentInventory { pos, exponents }
    }
}

pub fn extract_exponent(surface: &str, lemma: &str) -> String {
    let s = turkish_lowercase(surface);
    let l = turkish_lowercase(lemma);
    let prefix_bytes: usize = s
        .chars()
        .zip(l.chars())
        .take_while(|(a, b)| a == b)
        .map(|(a, _)| a.len_utf8())
        .sum();
    let rest = &s[prefix_bytes..];
    if rest.is_empty() {
        EMPTY_EXPONENT.to_string()
    } else {
        rest.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MciEstimate {
    pub value: f64,
    /// The inventory was empty; `value` is 0.
    pub absent: bool,
    /// Sampling without replacement was requested but the inventory was
    /// smaller than the sample size, so sampling used replacement.
    pub fell_back_to_replacement: bool,
}

/// Monte-Carlo MCI. The inventory is put in canonical (sorted) order before
/// sampling, so the result depends only on the multiset of exponents and the seed.
pub fn mci(
    inventory: &ExponentInventory,
    sample_size: usize,
    samples: usize,
    with_replacement: bool,
    seed: u64,
) -> Result<MciEstimate> {
    if sample_size < 2 {
        return Err(Error::InvalidArgument(
            "MCI sample size must be >= 2".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "MCI needs at least one sample".into(),
        ));
    }
    let n = inventory.exponents.len();
    if n == 0 {
        return Ok(MciEstimate {
            value: 0.0,
            absent: true,
            fell_back_to_replacement: false,
        });
    }
    let mut pool: Vec<&str> = inventory.exponents.iter().map(String::as_str).collect();
    pool.sort_unstable();
    let fallback = !with_replacement && n < sample_size;
    let replace = with_replacement || fallback;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<&str> = HashSet::with_capacity(sample_size);
    let mut total = 0usize;
    for _ in 0..samples {
        seen.clear();
        if replace {
            for _ in 0..sample_size {
                seen.insert(pool[rng.gen_range(0..n)]);
            }
        } else {
            for i in index::sample(&mut rng, n, sample_size) {
                seen.insert(pool[i]);
            }
        }
        total += seen.len() - 1;
    }
    Ok(MciEstimate {
        value: total as f64 / samples as f64,
        absent: false,
        fell_back_to_replacement: fallback,
    })
}

/// Stable 64-bit FNV-1a, used to derive per-document seeds.
pub fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn document_seed(base_seed: u64, doc_id: &str) -> u64 {
    base_seed ^ fnv1a(doc_id)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphFeatures {
    /// Ordered as `names()`.
    pub values: Vec<f64>,
    pub absent: Vec<bool>,
    pub fallbacks: usize,
}

pub fn extract_morph(document: &Document, config: &MorphConfig) -> Result<MorphFeatures> {
    let seed = document_seed(config.seed, &document.doc_id);
    let mut values = Vec::with_capacity(6);
    let mut absent = Vec::with_capacity(6);
    let mut fallbacks = 0;
    for (k, (pos, _)) in POS_CLASSES.iter().enumerate() {
        let inv = ExponentInventory::from_document(document, *pos);
        for (m, replace) in [true, false].into_iter().enumerate() {
            let sub_seed = seed.wrapping_add((2 * k + m) as u64);
            let est = mci(&inv, config.sample_size, config.samples, replace, sub_seed)?;
            values.push(est.value);
            absent.push(est.absent);
            fallbacks += est.fell_back_to_replacement as usize;
        }
    }
    Ok(MorphFeatures {
        values,
        absent,
        fallbacks,
    })
}
