//! Entity density features over BIO-tagged named entities.

use std::collections::HashSet;

use crate::corpus::{turkish_lowercase, Document, Sentence};
use crate::error::{Error, Result};

pub const NAMES: [&str; 4] = [
    "entities_per_sentence",
    "entities_per100w",
    "unique_entity_ratio",
    "entity_token_proportion",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityMention {
    pub sentence: usize,
    /// Token indices within the sentence (0-based, contiguous).
    pub tokens: Vec<usize>,
    pub entity_type: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscoFeatures {
    pub entities_per_sentence: f64,
    pub entities_per100w: f64,
    pub unique_entity_ratio: f64,
    pub entity_token_proportion: f64,
}

impl DiscoFeatures {
    pub fn values(&self) -> Vec<f64> {
        vec![
            self.entities_per_sentence,
            self.entities_per100w,
            self.unique_entity_ratio,
            self.entity_token_proportion,
        ]
    }
}

enum Bio<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

fn parse_tag(tag: &str) -> Bio<'_> {
    if tag == "O" || tag == "_" || tag.is_empty() {
        Bio::Outside
    } else if let Some(t) = tag.strip_prefix("B-") {
        Bio::Begin(t)
    } else if let Some(t) = tag.strip_prefix("I-") {
        Bio::Inside(t)
    } else {
        // bare type label: treat as a continuation
        Bio::Inside(tag)
    }
}

fn sentence_mentions(index: usize, sentence: &Sentence, out: &mut Vec<EntityMention>) {
    let mut open: Option<EntityMention> = None;
    for (i, t) in sentence.tokens.iter().enumerate() {
        match parse_tag(&t.entity_tag) {
            Bio::Outside => out.extend(open.take()),
            Bio::Begin(ty) => {
                out.extend(open.take());
                open = Some(EntityMention {
                    sentence: index,
                    tokens: vec![i],
                    entity_type: ty.to_string(),
                });
            }
            Bio::Inside(ty) => match &mut open {
                Some(m) if m.entity_type == ty => m.tokens.push(i),
                _ => {
                    // I- without a matching open mention starts a new one
                    out.extend(open.take());
                    open = Some(EntityMention {
                        sentence: index,
                        tokens: vec![i],
                        entity_type: ty.to_string(),
                    });
                }
            },
        }
    }
    out.extend(open);
}

/// Maximal contiguous mentions, in document order.
pub fn entity_mentions(document: &Document) -> Vec<EntityMention> {
    let mut out = Vec::new();
    for (i, s) in document.sentences.iter().enumerate() {
        sentence_mentions(i, s, &mut out);
    }
    out
}

pub fn extract_disco(document: &Document) -> Result<DiscoFeatures> {
    let words = document.tokens().filter(|t| t.is_word()).count();
    if words == 0 {
        return Err(Error::degenerate("document has no word tokens").in_doc(&document.doc_id));
    }
    let mentions = entity_mentions(document);
    let m = mentions.len() as f64;
    let mut distinct = HashSet::new();
    let mut entity_words = 0usize;
    for mention in &mentions {
        let toks = &document.sentences[mention.sentence].tokens;
        let surface = mention
            .tokens
            .iter()
            .map(|&i| turkish_lowercase(&toks[i].surface))
            .collect::<Vec<_>>()
            .join(" ");
        distinct.insert(surface);
        entity_words += mention
            .tokens
            .iter()
            .filter(|&&i| toks[i].is_word())
            .count();
    }
    let w = words as f64;
    Ok(DiscoFeatures {
        entities_per_sentence: m / document.sentences.len() as f64,
        entities_per100w: 100.0 * m / w,
        unique_entity_ratio: if mentions.is_empty() {
            0.0
        } else {
            distinct.len() as f64 / m
        },
        entity_token_proportion: entity_words as f64 / w,
    })
}
