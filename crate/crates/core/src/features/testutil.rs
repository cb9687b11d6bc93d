use crate::corpus::{Document, ReadingLevel, Sentence, Token, Upos};

pub fn tok(surface: &str, lemma: &str, upos: Upos, head: usize, deprel: &str) -> Token {
    Token {
        surface: surface.to_string(),
        lemma: lemma.to_string(),
        upos,
        head,
        deprel: deprel.to_string(),
        entity_tag: "O".to_string(),
    }
}

pub fn doc(sentences: Vec<Vec<Token>>) -> Document {
    Document {
        doc_id: "test-doc".to_string(),
        level: ReadingLevel::Elementary,
        sentences: sentences.into_iter().map(Sentence::new).collect(),
    }
}

/// Flat sentences of NOUN tokens attached to the first token; lemma = surface.
pub fn doc_from_words(sentences: &[&[&str]]) -> Document {
    doc(sentences
        .iter()
        .map(|words| {
            words
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let (head, rel) = if i == 0 { (0, "root") } else { (1, "nmod") };
                    tok(w, w, Upos::NOUN, head, rel)
                })
                .collect()
        })
        .collect())
}
