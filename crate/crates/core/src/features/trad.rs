//! Surface features: the two Turkish readability formulas, mean sentence and
//! word length, and polysyllabic word rates.

use crate::config::{FormulaCoefficients, FormulaConfig};
use crate::corpus::{syllable_count, Document};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradFeatures {
    pub atesman_score: f64,
    pub cetinkaya_score: f64,
    pub mean_sentence_len_words: f64,
    pub mean_word_len_syllables: f64,
    pub poly3_per100w: f64,
    pub poly4_per100w: f64,
    pub poly5plus_per100w: f64,
}

pub const NAMES: [&str; 7] = [
    "atesman",
    "cetinkaya_uzun",
    "mean_sentence_len_words",
    "mean_word_len_syllables",
    "poly3_per100w",
    "poly4_per100w",
    "poly5plus_per100w",
];

impl TradFeatures {
    pub fn values(&self) -> Vec<f64> {
        vec![
            self.atesman_score,
            self.cetinkaya_score,
            self.mean_sentence_len_words,
            self.mean_word_len_syllables,
            self.poly3_per100w,
            self.poly4_per100w,
            self.poly5plus_per100w,
        ]
    }
}

pub fn linear_formula(
    coef: &FormulaCoefficients,
    mean_syll_per_word: f64,
    mean_words_per_sentence: f64,
) -> Result<f64> {
    if !(mean_syll_per_word > 0.0 && mean_words_per_sentence > 0.0) {
        return Err(Error::degenerate(format!(
            "readability formula needs positive means, got syllables/word={mean_syll_per_word}, words/sentence={mean_words_per_sentence}"
        )));
    }
    Ok(coef.intercept
        - coef.syllables_per_word * mean_syll_per_word
        - coef.words_per_sentence * mean_words_per_sentence)
}

/// Atesman reading ease with the published coefficients.
pub fn atesman(mean_syll_per_word: f64, mean_words_per_sentence: f64) -> Result<f64> {
    linear_formula(
        &FormulaCoefficients::ATESMAN,
        mean_syll_per_word,
        mean_words_per_sentence,
    )
}

/// Çetinkaya-Uzun score with the published coefficients.
pub fn cetinkaya_uzun(mean_syll_per_word: f64, mean_words_per_sentence: f64) -> Result<f64> {
    linear_formula(
        &FormulaCoefficients::CETINKAYA_UZUN,
        mean_syll_per_word,
        mean_words_per_sentence,
    )
}

/// Words and syllables summed over a document.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SurfaceCounts {
    pub sentences: usize,
    pub words: usize,
    pub syllables: usize,
    pub poly3: usize,
    pub poly4: usize,
    pub poly5plus: usize,
}

pub fn surface_counts(document: &Document) -> SurfaceCounts {
    let mut c = SurfaceCounts::default();
    for s in document.word_sentences() {
        c.sentences += 1;
        for w in s.words() {
            let n = syllable_count(&w.surface);
            c.words += 1;
            c.syllables += n;
            match n {
                3 => c.poly3 += 1,
                4 => c.poly4 += 1,
                n if n >= 5 => c.poly5plus += 1,
                _ => {}
            }
        }
    }
    c
}

pub fn extract_trad(document: &Document, formulas: &FormulaConfig) -> Result<TradFeatures> {
    let c = surface_counts(document);
    if c.words == 0 {
        return Err(Error::degenerate("document has no word tokens").in_doc(&document.doc_id));
    }
    let words = c.words as f64;
    let syll_per_word = c.syllables as f64 / words;
    let words_per_sentence = words / c.sentences as f64;
    let per100 = |n: usize| 100.0 * n as f64 / words;
    Ok(TradFeatures {
        atesman_score: linear_formula(&formulas.atesman, syll_per_word, words_per_sentence)
            .map_err(|e| e.in_doc(&document.doc_id))?,
        cetinkaya_score: linear_formula(&formulas.cetinkaya, syll_per_word, words_per_sentence)
            .map_err(|e| e.in_doc(&document.doc_id))?,
        mean_sentence_len_words: words_per_sentence,
        mean_word_len_syllables: syll_per_word,
        poly3_per100w: per100(c.poly3),
        poly4_per100w: per100(c.poly4),
        poly5plus_per100w: per100(c.poly5plus),
    })
}
