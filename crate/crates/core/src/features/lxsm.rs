//! Lexico-semantic features: type-token ratios, moving-average TTR, lexical
//! variation per word class, psycholinguistic frequency and familiarity.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use crate::corpus::{turkish_lowercase, word_tokens, Document, Upos};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TtrFamily {
    pub ttr: f64,
    pub root_ttr: f64,
    pub corrected_ttr: f64,
    pub bilog_ttr: f64,
    pub uber_index: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexicalVariation {
    pub noun_var: f64,
    pub verb_var: f64,
    pub adj_var: f64,
    pub adv_var: f64,
    pub lexical_density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyFeatures {
    pub early_freq_per_word: f64,
    pub late_freq_per_word: f64,
    pub early_freq_per_sentence: f64,
    pub late_freq_per_sentence: f64,
    pub child_corpus_proportion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LxsmFeatures {
    pub ttr: TtrFamily,
    pub mattr: f64,
    pub variation: LexicalVariation,
    pub frequency: FrequencyFeatures,
    pub familiarity_pct: f64,
}

pub const NAMES: [&str; 17] = [
    "ttr",
    "root_ttr",
    "corrected_ttr",
    "bilog_ttr",
    "uber_index",
    "mattr",
    "noun_var",
    "verb_var",
    "adj_var",
    "adv_var",
    "lexical_density",
    "early_freq_per_word",
    "late_freq_per_word",
    "early_freq_per_sentence",
    "late_freq_per_sentence",
    "child_corpus_proportion",
    "familiarity_pct",
];

impl LxsmFeatures {
    pub fn values(&self) -> Vec<f64> {
        let t = &self.ttr;
        let v = &self.variation;
        let f = &self.frequency;
        vec![
            t.ttr,
            t.root_ttr,
            t.corrected_ttr,
            t.bilog_ttr,
            t.uber_index,
            self.mattr,
            v.noun_var,
            v.verb_var,
            v.adj_var,
            v.adv_var,
            v.lexical_density,
            f.early_freq_per_word,
            f.late_freq_per_word,
            f.early_freq_per_sentence,
            f.late_freq_per_sentence,
            f.child_corpus_proportion,
            self.familiarity_pct,
        ]
    }
}

/// The three lexicons LXSM extraction depends on.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    pub early: Lexicon,
    pub late: Lexicon,
    pub basic_words: Lexicon,
}

/// Five TTR variants for `types` distinct forms over `tokens` running words.
/// The bilogarithmic ratio is 0 when either count is 1; the Uber index is 0
/// when every token is distinct.
pub fn ttr_family(types: usize, tokens: usize) -> Result<TtrFamily> {
    if tokens == 0 || types == 0 || types > tokens {
        return Err(Error::degenerate(format!(
            "TTR needs 1 <= types <= tokens, got types={types}, tokens={tokens}"
        )));
    }
    let t = types as f64;
    let n = tokens as f64;
    let bilog_ttr = if tokens > 1 && types > 1 {
        t.ln() / n.ln()
    } else {
        0.0
    };
    let uber_index = if types < tokens {
        let ln = n.log10();
        ln * ln / (ln - t.log10())
    } else {
        0.0
    };
    Ok(TtrFamily {
        ttr: t / n,
        root_ttr: t / n.sqrt(),
        corrected_ttr: t / (2.0 * n).sqrt(),
        bilog_ttr,
        uber_index,
    })
}

/// Moving-average TTR over windows of `window` tokens. Short inputs
/// (`len <= window`) fall back to plain TTR.
pub fn mattr<T: Eq + Hash>(tokens: &[T], window: usize) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::degenerate("MATTR of an empty token list"));
    }
    if window == 0 {
        return Err(Error::InvalidArgument("MATTR window must be >= 1".into()));
    }
    let n = tokens.len();
    if n <= window {
        let types = tokens.iter().collect::<HashSet<_>>().len();
        return Ok(types as f64 / n as f64);
    }
    let mut counts: HashMap<&T, usize> = HashMap::new();
    for t in &tokens[..window] {
        *counts.entry(t).or_insert(0) += 1;
    }
    let mut type_sum = counts.len() as u64;
    for i in window..n {
        let out = &tokens[i - window];
        let c = counts.get_mut(out).expect("token in window");
        *c -= 1;
        if *c == 0 {
            counts.remove(out);
        }
        *counts.entry(&tokens[i]).or_insert(0) += 1;
        type_sum += counts.len() as u64;
    }
    let windows = (n - window + 1) as f64;
    Ok(type_sum as f64 / (window as f64 * windows))
}

/// Lowercased surface forms of the word tokens, in order.
pub fn normalized_forms(document: &Document) -> Vec<String> {
    word_tokens(document)
        .into_iter()
        .map(|t| turkish_lowercase(&t.surface))
        .collect()
}

pub fn lexical_variation(document: &Document) -> Result<LexicalVariation> {
    let words = word_tokens(document);
    if words.is_empty() {
        return Err(Error::degenerate("document has no word tokens").in_doc(&document.doc_id));
    }
    let variation = |tag: Upos| {
        let lemmas: Vec<String> = words
            .iter()
            .filter(|t| t.upos == tag)
            .map(|t| turkish_lowercase(&t.lemma))
            .collect();
        if lemmas.is_empty() {
            0.0
        } else {
            lemmas.iter().collect::<HashSet<_>>().len() as f64 / lemmas.len() as f64
        }
    };
    let content = words
        .iter()
        .filter(|t| {
            matches!(
                t.upos,
                Upos::NOUN | Upos::PROPN | Upos::VERB | Upos::ADJ | Upos::ADV
            )
        })
        .count();
    Ok(LexicalVariation {
        noun_var: variation(Upos::NOUN),
        verb_var: variation(Upos::VERB),
        adj_var: variation(Upos::ADJ),
        adv_var: variation(Upos::ADV),
        lexical_density: content as f64 / words.len() as f64,
    })
}

/// Mean log10(freq + 1) per word and per sentence for early- and
/// late-acquired vocabulary, plus the share of words found in the early list.
pub fn psycholinguistic_frequency(
    document: &Document,
    early: &Lexicon,
    late: &Lexicon,
) -> FrequencyFeatures {
    let mut words = 0usize;
    let mut in_early = 0usize;
    let (mut early_sum, mut late_sum) = (0.0, 0.0);
    let mut sentences = 0usize;
    for s in document.word_sentences() {
        let (mut e_s, mut l_s) = (0.0, 0.0);
        for t in s.words() {
            let lemma = turkish_lowercase(&t.lemma);
            let e = (early.frequency(&lemma) + 1.0).log10();
            let l = (late.frequency(&lemma) + 1.0).log10();
            e_s += e;
            l_s += l;
            words += 1;
            if early.contains(&lemma) {
                in_early += 1;
            }
        }
        early_sum += e_s;
        late_sum += l_s;
        sentences += 1;
    }
    if words == 0 {
        return FrequencyFeatures {
            early_freq_per_word: 0.0,
            late_freq_per_word: 0.0,
            early_freq_per_sentence: 0.0,
            late_freq_per_sentence: 0.0,
            child_corpus_proportion: 0.0,
        };
    }
    let w = words as f64;
    let s = sentences as f64;
    FrequencyFeatures {
        early_freq_per_word: early_sum / w,
        late_freq_per_word: late_sum / w,
        early_freq_per_sentence: early_sum / s,
        late_freq_per_sentence: late_sum / s,
        child_corpus_proportion: in_early as f64 / w,
    }
}

/// Percentage of distinct document lemmas found in the basic word list.
pub fn familiarity_pct(document: &Document, basic_words: &Lexicon) -> Result<f64> {
    let lemmas: HashSet<String> = word_tokens(document)
        .into_iter()
        .map(|t| turkish_lowercase(&t.lemma))
        .collect();
    if lemmas.is_empty() {
        return Err(Error::degenerate("document has no word tokens").in_doc(&document.doc_id));
    }
    let known = lemmas.iter().filter(|l| basic_words.contains(l)).count();
    Ok(100.0 * known as f64 / lemmas.len() as f64)
}

pub fn extract_lxsm(
    document: &Document,
    lexicons: &Lexicons,
    mattr_window: usize,
) -> Result<LxsmFeatures> {
    let forms = normalized_forms(document);
    if forms.is_empty() {
        return Err(Error::degenerate("document has no word tokens").in_doc(&document.doc_id));
    }
    let types = forms.iter().collect::<HashSet<_>>().len();
    Ok(LxsmFeatures {
        ttr: ttr_family(types, forms.len())?,
        mattr: mattr(&forms, mattr_window)?,
        variation: lexical_variation(document)?,
        frequency: psycholinguistic_frequency(document, &lexicons.early, &lexicons.late),
        familiarity_pct: familiarity_pct(document, &lexicons.basic_words)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::testutil::{doc, doc_from_words, tok};
    use proptest::prelude::*;

    /// Brute force: distinct types in every window, enumerated independently.
    fn mattr_oracle(tokens: &[u8], w: usize) -> f64 {
        let n = tokens.len();
        if n <= w {
            let mut seen = tokens.to_vec();
            seen.sort();
            seen.dedup();
            return seen.len() as f64 / n as f64;
        }
        let mut total = 0u64;
        for start in 0..=(n - w) {
            let mut win = tokens[start..start + w].to_vec();
            win.sort();
            win.dedup();
            total += win.len() as u64;
        }
        total as f64 / (w as f64 * (n - w + 1) as f64)
    }

    #[test]
    fn ttr_values() {
        let f = ttr_family(50, 100).unwrap();
        assert_eq!(f.ttr, 0.5);
        assert_eq!(f.root_ttr, 5.0);
        assert!((f.corrected_ttr - 3.5355339059327378).abs() < 1e-12);
        assert!((f.bilog_ttr - 50f64.ln() / 100f64.ln()).abs() < 1e-12);
        // (log10 100)^2 / (log10 100 - log10 50) = 4 / log10 2
        assert!((f.uber_index - 4.0 / 2f64.log10()).abs() < 1e-9);

        let all_unique = ttr_family(20, 20).unwrap();
        assert_eq!(all_unique.ttr, 1.0);
        assert_eq!(all_unique.uber_index, 0.0);

        let single = ttr_family(1, 1).unwrap();
        assert_eq!(single.bilog_ttr, 0.0);
        assert!(ttr_family(0, 5).is_err());
        assert!(ttr_family(6, 5).is_err());
    }

    #[test]
    fn mattr_examples() {
        assert_eq!(mattr(&["a"; 60], 50).unwrap(), 1.0 / 50.0);
        let distinct: Vec<usize> = (0..60).collect();
        assert_eq!(mattr(&distinct, 50).unwrap(), 1.0);
        let v = mattr(&["a", "b", "a", "b", "c"], 3).unwrap();
        assert!((v - 7.0 / 9.0).abs() < 1e-15);
        assert!(mattr::<u8>(&[], 3).is_err());
        // short input falls back to TTR
        assert_eq!(mattr(&["a", "a", "b", "c"], 10).unwrap(), 0.75);
    }

    #[test]
    fn variation() {
        let d = doc(vec![vec![
            tok("evler", "ev", Upos::NOUN, 0, "root"),
            tok("evi", "ev", Upos::NOUN, 1, "nmod"),
            tok("sular", "su", Upos::NOUN, 1, "nmod"),
            tok("suyu", "su", Upos::NOUN, 1, "nmod"),
        ]]);
        let v = lexical_variation(&d).unwrap();
        assert_eq!(v.noun_var, 0.5);
        assert_eq!(v.adv_var, 0.0);
        assert_eq!(v.lexical_density, 1.0);

        let d = doc(vec![vec![
            tok("gel", "gel", Upos::VERB, 0, "root"),
            tok("ve", "ve", Upos::CCONJ, 1, "cc"),
            tok(".", ".", Upos::PUNCT, 1, "punct"),
        ]]);
        let v = lexical_variation(&d).unwrap();
        assert_eq!(v.lexical_density, 0.5);
        assert_eq!(v.verb_var, 1.0);
    }

    #[test]
    fn frequency_features() {
        let d = doc_from_words(&[&["kedi", "köpek"]]);
        let none = Lexicon::default();
        let f = psycholinguistic_frequency(&d, &none, &none);
        assert_eq!(f.early_freq_per_word, 0.0);
        assert_eq!(f.late_freq_per_sentence, 0.0);
        assert_eq!(f.child_corpus_proportion, 0.0);

        let early = Lexicon::from_entries("early", [("kedi", 999.0)]);
        let single = doc_from_words(&[&["Kedi"]]);
        let f = psycholinguistic_frequency(&single, &early, &none);
        assert!((f.early_freq_per_word - 3.0).abs() < 1e-12);
        assert!((f.early_freq_per_sentence - 3.0).abs() < 1e-12);

        let f = psycholinguistic_frequency(&d, &early, &none);
        assert_eq!(f.child_corpus_proportion, 0.5);
        assert!((f.early_freq_per_sentence - 3.0).abs() < 1e-12);
        assert!((f.early_freq_per_word - 1.5).abs() < 1e-12);
    }

    #[test]
    fn familiarity() {
        let d = doc_from_words(&[&["ev", "su", "yol", "kedi", "ev"]]);
        let all = Lexicon::from_words("b", ["ev", "su", "yol", "kedi"]);
        assert_eq!(familiarity_pct(&d, &all).unwrap(), 100.0);
        assert_eq!(familiarity_pct(&d, &Lexicon::default()).unwrap(), 0.0);
        let one = Lexicon::from_words("b", ["yol"]);
        assert_eq!(familiarity_pct(&d, &one).unwrap(), 25.0);
    }

    proptest! {
        #[test]
        fn mattr_matches_window_enumeration(tokens in prop::collection::vec(0u8..8, 1..120), w in 1usize..130) {
            let w = w.min(tokens.len()).max(1);
            prop_assert_eq!(mattr(&tokens, w).unwrap(), mattr_oracle(&tokens, w));
        }

        #[test]
        fn ttr_nondecreasing_in_types(n in 2usize..500, t in 1usize..500) {
            let t = t.min(n - 1).max(1);
            let a = ttr_family(t, n).unwrap();
            let b = ttr_family(t + 1, n).unwrap();
            prop_assert!(b.ttr >= a.ttr && b.root_ttr >= a.root_ttr && b.corrected_ttr >= a.corrected_ttr);
            prop_assert!(b.bilog_ttr >= a.bilog_ttr);
            if t + 1 < n {
                prop_assert!(b.uber_index >= a.uber_index);
            }
            prop_assert!(a.root_ttr >= a.ttr);
        }

        #[test]
        fn doubling_preserves_length_normalized_features(
            words in prop::collection::vec("[a-e]{1,2}", 1..160),
            w in 1usize..10,
        ) {
            let refs: Vec<&str> = words.iter().map(String::as_str).collect();
            let d = doc_from_words(&[&refs]);
            let mut dd = d.clone();
            dd.sentences.extend(d.sentences.clone());
            let lex = Lexicons {
                early: Lexicon::from_entries("e", [("a", 5.0), ("bb", 2.0)]),
                late: Lexicon::from_entries("l", [("c", 7.0)]),
                basic_words: Lexicon::from_words("b", ["a", "b", "ccc"]),
            };
            let f1 = extract_lxsm(&d, &lex, w).unwrap();
            let f2 = extract_lxsm(&dd, &lex, w).unwrap();
            // the W-1 windows straddling the seam shift the mean by at most
            // (W-1)/(2N-W+1), which is <= 1/W once N >= (W^2-1)/2
            let n = words.len();
            if 2 * n + 1 >= w * w {
                prop_assert!((f1.mattr - f2.mattr).abs() <= 1.0 / w as f64 + 1e-12);
            }
            prop_assert_eq!(f1.variation.lexical_density, f2.variation.lexical_density);
            // per-class variation is types over tokens: doubling halves it
            prop_assert_eq!(f1.variation.noun_var / 2.0, f2.variation.noun_var);
            prop_assert_eq!(f1.familiarity_pct, f2.familiarity_pct);
            prop_assert_eq!(f1.frequency.child_corpus_proportion, f2.frequency.child_corpus_proportion);
        }
    }
}
