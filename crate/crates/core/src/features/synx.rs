//! Syntactic features: phrase counts, dependency-relation and POS
//! distributions, dependency and constituency tree depths.

use std::collections::HashSet;

use crate::config::SynxConfig;
use crate::corpus::{Document, Sentence, Upos};
use crate::error::{Error, Result};

/// Universal Dependencies v2 relation inventory (base labels).
pub const UD_RELATIONS: [&str; 37] = [
    "acl",
    "advcl",
    "advmod",
    "amod",
    "appos",
    "aux",
    "case",
    "cc",
    "ccomp",
    "clf",
    "compound",
    "conj",
    "cop",
    "csubj",
    "dep",
    "det",
    "discourse",
    "dislocated",
    "expl",
    "fixed",
    "flat",
    "goeswith",
    "iobj",
    "list",
    "mark",
    "nmod",
    "nsubj",
    "nummod",
    "obj",
    "obl",
    "orphan",
    "parataxis",
    "punct",
    "reparandum",
    "root",
    "vocative",
    "xcomp",
];

pub const PHRASE_NAMES: [&str; 5] = [
    "np_per_sentence",
    "vp_per_sentence",
    "np_per_word",
    "vp_per_word",
    "mean_np_len",
];
pub const DEPTH_NAMES: [&str; 4] = [
    "mean_dep_depth",
    "max_dep_depth",
    "mean_const_depth",
    "max_const_depth",
];

/// Feature names in extraction order.
pub fn names() -> Vec<String> {
    let mut out: Vec<String> = PHRASE_NAMES.iter().map(|s| s.to_string()).collect();
    out.extend(UD_RELATIONS.iter().map(|r| format!("dep_prop_{r}")));
    out.push("dep_prop_other".to_string());
    out.extend(DEPTH_NAMES.iter().map(|s| s.to_string()));
    out.extend(Upos::ALL.iter().map(|t| format!("pos_prop_{t}")));
    out
}

/// Which source the phrase counts came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhraseSource {
    Constituency,
    Dependency,
    Mixed,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhraseFeatures {
    pub np_per_sentence: f64,
    pub vp_per_sentence: f64,
    pub np_per_word: f64,
    pub vp_per_word: f64,
    pub mean_np_len: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynxFeatures {
    pub phrases: PhraseFeatures,
    pub phrase_source: PhraseSource,
    /// Aligned with `UD_RELATIONS`, plus a trailing `other` bucket.
    pub dep_prop: Vec<f64>,
    pub mean_dep_depth: f64,
    pub max_dep_depth: f64,
    pub mean_const_depth: f64,
    pub max_const_depth: f64,
    /// False when no sentence carries a constituency tree.
    pub const_depth_present: bool,
    /// Aligned with `Upos::ALL`.
    pub pos_prop: Vec<f64>,
}

impl SynxFeatures {
    pub fn values(&self) -> Vec<f64> {
        let p = &self.phrases;
        let mut v = vec![
            p.np_per_sentence,
            p.vp_per_sentence,
            p.np_per_word,
            p.vp_per_word,
            p.mean_np_len,
        ];
        v.extend(&self.dep_prop);
        v.extend([
            self.mean_dep_depth,
            self.max_dep_depth,
            self.mean_const_depth,
            self.max_const_depth,
        ]);
        v.extend(&self.pos_prop);
        v
    }

    /// Per-value absence flags, aligned with `values()`.
    pub fn absent(&self) -> Vec<bool> {
        let mut a = vec![false; 5 + UD_RELATIONS.len() + 1 + 2];
        a.extend([!self.const_depth_present, !self.const_depth_present]);
        a.extend(std::iter::repeat_n(false, Upos::ALL.len()));
        a
    }
}

/// Mean and maximum over sentences of the deepest token's arc distance to root.
pub fn dependency_depths(document: &Document) -> (f64, f64) {
    let depths: Vec<usize> = document
        .sentences
        .iter()
        .map(|s| s.token_depths().into_iter().max().unwrap_or(0))
        .collect();
    mean_max(&depths)
}

/// Mean and maximum tree depth over sentences that carry a tree, or `None`
/// when none does.
pub fn constituency_depths(document: &Document) -> Option<(f64, f64)> {
    let depths: Vec<usize> = document
        .sentences
        .iter()
        .filter_map(|s| s.const_tree.as_ref().map(|t| t.depth()))
        .collect();
    if depths.is_empty() {
        None
    } else {
        Some(mean_max(&depths))
    }
}

fn mean_max(values: &[usize]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let sum: usize = values.iter().sum();
    let max = *values.iter().max().expect("non-empty");
    (sum as f64 / values.len() as f64, max as f64)
}

fn is_nominal(u: Upos) -> bool {
    matches!(u, Upos::NOUN | Upos::PROPN | Upos::PRON)
}

fn is_verbal(u: Upos) -> bool {
    u == Upos::VERB
}

/// Maximal dependency phrases: subtrees rooted at a token of the class with no
/// ancestor of the same class. Returned as token-index sets (0-based).
pub fn dependency_phrases(sentence: &Sentence, class: fn(Upos) -> bool) -> Vec<Vec<usize>> {
    let children = sentence.children();
    // walk top-down from the root
    let mut stack: Vec<(usize, bool)> = sentence
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.head == 0)
        .map(|(i, _)| (i, false))
        .collect();
    let mut phrases = Vec::new();
    while let Some((i, above)) = stack.pop() {
        let in_class = class(sentence.tokens[i].upos);
        if in_class && !above {
            phrases.push(subtree(&children, i));
        }
        for &c in &children[i] {
            stack.push((c, above || in_class));
        }
    }
    phrases.sort();
    phrases
}

fn subtree(children: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut out = vec![root];
    let mut i = 0;
    while i < out.len() {
        out.extend(&children[out[i]]);
        i += 1;
    }
    out.sort_unstable();
    out
}

pub fn phrase_features(document: &Document, config: &SynxConfig) -> (PhraseFeatures, PhraseSource) {
    let np_labels: HashSet<&str> = config.np_labels.iter().map(String::as_str).collect();
    let vp_labels: HashSet<&str> = config.vp_labels.iter().map(String::as_str).collect();
    let (mut np, mut vp, mut np_tokens) = (0usize, 0usize, 0usize);
    let (mut from_tree, mut from_deps) = (0usize, 0usize);
    let mut words = 0usize;
    for s in &document.sentences {
        words += s.word_count();
        if let Some(tree) = &s.const_tree {
            from_tree += 1;
            tree.walk(&mut |node| {
                if np_labels.contains(node.label.as_str()) {
                    np += 1;
                    np_tokens += node.leaf_count();
                }
                if vp_labels.contains(node.label.as_str()) {
                    vp += 1;
                }
            });
        } else {
            from_deps += 1;
            let nps = dependency_phrases(s, is_nominal);
            np += nps.len();
            np_tokens += nps.iter().map(Vec::len).sum::<usize>();
            vp += dependency_phrases(s, is_verbal).len();
        }
    }
    let source = match (from_tree, from_deps) {
        (0, 0) => PhraseSource::None,
        (_, 0) => PhraseSource::Constituency,
        (0, _) => PhraseSource::Dependency,
        _ => PhraseSource::Mixed,
    };
    if words == 0 {
        return (PhraseFeatures::default(), source);
    }
    let sents = document.sentences.len() as f64;
    let w = words as f64;
    let features = PhraseFeatures {
        np_per_sentence: np as f64 / sents,
        vp_per_sentence: vp as f64 / sents,
        np_per_word: np as f64 / w,
        vp_per_word: vp as f64 / w,
        mean_np_len: if np == 0 {
            0.0
        } else {
            np_tokens as f64 / np as f64
        },
    };
    (features, source)
}

/// Share of all tokens per base relation (subtypes folded), aligned with
/// `UD_RELATIONS` plus a trailing bucket for unknown labels.
pub fn dependency_distribution(document: &Document) -> Result<Vec<f64>> {
    let total = document.token_count();
    if total == 0 {
        return Err(Error::degenerate("document has no tokens").in_doc(&document.doc_id));
    }
    let mut counts = vec![0usize; UD_RELATIONS.len() + 1];
    for t in document.tokens() {
        let base = t.base_deprel().to_ascii_lowercase();
        let idx = UD_RELATIONS
            .iter()
            .position(|r| *r == base)
            .unwrap_or(UD_RELATIONS.len());
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / total as f64)
        .collect())
}

/// Share of all tokens (punctuation included) per UPOS tag.
pub fn pos_distribution(document: &Document) -> Result<Vec<f64>> {
    let total = document.token_count();
    if total == 0 {
        return Err(Error::degenerate("document has no tokens").in_doc(&document.doc_id));
    }
    let mut counts = vec![0usize; Upos::ALL.len()];
    for t in document.tokens() {
        counts[t.upos.index()] += 1;
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / total as f64)
        .collect())
}

pub fn extract_synx(document: &Document, config: &SynxConfig) -> Result<SynxFeatures> {
    let (phrases, phrase_source) = phrase_features(document, config);
    let (mean_dep_depth, max_dep_depth) = dependency_depths(document);
    let const_depths = constituency_depths(document);
    let (mean_const_depth, max_const_depth) = const_depths.unwrap_or((0.0, 0.0));
    Ok(SynxFeatures {
        phrases,
        phrase_source,
        dep_prop: dependency_distribution(document)?,
        mean_dep_depth,
        max_dep_depth,
        mean_const_depth,
        max_const_depth,
        const_depth_present: const_depths.is_some(),
        pos_prop: pos_distribution(document)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_bracketed_tree;
    use crate::features::testutil::{doc, tok};
    use proptest::prelude::*;

    fn rel_index(r: &str) -> usize {
        UD_RELATIONS.iter().position(|x| *x == r).unwrap()
    }

    #[test]
    fn inventory_sizes() {
        assert_eq!(UD_RELATIONS.len(), 37);
        assert_eq!(names().len(), 5 + 38 + 4 + 17);
        let unique: HashSet<_> = names().into_iter().collect();
        assert_eq!(unique.len(), 64);
    }

    #[test]
    fn dep_depths() {
        let single = doc(vec![vec![tok("ev", "ev", Upos::NOUN, 0, "root")]]);
        assert_eq!(dependency_depths(&single), (0.0, 0.0));

        let chain = vec![
            tok("a", "a", Upos::NOUN, 0, "root"),
            tok("b", "b", Upos::NOUN, 1, "nmod"),
            tok("c", "c", Upos::NOUN, 2, "nmod"),
            tok("d", "d", Upos::NOUN, 3, "nmod"),
        ];
        assert_eq!(dependency_depths(&doc(vec![chain.clone()])), (3.0, 3.0));

        let depth2 = vec![
            tok("a", "a", Upos::NOUN, 0, "root"),
            tok("b", "b", Upos::NOUN, 1, "nmod"),
            tok("c", "c", Upos::NOUN, 2, "nmod"),
        ];
        let mut depth4 = chain;
        depth4.push(tok("e", "e", Upos::NOUN, 4, "nmod"));
        assert_eq!(dependency_depths(&doc(vec![depth2, depth4])), (3.0, 4.0));
    }

    #[test]
    fn const_depths() {
        let mut d = doc(vec![
            vec![tok("kedi", "kedi", Upos::NOUN, 0, "root")],
            vec![tok("ev", "ev", Upos::NOUN, 0, "root")],
        ]);
        assert_eq!(constituency_depths(&d), None);
        let f = extract_synx(&d, &SynxConfig::default()).unwrap();
        assert!(!f.const_depth_present);
        assert_eq!((f.mean_const_depth, f.max_const_depth), (0.0, 0.0));
        assert_eq!(f.absent().iter().filter(|&&a| a).count(), 2);

        d.sentences[0].const_tree = Some(parse_bracketed_tree("(X kedi)").unwrap());
        assert_eq!(constituency_depths(&d), Some((1.0, 1.0)));
        d.sentences[1].const_tree =
            Some(parse_bracketed_tree("(S (NP (N ev)) (VP (V var)))").unwrap());
        assert_eq!(constituency_depths(&d), Some((2.0, 3.0)));
    }

    #[test]
    fn dependency_phrase_fallback() {
        // ev (NOUN, child of root) var (VERB, root)
        let d = doc(vec![vec![
            tok("ev", "ev", Upos::NOUN, 2, "nsubj"),
            tok("var", "var", Upos::VERB, 0, "root"),
        ]]);
        let (p, src) = phrase_features(&d, &SynxConfig::default());
        assert_eq!(src, PhraseSource::Dependency);
        assert_eq!(p.np_per_sentence, 1.0);
        assert_eq!(p.vp_per_sentence, 1.0);
        assert_eq!(p.np_per_word, 0.5);
        assert_eq!(p.mean_np_len, 1.0);

        // evin kapısı: evin <- kapısı
        let d = doc(vec![vec![
            tok("evin", "ev", Upos::NOUN, 2, "nmod:poss"),
            tok("kapısı", "kapı", Upos::NOUN, 0, "root"),
        ]]);
        let (p, _) = phrase_features(&d, &SynxConfig::default());
        assert_eq!(p.np_per_sentence, 1.0);
        assert_eq!(p.mean_np_len, 2.0);

        let punct = doc(vec![vec![
            tok(".", ".", Upos::PUNCT, 0, "root"),
            tok("!", "!", Upos::PUNCT, 1, "punct"),
        ]]);
        let (p, _) = phrase_features(&punct, &SynxConfig::default());
        assert_eq!(p, PhraseFeatures::default());
    }

    #[test]
    fn constituency_phrases() {
        let mut d = doc(vec![vec![
            tok("ev", "ev", Upos::NOUN, 2, "nsubj"),
            tok("var", "var", Upos::VERB, 0, "root"),
        ]]);
        d.sentences[0].const_tree =
            Some(parse_bracketed_tree("(S (NP (N ev)) (VP (V var)))").unwrap());
        let (p, src) = phrase_features(&d, &SynxConfig::default());
        assert_eq!(src, PhraseSource::Constituency);
        assert_eq!((p.np_per_sentence, p.vp_per_sentence), (1.0, 1.0));

        let cfg = SynxConfig {
            np_labels: vec!["NP".into(), "N".into()],
            vp_labels: vec![],
        };
        let (p, _) = phrase_features(&d, &cfg);
        assert_eq!((p.np_per_sentence, p.vp_per_sentence), (2.0, 0.0));
    }

    #[test]
    fn distributions() {
        let d = doc(vec![vec![tok("ev", "ev", Upos::NOUN, 0, "root")]]);
        let dp = dependency_distribution(&d).unwrap();
        assert_eq!(dp[rel_index("root")], 1.0);
        assert_eq!(dp.iter().sum::<f64>(), 1.0);

        let mut toks = vec![tok("a", "a", Upos::VERB, 0, "root")];
        for i in 0..9 {
            let rel = if i < 3 { "nsubj" } else { "obl:tmod" };
            toks.push(tok("x", "x", Upos::NOUN, 1, rel));
        }
        let dp = dependency_distribution(&doc(vec![toks])).unwrap();
        assert!((dp[rel_index("nsubj")] - 0.3).abs() < 1e-12);
        assert!((dp[rel_index("obl")] - 0.6).abs() < 1e-12);

        let weird = doc(vec![vec![
            tok("a", "a", Upos::VERB, 0, "root"),
            tok("b", "b", Upos::NOUN, 1, "made_up"),
        ]]);
        let dp = dependency_distribution(&weird).unwrap();
        assert_eq!(dp[UD_RELATIONS.len()], 0.5);

        let five = doc(vec![vec![
            tok("a", "a", Upos::VERB, 0, "root"),
            tok("b", "b", Upos::NOUN, 1, "obj"),
            tok("c", "c", Upos::NOUN, 1, "obj"),
            tok("d", "d", Upos::NOUN, 1, "obj"),
            tok(".", ".", Upos::PUNCT, 1, "punct"),
        ]]);
        let pp = pos_distribution(&five).unwrap();
        assert!((pp[Upos::PUNCT.index()] - 0.2).abs() < 1e-12);
        assert!((pp.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    /// Random dependency trees: each token attaches to an earlier one.
    fn arb_sentence() -> impl Strategy<Value = Vec<crate::corpus::Token>> {
        prop::collection::vec((0usize..1000, 0usize..17, 0usize..40), 1..15).prop_map(|spec| {
            spec.iter()
                .enumerate()
                .map(|(i, &(h, pos, rel))| {
                    let head = if i == 0 { 0 } else { 1 + h % i };
                    let deprel = if i == 0 {
                        "root".to_string()
                    } else if rel < 37 {
                        UD_RELATIONS[rel].to_string()
                    } else {
                        format!("nmod:sub{rel}")
                    };
                    tok("w", "w", Upos::ALL[pos], head, &deprel)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn sums_and_disjoint_phrases(sents in prop::collection::vec(arb_sentence(), 1..5)) {
            let d = doc(sents);
            let f = extract_synx(&d, &SynxConfig::default()).unwrap();
            prop_assert!((f.dep_prop.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!((f.pos_prop.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(f.max_dep_depth >= f.mean_dep_depth);
            for s in &d.sentences {
                let max = s.token_depths().into_iter().max().unwrap();
                prop_assert!(max < s.tokens.len());
                for class in [is_nominal as fn(Upos) -> bool, is_verbal] {
                    let phrases = dependency_phrases(s, class);
                    let mut seen = HashSet::new();
                    for p in &phrases {
                        for &i in p {
                            prop_assert!(seen.insert(i), "token {} in two phrases", i);
                        }
                    }
                }
            }
        }
    }
}
