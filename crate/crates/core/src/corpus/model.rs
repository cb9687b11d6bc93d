use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The 17 Universal Dependencies part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum Upos {
    ADJ,
    ADP,
    ADV,
    AUX,
    CCONJ,
    DET,
    INTJ,
    NOUN,
    NUM,
    PART,
    PRON,
    PROPN,
    PUNCT,
    SCONJ,
    SYM,
    VERB,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::ADJ,
        Upos::ADP,
        Upos::ADV,
        Upos::AUX,
        Upos::CCONJ,
        Upos::DET,
        Upos::INTJ,
        Upos::NOUN,
        Upos::NUM,
        Upos::PART,
        Upos::PRON,
        Upos::PROPN,
        Upos::PUNCT,
        Upos::SCONJ,
        Upos::SYM,
        Upos::VERB,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::ADJ => "ADJ",
            Upos::ADP => "ADP",
            Upos::ADV => "ADV",
            Upos::AUX => "AUX",
            Upos::CCONJ => "CCONJ",
            Upos::DET => "DET",
            Upos::INTJ => "INTJ",
            Upos::NOUN => "NOUN",
            Upos::NUM => "NUM",
            Upos::PART => "PART",
            Upos::PRON => "PRON",
            Upos::PROPN => "PROPN",
            Upos::PUNCT => "PUNCT",
            Upos::SCONJ => "SCONJ",
            Upos::SYM => "SYM",
            Upos::VERB => "VERB",
            Upos::X => "X",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Punctuation and symbols are not words.
    pub fn is_word(self) -> bool {
        !matches!(self, Upos::PUNCT | Upos::SYM)
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Upos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Upos::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown UPOS tag: {s}"))
    }
}

/// Reading level, ordered by difficulty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReadingLevel {
    #[serde(rename = "ELE")]
    Elementary,
    #[serde(rename = "INT")]
    Intermediate,
    #[serde(rename = "ADV")]
    Advanced,
}

impl ReadingLevel {
    pub const ALL: [ReadingLevel; 3] = [
        ReadingLevel::Elementary,
        ReadingLevel::Intermediate,
        ReadingLevel::Advanced,
    ];
    pub const COUNT: usize = 3;

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Option<Self> {
        Self::ALL.get(ordinal).copied()
    }

    pub fn code(self) -> &'static str {
        match self {
            ReadingLevel::Elementary => "ELE",
            ReadingLevel::Intermediate => "INT",
            ReadingLevel::Advanced => "ADV",
        }
    }
}

impl fmt::Display for ReadingLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ReadingLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ELE" => Ok(ReadingLevel::Elementary),
            "INT" => Ok(ReadingLevel::Intermediate),
            "ADV" => Ok(ReadingLevel::Advanced),
            other => Err(format!("unknown level: {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub upos: Upos,
    /// 1-based index of the head token, 0 for the sentence root.
    pub head: usize,
    pub deprel: String,
    /// BIO entity tag, `O` outside entities.
    pub entity_tag: String,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.upos.is_word()
    }

    /// Relation label with any `:subtype` removed.
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }
}

/// A node of a bracketed constituency tree. Preterminals carry the word in
/// `leaf_surface` and have no children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstituencyNode {
    pub label: String,
    pub children: Vec<ConstituencyNode>,
    pub leaf_surface: Option<String>,
}

impl ConstituencyNode {
    pub fn leaf(label: impl Into<String>, surface: impl Into<String>) -> Self {
        ConstituencyNode {
            label: label.into(),
            children: Vec::new(),
            leaf_surface: Some(surface.into()),
        }
    }

    pub fn inner(label: impl Into<String>, children: Vec<ConstituencyNode>) -> Self {
        ConstituencyNode {
            label: label.into(),
            children,
            leaf_surface: None,
        }
    }

    /// Longest root-to-leaf path, counted in nodes.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn leaf_count(&self) -> usize {
        if self.leaf_surface.is_some() {
            1
        } else {
            self.children.iter().map(|c| c.leaf_count()).sum()
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a ConstituencyNode)) {
        visit(self);
        for c in &self.children {
            c.walk(visit);
        }
    }
}

impl fmt::Display for ConstituencyNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        if let Some(leaf) = &self.leaf_surface {
            write!(f, " {leaf}")?;
        }
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub const_tree: Option<ConstituencyNode>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence {
            tokens,
            const_tree: None,
        }
    }

    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_word())
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    /// Arc distance of every token to the root (root itself is 0).
    /// Assumes a validated tree.
    pub fn token_depths(&self) -> Vec<usize> {
        let n = self.tokens.len();
        let mut depth: Vec<Option<usize>> = vec![None; n];
        for start in 0..n {
            let mut path = Vec::new();
            let mut cur = start;
            let base = loop {
                if let Some(d) = depth[cur] {
                    break d + 1;
                }
                let head = self.tokens[cur].head;
                path.push(cur);
                if head == 0 {
                    break 0;
                }
                cur = head - 1;
                if path.len() > n {
                    // cyclic input; validation should have rejected it
                    break 0;
                }
            };
            // the last node on the path sits at depth `base`
            for (k, &idx) in path.iter().rev().enumerate() {
                depth[idx] = Some(base + k);
            }
        }
        depth.into_iter().map(|d| d.unwrap_or(0)).collect()
    }

    /// Children lists by 0-based token index.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.tokens.len()];
        for (i, t) in self.tokens.iter().enumerate() {
            if t.head > 0 {
                out[t.head - 1].push(i);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub level: ReadingLevel,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// Sentences that contain at least one word.
    pub fn word_sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.sentences.iter().filter(|s| s.words().next().is_some())
    }
}
