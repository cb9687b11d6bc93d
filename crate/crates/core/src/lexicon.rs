use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::corpus::turkish_lowercase;
use crate::error::{Error, Result};

/// Lemma frequency list. Familiarity lists store frequency 1 for each entry.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    pub name: String,
    entries: HashMap<String, f64>,
}

impl Lexicon {
    pub fn from_entries<I, S>(name: &str, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut map = HashMap::new();
        for (lemma, freq) in entries {
            *map.entry(turkish_lowercase(lemma.as_ref())).or_insert(0.0) += freq;
        }
        Lexicon {
            name: name.to_string(),
            entries: map,
        }
    }

    pub fn from_words<I, S>(name: &str, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries = words
            .into_iter()
            .map(|w| (turkish_lowercase(w.as_ref()), 1.0))
            .collect::<HashMap<_, _>>();
        Lexicon {
            name: name.to_string(),
            entries,
        }
    }

    /// `lemma<TAB>count` per line. Case variants of one lemma are summed.
    pub fn load_frequencies(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (lemma, count) = line.split_once('\t').ok_or_else(|| Error::Lexicon {
                path: path.to_path_buf(),
                msg: format!("line {}: expected `lemma<TAB>count`", i + 1),
            })?;
            let count: f64 = count.trim().parse().map_err(|_| Error::Lexicon {
                path: path.to_path_buf(),
                msg: format!("line {}: invalid count `{}`", i + 1, count.trim()),
            })?;
            if !count.is_finite() || count < 0.0 {
                return Err(Error::Lexicon {
                    path: path.to_path_buf(),
                    msg: format!("line {}: count must be a finite value >= 0", i + 1),
                });
            }
            entries.push((lemma.trim().to_string(), count));
        }
        let lex = Self::from_entries(
            &path.display().to_string(),
            entries.iter().map(|(l, c)| (l, *c)),
        );
        if lex.len() < entries.len() {
            log::warn!(
                "{}: {} case-variant duplicates merged",
                path.display(),
                entries.len() - lex.len()
            );
        }
        Ok(lex)
    }

    /// One lemma per line.
    pub fn load_word_list(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_words(
            &path.display().to_string(),
            text.lines().map(str::trim).filter(|l| !l.is_empty()),
        ))
    }

    /// Frequency of an already lowercased lemma; 0 when absent.
    pub fn frequency(&self, lemma: &str) -> f64 {
        self.entries.get(lemma).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.entries.contains_key(lemma)
    }

    /// Entries in arbitrary order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
