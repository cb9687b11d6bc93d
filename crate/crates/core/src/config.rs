//! Extraction configuration, read from a JSON file. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `score = intercept - syllables_per_word * S - words_per_sentence * W`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulaCoefficients {
    pub intercept: f64,
    pub syllables_per_word: f64,
    pub words_per_sentence: f64,
}

impl FormulaCoefficients {
    pub const ATESMAN: FormulaCoefficients = FormulaCoefficients {
        intercept: 198.825,
        syllables_per_word: 40.175,
        words_per_sentence: 2.610,
    };
    pub const CETINKAYA_UZUN: FormulaCoefficients = FormulaCoefficients {
        intercept: 118.823,
        syllables_per_word: 25.987,
        words_per_sentence: 0.971,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FormulaConfig {
    pub atesman: FormulaCoefficients,
    pub cetinkaya: FormulaCoefficients,
}

impl Default for FormulaConfig {
    fn default() -> Self {
        FormulaConfig {
            atesman: FormulaCoefficients::ATESMAN,
            cetinkaya: FormulaCoefficients::CETINKAYA_UZUN,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LexiconPaths {
    pub early: Option<PathBuf>,
    pub late: Option<PathBuf>,
    pub basic_words: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LxsmConfig {
    pub mattr_window: usize,
}

impl Default for LxsmConfig {
    fn default() -> Self {
        LxsmConfig { mattr_window: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MorphConfig {
    pub sample_size: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MorphConfig {
    fn default() -> Self {
        MorphConfig {
            sample_size: 10,
            samples: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynxConfig {
    pub np_labels: Vec<String>,
    pub vp_labels: Vec<String>,
}

impl Default for SynxConfig {
    fn default() -> Self {
        SynxConfig {
            np_labels: vec!["NP".to_string()],
            vp_labels: vec!["VP".to_string()],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub formulas: FormulaConfig,
    pub lexicons: LexiconPaths,
    pub lxsm: LxsmConfig,
    pub morph: MorphConfig,
    pub synx: SynxConfig,
}

impl Config {
    /// Load from JSON; relative lexicon paths resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Config = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.lexicons.early,
            &mut cfg.lexicons.late,
            &mut cfg.lexicons.basic_words,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lxsm.mattr_window == 0 {
            return Err(Error::Config("lxsm.mattr_window must be >= 1".into()));
        }
        if self.morph.sample_size < 2 {
            return Err(Error::Config("morph.sample_size must be >= 2".into()));
        }
        if self.morph.samples == 0 {
            return Err(Error::Config("morph.samples must be >= 1".into()));
        }
        Ok(())
    }
}
