//! Seeded generator of annotated documents with a controllable signal per
//! feature group. Used for tests, benchmarks and the bundled toy corpus.
//!
//! Each document of level `c` draws one latent score per group,
//! `z_g = c + Normal(0, noise)`, and only that group's surface properties
//! depend on `z_g`:
//!
//! - TRAD: sentence length and syllables per word
//! - LXSM: word repetition and the share of rare (late-acquired) stems
//! - SYNX: depth of a dependency chain inside each sentence
//! - MORPH: number of distinct suffixes (consonant-only, so syllables are unchanged)
//! - DISCO: share of nouns tagged as named entities (the tag is the only change)

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::{Config, LexiconPaths};
use crate::corpus::{
    write_conllu, ConstituencyNode, Document, ReadingLevel, Sentence, Token, Upos,
};
use crate::error::{Error, Result};
use crate::features::lxsm::Lexicons;
use crate::features::morph::fnv1a;
use crate::lexicon::Lexicon;
use crate::matrix::FeatureGroup;

const CONSONANTS: &[char] = &[
    'b', 'c', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'y', 'z',
];
const VOWELS: &[char] = &['a', 'e', 'ı', 'i', 'o', 'ö', 'u', 'ü'];
const SUFFIXES: &[&str] = &[
    "", "n", "m", "k", "t", "s", "nk", "mt", "ns", "rk", "lt", "nd",
];
const STEMS_PER_LENGTH: usize = 60;
const MAX_SYLLABLES: usize = 5;
const VOCAB_SEED: u64 = 0x0005_eed0_f70c;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub docs_per_level: usize,
    /// Standard deviation of each group's latent score around the level ordinal.
    pub noise: f64,
    /// Groups whose latent score ignores the level (pure noise).
    pub silent_groups: Vec<FeatureGroup>,
    /// Share of documents that get constituency trees.
    pub tree_fraction: f64,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            docs_per_level: 10,
            noise: 0.15,
            silent_groups: Vec::new(),
            tree_fraction: 0.5,
            min_sentences: 6,
            max_sentences: 10,
            seed: 0,
        }
    }
}

/// Stems split into frequent ("easy") and rare ("hard") pools, by syllable count.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub easy: Vec<Vec<String>>,
    pub hard: Vec<Vec<String>>,
}

impl Vocabulary {
    pub fn standard() -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(VOCAB_SEED);
        let mut seen = std::collections::HashSet::new();
        let mut pool = |rng: &mut ChaCha8Rng| -> Vec<Vec<String>> {
            (1..=MAX_SYLLABLES)
                .map(|k| {
                    let mut out = Vec::new();
                    while out.len() < STEMS_PER_LENGTH {
                        let mut s = String::new();
                        for _ in 0..k {
                            s.push(*CONSONANTS.choose(rng).unwrap());
                            s.push(*VOWELS.choose(rng).unwrap());
                        }
                        if rng.gen_bool(0.5) {
                            s.push(*CONSONANTS.choose(rng).unwrap());
                        }
                        if seen.insert(s.clone()) {
                            out.push(s);
                        }
                    }
                    out
                })
                .collect()
        };
        let easy = pool(&mut rng);
        let hard = pool(&mut rng);
        Vocabulary { easy, hard }
    }

    /// Early lexicon holds the easy stems, late lexicon the hard ones, and the
    /// basic word list half of the easy stems.
    pub fn lexicons(&self) -> Lexicons {
        let mut rng = ChaCha8Rng::seed_from_u64(VOCAB_SEED + 1);
        let early: Vec<(String, f64)> = self
            .easy
            .iter()
            .flatten()
            .map(|s| (s.clone(), rng.gen_range(200..5000) as f64))
            .collect();
        let late: Vec<(String, f64)> = self
            .hard
            .iter()
            .flatten()
            .map(|s| (s.clone(), rng.gen_range(5..400) as f64))
            .collect();
        let basic: Vec<&String> = self
            .easy
            .iter()
            .flat_map(|v| v.iter().take(STEMS_PER_LENGTH / 2))
            .collect();
        Lexicons {
            early: Lexicon::from_entries("early", early),
            late: Lexicon::from_entries("late", late),
            basic_words: Lexicon::from_words("basic", basic),
        }
    }
}

struct Latent {
    trad: f64,
    lxsm: f64,
    synx: f64,
    morph: f64,
    disco: f64,
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.02, 0.98)
}

/// Generate `3 * docs_per_level` documents, levels interleaved.
pub fn generate(spec: &SynthSpec) -> Result<Vec<Document>> {
    if spec.noise < 0.0 || !spec.noise.is_finite() {
        return Err(Error::InvalidArgument(
            "noise must be finite and >= 0".into(),
        ));
    }
    if spec.min_sentences == 0 || spec.max_sentences < spec.min_sentences {
        return Err(Error::InvalidArgument("invalid sentence range".into()));
    }
    let vocab = Vocabulary::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.noise.max(1e-12)).expect("valid sd");
    let mut docs = Vec::with_capacity(3 * spec.docs_per_level);
    for i in 0..spec.docs_per_level {
        for level in ReadingLevel::ALL {
            let c = level.ordinal() as f64;
            let z = |g: FeatureGroup, rng: &mut ChaCha8Rng| {
                let center = if spec.silent_groups.contains(&g) {
                    rng.gen_range(0..3) as f64
                } else {
                    c
                };
                center
                    + if spec.noise > 0.0 {
                        normal.sample(rng)
                    } else {
                        0.0
                    }
            };
            let latent = Latent {
                trad: z(FeatureGroup::Trad, &mut rng),
                lxsm: z(FeatureGroup::Lxsm, &mut rng),
                synx: z(FeatureGroup::Synx, &mut rng),
                morph: z(FeatureGroup::Morph, &mut rng),
                disco: z(FeatureGroup::Disco, &mut rng),
            };
            let doc_id = format!("{}-{:04}", level.code().to_ascii_lowercase(), i);
            let with_trees = rng.gen_bool(spec.tree_fraction.clamp(0.0, 1.0));
            docs.push(document(
                doc_id, level, &latent, with_trees, spec, &vocab, &mut rng,
            ));
        }
    }
    Ok(docs)
}

fn document(
    doc_id: String,
    level: ReadingLevel,
    z: &Latent,
    with_trees: bool,
    spec: &SynthSpec,
    vocab: &Vocabulary,
    rng: &mut ChaCha8Rng,
) -> Document {
    let n_sent = rng.gen_range(spec.min_sentences..=spec.max_sentences);
    let syll_p = clamp01(0.15 + 0.17 * z.trad);
    let len_dist = Normal::new(5.0 + 3.0 * z.trad, 1.5).expect("valid sd");
    let repeat_p = clamp01(0.5 - 0.17 * z.lxsm);
    let hard_p = clamp01(0.1 + 0.3 * z.lxsm);
    let n_suffixes =
        ((1.5 + 3.0 * z.morph).round() as i64).clamp(1, SUFFIXES.len() as i64) as usize;
    let entity_p = (0.03 + 0.08 * z.disco).clamp(0.0, 0.6);

    let mut used: Vec<Vec<String>> = vec![Vec::new(); MAX_SYLLABLES];
    let mut sentences = Vec::with_capacity(n_sent);
    for _ in 0..n_sent {
        let n_words = (len_dist.sample(rng).round() as i64).max(3) as usize;
        let chain_depth = ((1.0 + 1.5 * z.synx + rng.gen_range(-0.5..0.5)).round() as i64)
            .clamp(1, n_words as i64 - 1) as usize;

        let mut tokens = Vec::with_capacity(n_words + 1);
        for w in 0..n_words {
            let syllables = 1
                + (0..MAX_SYLLABLES - 1)
                    .filter(|_| rng.gen_bool(syll_p))
                    .count();
            let slot = &mut used[syllables - 1];
            let stem = if !slot.is_empty() && rng.gen_bool(repeat_p) {
                slot.choose(rng).unwrap().clone()
            } else {
                let pool = if rng.gen_bool(hard_p) {
                    &vocab.hard
                } else {
                    &vocab.easy
                };
                let s = pool[syllables - 1].choose(rng).unwrap().clone();
                slot.push(s.clone());
                s
            };
            let upos = if w == n_words - 1 {
                Upos::VERB
            } else {
                *[
                    Upos::NOUN,
                    Upos::NOUN,
                    Upos::NOUN,
                    Upos::ADJ,
                    Upos::ADJ,
                    Upos::VERB,
                    Upos::ADV,
                    Upos::PRON,
                ]
                .choose(rng)
                .unwrap()
            };
            let suffix = match upos {
                Upos::NOUN | Upos::VERB | Upos::ADJ => {
                    SUFFIXES[(fnv1a(&stem) % n_suffixes as u64) as usize]
                }
                _ => "",
            };
            let entity_tag = if upos == Upos::NOUN && rng.gen_bool(entity_p) {
                ["B-PER", "B-LOC", "B-ORG"].choose(rng).unwrap().to_string()
            } else {
                "O".to_string()
            };
            tokens.push(Token {
                surface: format!("{stem}{suffix}"),
                lemma: stem,
                upos,
                head: 0,
                deprel: String::new(),
                entity_tag,
            });
        }
        // the final verb is the root; the `chain_depth` words before it form a
        // chain, every other word hangs off the root
        let root = n_words;
        for w in 0..n_words - 1 {
            let pos1 = w + 1;
            let in_chain = pos1 + chain_depth >= root;
            let head = if in_chain { pos1 + 1 } else { root };
            let t = &mut tokens[w];
            t.head = head;
            t.deprel = if in_chain {
                match t.upos {
                    Upos::VERB => "advcl",
                    Upos::ADJ => "amod",
                    Upos::ADV => "advmod",
                    _ => "nmod",
                }
            } else {
                match t.upos {
                    Upos::NOUN => ["nsubj", "obj", "obl"][w % 3],
                    Upos::ADJ => "amod",
                    Upos::ADV => "advmod",
                    Upos::PRON => "nsubj",
                    _ => "advcl",
                }
            }
            .to_string();
        }
        tokens[n_words - 1].deprel = "root".into();
        tokens.push(Token {
            surface: ".".into(),
            lemma: ".".into(),
            upos: Upos::PUNCT,
            head: root,
            deprel: "punct".into(),
            entity_tag: "O".into(),
        });
        let mut s = Sentence::new(tokens);
        if with_trees {
            s.const_tree = Some(constituency_from_dependencies(&s));
        }
        sentences.push(s);
    }
    Document {
        doc_id,
        level,
        sentences,
    }
}

/// A bracketed tree mirroring the dependency structure: each head with
/// dependents becomes a phrase (NP for nominals, VP for verbs).
pub fn constituency_from_dependencies(sentence: &Sentence) -> ConstituencyNode {
    fn build(s: &Sentence, children: &[Vec<usize>], i: usize) -> ConstituencyNode {
        let t = &s.tokens[i];
        let leaf = ConstituencyNode::leaf(t.upos.as_str(), t.surface.clone());
        if children[i].is_empty() {
            return leaf;
        }
        let label = match t.upos {
            Upos::NOUN | Upos::PROPN | Upos::PRON => "NP",
            Upos::VERB | Upos::AUX => "VP",
            Upos::ADJ => "ADJP",
            _ => "XP",
        };
        let mut kids: Vec<(usize, ConstituencyNode)> = children[i]
            .iter()
            .map(|&c| (c, build(s, children, c)))
            .collect();
        kids.push((i, leaf));
        kids.sort_by_key(|k| k.0);
        ConstituencyNode::inner(label, kids.into_iter().map(|k| k.1).collect())
    }
    let children = sentence.children();
    let roots: Vec<usize> = (0..sentence.tokens.len())
        .filter(|&i| sentence.tokens[i].head == 0)
        .collect();
    ConstituencyNode::inner(
        "S",
        roots
            .iter()
            .map(|&r| build(sentence, &children, r))
            .collect(),
    )
}

/// Where `write_corpus` put things.
#[derive(Debug, Clone)]
pub struct WrittenCorpus {
    pub manifest: PathBuf,
    pub config: PathBuf,
}

/// Write documents as CoNLL-U (+ trees), a manifest, the lexicons and a
/// config referencing them.
pub fn write_corpus(dir: &Path, documents: &[Document]) -> Result<WrittenCorpus> {
    let docs_dir = dir.join("docs");
    fs::create_dir_all(&docs_dir).map_err(|e| Error::io(&docs_dir, e))?;
    let write = |p: PathBuf, text: &str| fs::write(&p, text).map_err(|e| Error::io(&p, e));

    let mut manifest = String::from("doc_id,level,conllu_path,trees_path\n");
    for d in documents {
        let conllu = format!("docs/{}.conllu", d.doc_id);
        write(dir.join(&conllu), &write_conllu(&d.sentences))?;
        let trees = if d.sentences.iter().any(|s| s.const_tree.is_some()) {
            let rel = format!("docs/{}.trees", d.doc_id);
            let mut text = String::new();
            for s in &d.sentences {
                if let Some(t) = &s.const_tree {
                    write!(text, "{t}").unwrap();
                }
                text.push('\n');
            }
            write(dir.join(&rel), &text)?;
            rel
        } else {
            String::new()
        };
        writeln!(
            manifest,
            "{},{},{},{}",
            d.doc_id,
            d.level.code(),
            conllu,
            trees
        )
        .unwrap();
    }
    let manifest_path = dir.join("manifest.csv");
    write(manifest_path.clone(), &manifest)?;

    let lex = Vocabulary::standard().lexicons();
    let tsv = |l: &Lexicon| {
        let mut rows: Vec<(&str, f64)> = l.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        rows.iter()
            .map(|(w, c)| format!("{w}\t{c}\n"))
            .collect::<String>()
    };
    write(dir.join("early.tsv"), &tsv(&lex.early))?;
    write(dir.join("late.tsv"), &tsv(&lex.late))?;
    let mut basic: Vec<&str> = lex.basic_words.iter().map(|(w, _)| w).collect();
    basic.sort();
    write(
        dir.join("basic_words.txt"),
        &basic.iter().map(|w| format!("{w}\n")).collect::<String>(),
    )?;

    let config = Config {
        lexicons: LexiconPaths {
            early: Some("early.tsv".into()),
            late: Some("late.tsv".into()),
            basic_words: Some("basic_words.txt".into()),
        },
        ..Default::default()
    };
    let config_path = dir.join("config.json");
    write(
        config_path.clone(),
        &(serde_json::to_string_pretty(&config)? + "\n"),
    )?;
    Ok(WrittenCorpus {
        manifest: manifest_path,
        config: config_path,
    })
}

/// Count of documents per level, for quick checks.
pub fn level_counts(documents: &[Document]) -> HashMap<ReadingLevel, usize> {
    let mut m = HashMap::new();
    for d in documents {
        *m.entry(d.level).or_default() += 1;
    }
    m
}
