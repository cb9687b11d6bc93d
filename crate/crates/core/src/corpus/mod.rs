//! Document model and the readers for annotated input.

pub mod conllu;
pub mod manifest;
pub mod model;
pub mod text;
pub mod tree;

pub use conllu::{parse_conllu, parse_conllu_reader, write_conllu};
pub use manifest::{load_document, load_manifest, Corpus, CorpusManifest, ManifestRow};
pub use model::{ConstituencyNode, Document, ReadingLevel, Sentence, Token, Upos};
pub use text::{syllable_count, turkish_lowercase, word_tokens};
pub use tree::{parse_bracketed_tree, parse_tree_lines};
