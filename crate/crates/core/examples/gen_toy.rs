//! Regenerate the bundled toy corpus: `cargo run --example gen_toy -- <dir>`.

use std::path::PathBuf;

use trread::synth::{generate, write_corpus, SynthSpec};

fn main() -> trread::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("crates/core/tests/data/toy"));
    let docs = generate(&SynthSpec::default())?;
    let written = write_corpus(&dir, &docs)?;
    println!(
        "{} documents, manifest {}",
        docs.len(),
        written.manifest.display()
    );
    Ok(())
}
