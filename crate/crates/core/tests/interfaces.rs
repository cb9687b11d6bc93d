//! Input formats produced by the annotation pipeline: CoNLL-U with `NE=`
//! entity tags in MISC, bracketed tree files and the corpus manifest.

use std::fs;
use std::path::Path;

use trread::commands::{corpus_stats, corpus_stats_text};
use trread::config::Config;
use trread::corpus::{load_document, load_manifest, parse_conllu, parse_tree_lines, ReadingLevel};
use trread::features::disco::{entity_mentions, extract_disco};
use trread::features::synx::constituency_depths;
use trread::Error;

const DOC: &str = "\
# sent_id = 1
# text = Ali Ankara'ya gitti.
1\tAli\tAli\tPROPN\t_\t_\t3\tnsubj\t_\tNE=B-PER
2\tAnkara'ya\tAnkara\tPROPN\t_\t_\t3\tobl\t_\tSpaceAfter=No|NE=B-LOC
3\tgitti\tgit\tVERB\t_\t_\t0\troot\t_\tSpaceAfter=No
4\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_

# sent_id = 2
1-2\tMustafa Kemal\t_\t_\t_\t_\t_\t_\t_\t_
1\tMustafa\tMustafa\tPROPN\t_\t_\t3\tnsubj\t_\tNE=B-PER
2\tKemal\tKemal\tPROPN\t_\t_\t1\tflat\t_\tNE=I-PER
2.1\tx\tx\tX\t_\t_\t_\t_\t_\t_
3\tgeldi\tgel\tVERB\t_\t_\t0\troot\t_\t_
4\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_
";

const TREES: &str = "\
(S (NP (PROPN Ali)) (VP (NP (PROPN Ankara'ya)) (VERB gitti)) (PUNCT .))

";

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn conllu_with_entities_and_skipped_lines() {
    let sentences = parse_conllu(DOC).unwrap();
    assert_eq!(sentences.len(), 2);
    assert_eq!(sentences[1].tokens.len(), 4);
    let t = &sentences[0].tokens[1];
    assert_eq!(t.surface, "Ankara'ya");
    assert_eq!(t.lemma, "Ankara");
    assert_eq!(t.head, 3);
    assert_eq!(t.entity_tag, "B-LOC");
    assert_eq!(sentences[0].tokens[2].entity_tag, "O");
}

#[test]
fn entity_mentions_from_bio_tags() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "d.conllu", DOC);
    let doc = load_document(
        "d",
        ReadingLevel::Elementary,
        &dir.path().join("d.conllu"),
        None,
    )
    .unwrap();
    let m = entity_mentions(&doc);
    assert_eq!(m.len(), 3);
    assert_eq!(m[2].tokens, vec![0, 1]);
    assert_eq!(m[2].entity_type, "PER");
    let f = extract_disco(&doc).unwrap();
    // 3 mentions, 2 sentences, 6 words, 4 entity words
    assert!((f.entities_per_sentence - 1.5).abs() < 1e-12);
    assert!((f.entities_per100w - 50.0).abs() < 1e-12);
    assert!((f.unique_entity_ratio - 1.0).abs() < 1e-12);
    assert!((f.entity_token_proportion - 4.0 / 6.0).abs() < 1e-12);
}

#[test]
fn malformed_conllu_reports_line() {
    let bad =
        "1\tkedi\tkedi\tNOUN\t_\t_\t0\troot\t_\t_\n2\tuyudu\tuyu\tVERB\t_\t_\t0\troot\t_\t_\n";
    match parse_conllu(bad) {
        Err(Error::Conllu { line, msg }) => {
            assert_eq!(line, 2);
            assert!(msg.contains("more than one root"), "{msg}");
        }
        other => panic!("expected a CoNLL-U error, got {other:?}"),
    }
    assert!(matches!(
        parse_conllu("1\tkedi\tNOUN\n"),
        Err(Error::Conllu { line: 1, .. })
    ));
}

#[test]
fn tree_file_aligns_with_sentences() {
    let trees = parse_tree_lines(TREES).unwrap();
    assert_eq!(trees.len(), 2);
    assert!(trees[1].is_none());
    let root = trees[0].as_ref().unwrap();
    assert_eq!(root.label, "S");
    assert_eq!(root.leaf_count(), 4);
    assert_eq!(root.depth(), 4);

    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "d.conllu", DOC);
    write(dir.path(), "d.trees", TREES);
    let doc = load_document(
        "d",
        ReadingLevel::Advanced,
        &dir.path().join("d.conllu"),
        Some(&dir.path().join("d.trees")),
    )
    .unwrap();
    assert!(doc.sentences[0].const_tree.is_some());
    assert!(doc.sentences[1].const_tree.is_none());
    assert!(constituency_depths(&doc).is_some());
}

#[test]
fn malformed_tree_is_rejected() {
    assert!(matches!(
        parse_tree_lines("(S (NP a)"),
        Err(Error::Tree { .. })
    ));
    assert!(matches!(
        parse_tree_lines("(S (NP a)))"),
        Err(Error::Tree { .. })
    ));
}

#[test]
fn manifest_resolves_relative_paths_and_optional_trees() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("docs")).unwrap();
    write(&dir.path().join("docs"), "a.conllu", DOC);
    write(&dir.path().join("docs"), "a.trees", TREES);
    write(&dir.path().join("docs"), "b.conllu", DOC);
    write(
        dir.path(),
        "manifest.csv",
        "doc_id,level,conllu_path,trees_path\na,ELE,docs/a.conllu,docs/a.trees\nb,ADV,docs/b.conllu,\n",
    );
    let corpus = load_manifest(&dir.path().join("manifest.csv")).unwrap();
    assert_eq!(corpus.documents.len(), 2);
    assert_eq!(corpus.documents[1].level, ReadingLevel::Advanced);
    assert!(corpus.documents[0].sentences[0].const_tree.is_some());
    assert!(corpus.documents[1].sentences[0].const_tree.is_none());
    let counts = corpus.manifest.level_counts();
    assert_eq!(counts[&ReadingLevel::Intermediate], 0);
}

#[test]
fn manifest_reports_every_bad_row() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.conllu", DOC);
    write(
        dir.path(),
        "manifest.csv",
        "doc_id,level,conllu_path\na,ELE,a.conllu\na,INT,a.conllu\nb,HARD,a.conllu\nc,INT,missing.conllu\n",
    );
    match load_manifest(&dir.path().join("manifest.csv")) {
        Err(Error::Manifest(problems)) => {
            assert_eq!(problems.len(), 3, "{problems:?}");
            assert!(problems[0].contains("duplicate doc_id"));
            assert!(problems[1].contains("unknown level"));
            assert!(problems[2].contains("missing.conllu"));
        }
        other => panic!("expected manifest error, got {other:?}"),
    }
}

#[test]
fn corpus_stats_per_level() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.conllu", DOC);
    let one =
        "1\tKedi\tkedi\tNOUN\t_\t_\t2\tnsubj\t_\t_\n2\tuyudu\tuyu\tVERB\t_\t_\t0\troot\t_\t_\n";
    write(dir.path(), "b.conllu", one);
    write(
        dir.path(),
        "manifest.csv",
        "doc_id,level,conllu_path\na,ELE,a.conllu\nb,ELE,b.conllu\nc,ADV,b.conllu\n",
    );
    let corpus = load_manifest(&dir.path().join("manifest.csv")).unwrap();
    let stats = corpus_stats(&corpus.documents, &Config::default()).unwrap();
    assert_eq!(stats.len(), 2);
    let ele = &stats[0];
    assert_eq!(ele.level, ReadingLevel::Elementary);
    assert_eq!(ele.documents, 2);
    assert!((ele.mean_words - 4.0).abs() < 1e-12);
    // sample standard deviation of {6, 2}
    assert!((ele.std_words - 8f64.sqrt()).abs() < 1e-12);
    let adv = &stats[1];
    assert_eq!(adv.std_words, 0.0);
    // "Kedi uyudu": 2 words, 1 sentence, 5 syllables (ke-di u-yu-du)
    let expected = 198.825 - 40.175 * 2.5 - 2.610 * 2.0;
    assert!((adv.mean_atesman - expected).abs() < 1e-9);
    assert!((adv.mean_ttr - 1.0).abs() < 1e-12);
    let text = corpus_stats_text(&stats);
    assert!(text.contains("ELE") && text.contains("ADV") && !text.contains("INT"));

    assert!(corpus_stats(&[], &Config::default()).is_err());
}
