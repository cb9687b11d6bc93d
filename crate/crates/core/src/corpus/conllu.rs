//! CoNLL-U reading and writing.
//!
//! Only the columns the feature extractors need are kept: FORM, LEMMA, UPOS,
//! HEAD, DEPREL and an optional `NE=<BIO>` entry in MISC. Multiword-token
//! range lines (`3-4`) and empty nodes (`3.1`) are skipped.

use std::fmt::Write as _;
use std::io::BufRead;

use super::model::{Sentence, Token, Upos};
use crate::error::{Error, Result};

const ENTITY_KEY: &str = "NE=";

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Conllu {
        line,
        msg: msg.into(),
    }
}

/// Parse CoNLL-U text into validated sentences.
pub fn parse_conllu(input: &str) -> Result<Vec<Sentence>> {
    parse_conllu_reader(input.as_bytes())
}

pub fn parse_conllu_reader<R: BufRead>(reader: R) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    let mut token_lines: Vec<usize> = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| err(line_no, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !tokens.is_empty() {
                validate(&tokens, &token_lines)?;
                sentences.push(Sentence::new(std::mem::take(&mut tokens)));
                token_lines.clear();
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(err(
                line_no,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let id: usize = id
            .parse()
            .map_err(|_| err(line_no, format!("invalid token id: {id}")))?;
        if id != tokens.len() + 1 {
            return Err(err(
                line_no,
                format!(
                    "token id {id} out of sequence, expected {}",
                    tokens.len() + 1
                ),
            ));
        }
        let upos: Upos = cols[3].parse().map_err(|e: String| err(line_no, e))?;
        let head: usize = cols[6]
            .parse()
            .map_err(|_| err(line_no, format!("non-integer HEAD: {}", cols[6])))?;
        let entity_tag = cols[9]
            .split('|')
            .find_map(|kv| kv.strip_prefix(ENTITY_KEY))
            .unwrap_or("O")
            .to_string();
        tokens.push(Token {
            surface: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos,
            head,
            deprel: cols[7].to_string(),
            entity_tag,
        });
        token_lines.push(line_no);
    }
    if !tokens.is_empty() {
        validate(&tokens, &token_lines)?;
        sentences.push(Sentence::new(tokens));
    }
    Ok(sentences)
}

/// Head range, self-loops, single root and acyclicity.
fn validate(tokens: &[Token], lines: &[usize]) -> Result<()> {
    let n = tokens.len();
    let mut root: Option<usize> = None;
    for (i, t) in tokens.iter().enumerate() {
        if t.head > n {
            return Err(err(lines[i], "head out of range"));
        }
        if t.head == i + 1 {
            return Err(err(lines[i], "token is its own head"));
        }
        if t.head == 0 {
            if root.is_some() {
                return Err(err(lines[i], "sentence has more than one root"));
            }
            root = Some(i);
        }
    }
    if root.is_none() {
        return Err(err(lines[0], "sentence has no root (cyclic heads)"));
    }
    for start in 0..n {
        let mut cur = start;
        let mut steps = 0;
        while tokens[cur].head != 0 {
            cur = tokens[cur].head - 1;
            steps += 1;
            if steps > n {
                return Err(err(lines[start], "cyclic heads"));
            }
        }
    }
    Ok(())
}

/// Serialize sentences as CoNLL-U. Columns not modelled are written as `_`.
pub fn write_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        for (i, t) in s.tokens.iter().enumerate() {
            let misc = if t.entity_tag == "O" {
                "_".to_string()
            } else {
                format!("{ENTITY_KEY}{}", t.entity_tag)
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t{}",
                i + 1,
                t.surface,
                t.lemma,
                t.upos,
                t.head,
                t.deprel,
                misc
            );
        }
        out.push('\n');
    }
    out
}
