//! Reader for one-per-line bracketed constituency trees such as
//! `(S (NP (N ev)) (VP (V var)))`.

use super::model::ConstituencyNode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(line: &str) -> Vec<(usize, Lexeme<'_>)> {
    let mut out = Vec::new();
    let mut atom_start: Option<(usize, usize)> = None; // (byte, char)
    let mut chars = line.char_indices().enumerate().peekable();
    while let Some((ci, (bi, c))) = chars.next() {
        let is_delim = c == '(' || c == ')' || c.is_whitespace();
        if is_delim {
            if let Some((b0, c0)) = atom_start.take() {
                out.push((c0, Lexeme::Atom(&line[b0..bi])));
            }
            match c {
                '(' => out.push((ci, Lexeme::Open)),
                ')' => out.push((ci, Lexeme::Close)),
                _ => {}
            }
        } else if atom_start.is_none() {
            atom_start = Some((bi, ci));
        }
        if chars.peek().is_none() {
            if let Some((b0, c0)) = atom_start.take() {
                out.push((c0, Lexeme::Atom(&line[b0..])));
            }
        }
    }
    out
}

fn tree_err(offset: usize, msg: &str) -> Error {
    Error::Tree {
        offset,
        msg: msg.to_string(),
    }
}

struct Parser<'a> {
    lexemes: Vec<(usize, Lexeme<'a>)>,
    pos: usize,
    end_offset: usize,
}

impl<'a> Parser<'a> {
    fn offset(&self) -> usize {
        self.lexemes
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.end_offset)
    }

    fn node(&mut self) -> Result<ConstituencyNode> {
        let open_at = self.offset();
        match self.lexemes.get(self.pos) {
            Some((_, Lexeme::Open)) => self.pos += 1,
            Some((o, _)) => return Err(tree_err(*o, "expected '('")),
            None => return Err(tree_err(open_at, "unbalanced parentheses")),
        }
        let label = match self.lexemes.get(self.pos) {
            Some((_, Lexeme::Atom(a))) => {
                self.pos += 1;
                a.to_string()
            }
            _ => String::new(),
        };
        let mut children = Vec::new();
        let mut leaves: Vec<(usize, &str)> = Vec::new();
        loop {
            match self.lexemes.get(self.pos) {
                None => return Err(tree_err(self.end_offset, "unbalanced parentheses")),
                Some((_, Lexeme::Close)) => {
                    self.pos += 1;
                    break;
                }
                Some((_, Lexeme::Open)) => children.push(self.node()?),
                Some((o, Lexeme::Atom(a))) => {
                    leaves.push((*o, a));
                    self.pos += 1;
                }
            }
        }
        match (leaves.as_slice(), children.is_empty()) {
            ([], true) => Err(tree_err(open_at, "empty node")),
            ([(_, leaf)], true) => Ok(ConstituencyNode::leaf(label, *leaf)),
            ([], false) => {
                // Penn-style unlabeled wrapper `( (S ...) )`
                if label.is_empty() && children.len() == 1 {
                    Ok(children.pop().expect("one child"))
                } else {
                    Ok(ConstituencyNode::inner(label, children))
                }
            }
            ([(o, _), ..], true) => Err(tree_err(*o, "node has more than one leaf")),
            ([(o, _), ..], false) => Err(tree_err(*o, "node mixes leaves and subtrees")),
        }
    }
}

/// Parse a single bracketed tree.
pub fn parse_bracketed_tree(line: &str) -> Result<ConstituencyNode> {
    let lexemes = lex(line);
    if lexemes.is_empty() {
        return Err(tree_err(0, "empty node"));
    }
    let mut parser = Parser {
        lexemes,
        pos: 0,
        end_offset: line.chars().count(),
    };
    let root = parser.node()?;
    if let Some((o, lx)) = parser.lexemes.get(parser.pos) {
        let msg = if *lx == Lexeme::Close {
            "unbalanced parentheses"
        } else {
            "trailing content after tree"
        };
        return Err(tree_err(*o, msg));
    }
    Ok(root)
}

/// Parse a trees file: line i holds the tree of sentence i, blank = none.
pub fn parse_tree_lines(text: &str) -> Result<Vec<Option<ConstituencyNode>>> {
    text.lines()
        .map(|l| {
            if l.trim().is_empty() {
                Ok(None)
            } else {
                parse_bracketed_tree(l).map(Some)
            }
        })
        .collect()
}
