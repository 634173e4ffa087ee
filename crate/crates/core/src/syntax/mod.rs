//! Grammars, parsers and syntax trees.

pub mod chart;
pub mod fs;
pub mod grammar;
pub mod incremental;
pub mod oracle;

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chart::Chart;
pub use fs::{unify, Fs, FsGraph};
pub use grammar::{Cat, Dir, Grammar, GrammarKind, GrammarRule};
pub use incremental::IncrementalParser;

use crate::params::ParserKind;
use grammar::{add_cat, read_cats, unify_cat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("no parse")]
    NoParse,
    #[error("empty sentence")]
    EmptySentence,
    #[error("parser `{parser}` cannot use grammar `{grammar}`")]
    Incompatible { parser: ParserKind, grammar: String },
}

/// Where a node comes from: a grammar rule (or combinator) or a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Rule(String),
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynTree {
    /// Preorder position, 0 at the root.
    pub id: usize,
    pub cat: Cat,
    /// Token indices `[start, end)`.
    pub span: (usize, usize),
    pub origin: Origin,
    pub children: Vec<SynTree>,
}

impl SynTree {
    /// Renumbers nodes in preorder.
    pub fn number(&mut self) {
        fn go(t: &mut SynTree, next: &mut usize) {
            t.id = *next;
            *next += 1;
            for c in &mut t.children {
                go(c, next);
            }
        }
        go(self, &mut 0);
    }

    /// Nodes in preorder.
    pub fn nodes(&self) -> Vec<&SynTree> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    pub fn node(&self, id: usize) -> Option<&SynTree> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().rfind(|c| c.id <= id).and_then(|c| c.node(id))
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(SynTree::size).sum::<usize>()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn word(&self) -> Option<&str> {
        match &self.origin {
            Origin::Word(w) => Some(w),
            Origin::Rule(_) => None,
        }
    }

    pub fn rule_id(&self) -> Option<&str> {
        match &self.origin {
            Origin::Rule(r) => Some(r),
            Origin::Word(_) => None,
        }
    }

    /// Node label: the category without features.
    pub fn label(&self) -> String {
        self.cat.skeleton()
    }

    /// Node id of every node paired with its parent's id.
    pub fn parents(&self) -> HashMap<usize, usize> {
        let mut out = HashMap::new();
        for n in self.nodes() {
            for c in &n.children {
                out.insert(c.id, n.id);
            }
        }
        out
    }
}

/// Lowercases and splits on whitespace, dropping sentence punctuation.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| matches!(c, '.' | ',' | '!' | '?'))
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// All complete parses.
pub fn parse(tokens: &[String], grammar: &Grammar, parser: ParserKind) -> Result<Vec<SynTree>, SyntaxError> {
    if tokens.is_empty() {
        return Err(SyntaxError::EmptySentence);
    }
    let compatible = matches!(
        (parser, grammar.kind),
        (ParserKind::Chart, GrammarKind::Psg) | (ParserKind::Incremental, GrammarKind::Cg)
    );
    if !compatible {
        return Err(SyntaxError::Incompatible {
            parser,
            grammar: grammar.id.clone(),
        });
    }
    if let Some(w) = tokens.iter().find(|w| grammar.entries(w).is_empty()) {
        return Err(SyntaxError::UnknownWord(w.clone()));
    }
    let trees = match parser {
        ParserKind::Chart => {
            let mut c = Chart::new(grammar);
            for w in tokens {
                c.push(w)?;
            }
            c.parses()
        }
        ParserKind::Incremental => {
            let mut p = IncrementalParser::new(grammar);
            for w in tokens {
                p.push(w)?;
            }
            p.parses()
        }
    };
    if trees.is_empty() {
        return Err(SyntaxError::NoParse);
    }
    Ok(trees)
}

/// Checks a tree bottom-up: each leaf category is a lexical entry of its
/// word and each inner category is what its rule or combinator builds from
/// the children's categories.
pub fn replay(grammar: &Grammar, tree: &SynTree) -> bool {
    let same = |a: &Cat, b: &Cat| a.normalized().is_some() && a.normalized() == b.normalized();
    if !tree.children.iter().all(|c| replay(grammar, c)) {
        return false;
    }
    if let Some(w) = tree.word() {
        return tree.is_leaf() && grammar.entries(w).iter().any(|e| same(e, &tree.cat));
    }
    let kids: Vec<&Cat> = tree.children.iter().map(|c| &c.cat).collect();
    let rule = tree.rule_id().unwrap_or_default();
    let rebuilt = match grammar.kind {
        GrammarKind::Cg => match kids.as_slice() {
            [l, r] => incremental::combine(rule, l, r),
            _ => None,
        },
        GrammarKind::Psg => grammar.rule(rule).and_then(|r| {
            if r.daughters.len() != kids.len() {
                return None;
            }
            let mut g = FsGraph::new();
            let mut tags = HashMap::new();
            let m = add_cat(&mut g, &r.mother, &mut tags)?;
            for (d, k) in r.daughters.iter().zip(&kids) {
                let d = add_cat(&mut g, d, &mut tags)?;
                let k = add_cat(&mut g, k, &mut HashMap::new())?;
                if !unify_cat(&mut g, &d, &k) {
                    return None;
                }
            }
            Some(read_cats(&g, &[&m]).remove(0))
        }),
    };
    let spans_ok = tree.children.first().map(|c| c.span.0) == Some(tree.span.0)
        && tree.children.last().map(|c| c.span.1) == Some(tree.span.1)
        && tree.children.windows(2).all(|w| w[0].span.1 == w[1].span.0);
    spans_ok && rebuilt.is_some_and(|c| same(&c, &tree.cat))
}

const BUNDLED: [&str; 3] = [
    include_str!("../../data/grammars/simple-psg.gram"),
    include_str!("../../data/grammars/feature-psg.gram"),
    include_str!("../../data/grammars/cg.gram"),
];

/// The grammars shipped with the library: `simple-psg`, `feature-psg`
/// and `cg`.
pub fn bundled_grammars() -> &'static [Grammar] {
    static GRAMMARS: OnceLock<Vec<Grammar>> = OnceLock::new();
    GRAMMARS.get_or_init(|| {
        BUNDLED
            .iter()
            .map(|src| Grammar::parse(src).expect("bundled grammar"))
            .collect()
    })
}

pub fn bundled_grammar(id: &str) -> Option<&'static Grammar> {
    bundled_grammars().iter().find(|g| g.id == id)
}
