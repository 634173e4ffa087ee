//! Categories, grammar rules, lexicons and the grammar file format.
//!
//! ```text
//! grammar feature-psg.
//! kind psg.
//! start s.
//! rule s_np_vp: s --> np[num=N] vp[num=N].
//! word every, a : det[num=sg].
//! ```
//!
//! Categorial grammars use `kind cg.`, have no `rule` lines and write
//! lexical categories with slashes: `word loves : (s\np[num=sg])/np.`

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::fs::{parse_fs, Fs, FsGraph};
use crate::datafile::FileError;
use crate::term::{Signature, TermError, TermParser};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    /// `X/Y`: argument to the right.
    Forward,
    /// `X\Y`: argument to the left.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cat {
    Basic { name: String, fs: Fs },
    Slash { result: Box<Cat>, dir: Dir, arg: Box<Cat> },
}

impl Cat {
    pub fn basic(name: &str) -> Cat {
        Cat::Basic {
            name: name.to_string(),
            fs: Fs::Any,
        }
    }

    pub fn with_fs(name: &str, fs: Fs) -> Cat {
        Cat::Basic {
            name: name.to_string(),
            fs,
        }
    }

    pub fn slash(result: Cat, dir: Dir, arg: Cat) -> Cat {
        Cat::Slash {
            result: Box::new(result),
            dir,
            arg: Box::new(arg),
        }
    }

    pub fn parse(src: &str) -> Result<Cat, TermError> {
        let sig = Signature::new();
        let mut p = TermParser::new(src, &sig)?;
        let c = parse_cat(&mut p)?;
        p.expect_end()?;
        Ok(c)
    }

    /// The category with all features dropped, e.g. `(s\np)/np`.
    pub fn skeleton(&self) -> String {
        match self {
            Cat::Basic { name, .. } => name.clone(),
            Cat::Slash { result, dir, arg } => {
                format!("{}{}{}", wrap(result, true), dir_sym(*dir), wrap(arg, true))
            }
        }
    }

    /// Features with tags renamed canonically across the whole category.
    pub fn normalized(&self) -> Option<Cat> {
        let mut g = FsGraph::new();
        let c = add_cat(&mut g, self, &mut HashMap::new())?;
        Some(read_cats(&g, &[&c]).remove(0))
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Cat::Basic { name, .. } => Some(name),
            Cat::Slash { .. } => None,
        }
    }

    pub fn features(&self) -> Option<&Fs> {
        match self {
            Cat::Basic { fs, .. } => Some(fs),
            Cat::Slash { .. } => None,
        }
    }
}

fn dir_sym(d: Dir) -> &'static str {
    match d {
        Dir::Forward => "/",
        Dir::Backward => "\\",
    }
}

fn wrap(c: &Cat, skeleton: bool) -> String {
    let s = if skeleton { c.skeleton() } else { c.to_string() };
    match c {
        Cat::Slash { .. } => format!("({s})"),
        Cat::Basic { .. } => s,
    }
}

impl fmt::Display for Cat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cat::Basic { name, fs: Fs::Any } => f.write_str(name),
            Cat::Basic { name, fs } => write!(f, "{name}{fs}"),
            Cat::Slash { result, dir, arg } => {
                write!(f, "{}{}{}", wrap(result, false), dir_sym(*dir), wrap(arg, false))
            }
        }
    }
}

/// `name`, `name[features]`, a parenthesised category, or a left
/// associative chain joined by `/` and `\`.
pub(crate) fn parse_cat(p: &mut TermParser<'_>) -> Result<Cat, TermError> {
    let mut c = cat_atom(p)?;
    loop {
        let dir = if p.eat_sym("/") {
            Dir::Forward
        } else if p.eat_sym("\\") {
            Dir::Backward
        } else {
            return Ok(c);
        };
        c = Cat::slash(c, dir, cat_atom(p)?);
    }
}

fn cat_atom(p: &mut TermParser<'_>) -> Result<Cat, TermError> {
    if p.eat_sym("(") {
        let c = parse_cat(p)?;
        p.expect_sym(")")?;
        return Ok(c);
    }
    let name = p.ident()?;
    let fs = if p.is_sym("[") { parse_fs(p)? } else { Fs::Any };
    Ok(Cat::Basic { name, fs })
}

/// A category whose features live in a shared graph.
#[derive(Debug, Clone)]
pub(crate) enum GCat {
    Basic(String, usize),
    Slash(Box<GCat>, Dir, Box<GCat>),
}

impl GCat {
    pub(crate) fn name(&self) -> Option<&str> {
        match self {
            GCat::Basic(n, _) => Some(n),
            GCat::Slash(..) => None,
        }
    }
}

pub(crate) fn add_cat(g: &mut FsGraph, c: &Cat, tags: &mut HashMap<String, usize>) -> Option<GCat> {
    Some(match c {
        Cat::Basic { name, fs } => GCat::Basic(name.clone(), g.add(fs, tags)?),
        Cat::Slash { result, dir, arg } => GCat::Slash(
            Box::new(add_cat(g, result, tags)?),
            *dir,
            Box::new(add_cat(g, arg, tags)?),
        ),
    })
}

pub(crate) fn unify_cat(g: &mut FsGraph, a: &GCat, b: &GCat) -> bool {
    match (a, b) {
        (GCat::Basic(x, na), GCat::Basic(y, nb)) => x == y && g.unify(*na, *nb),
        (GCat::Slash(ra, da, aa), GCat::Slash(rb, db, ab)) => da == db && unify_cat(g, ra, rb) && unify_cat(g, aa, ab),
        _ => false,
    }
}

fn collect_nodes(c: &GCat, out: &mut Vec<usize>) {
    match c {
        GCat::Basic(_, n) => out.push(*n),
        GCat::Slash(r, _, a) => {
            collect_nodes(r, out);
            collect_nodes(a, out);
        }
    }
}

fn rebuild(c: &GCat, fss: &mut std::vec::IntoIter<Fs>) -> Cat {
    match c {
        GCat::Basic(name, _) => Cat::Basic {
            name: name.clone(),
            fs: fss.next().expect("one structure per basic category"),
        },
        GCat::Slash(r, d, a) => {
            let r = rebuild(r, fss);
            Cat::slash(r, *d, rebuild(a, fss))
        }
    }
}

/// Reads categories out together, keeping sharing between them.
pub(crate) fn read_cats(g: &FsGraph, cats: &[&GCat]) -> Vec<Cat> {
    let mut nodes = Vec::new();
    for c in cats {
        collect_nodes(c, &mut nodes);
    }
    let mut fss = g.read(&nodes).into_iter();
    cats.iter().map(|c| rebuild(c, &mut fss)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrammarKind {
    Psg,
    Cg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarRule {
    pub id: String,
    pub mother: Cat,
    pub daughters: Vec<Cat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grammar {
    pub id: String,
    pub kind: GrammarKind,
    pub start: Cat,
    pub rules: Vec<GrammarRule>,
    /// Lexical entries in file order; a word may have several.
    pub lexicon: Vec<(String, Cat)>,
}

impl Grammar {
    pub fn entries(&self, word: &str) -> Vec<&Cat> {
        self.lexicon.iter().filter(|(w, _)| w == word).map(|(_, c)| c).collect()
    }

    pub fn words(&self) -> BTreeSet<&str> {
        self.lexicon.iter().map(|(w, _)| w.as_str()).collect()
    }

    pub fn rule(&self, id: &str) -> Option<&GrammarRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Words grouped by identical lexical entries; each group behaves the
    /// same for recognition. Groups are ordered by their first word.
    pub fn word_classes(&self) -> Vec<Vec<String>> {
        let mut by_entries: BTreeMap<Vec<String>, Vec<String>> = BTreeMap::new();
        for w in self.words() {
            let mut key: Vec<String> = self
                .entries(w)
                .iter()
                .map(|c| c.normalized().unwrap_or_else(|| (*c).clone()).to_string())
                .collect();
            key.sort();
            by_entries.entry(key).or_default().push(w.to_string());
        }
        let mut classes: Vec<Vec<String>> = by_entries.into_values().collect();
        classes.sort();
        classes
    }

    pub fn parse(src: &str) -> Result<Grammar, FileError> {
        let sig = Signature::new();
        let mut p = TermParser::new(src, &sig).map_err(|e| FileError::from_term(src, e, 0))?;
        let err = |e: TermError| FileError::from_term(src, e, 0);
        let mut id = None;
        let mut kind = None;
        let mut start = None;
        let mut rules: Vec<GrammarRule> = Vec::new();
        let mut lexicon = Vec::new();
        while !p.at_end() {
            let at = p.offset();
            let key = p.ident().map_err(err)?;
            match key.as_str() {
                "grammar" => id = Some(p.ident().map_err(err)?),
                "kind" => {
                    kind = Some(match p.ident().map_err(err)?.as_str() {
                        "psg" => GrammarKind::Psg,
                        "cg" => GrammarKind::Cg,
                        other => return Err(FileError::at(src, at, format!("unknown kind `{other}`"))),
                    })
                }
                "start" => start = Some(parse_cat(&mut p).map_err(err)?),
                "rule" => {
                    let mut rid = None;
                    if p.peek_at(1).is_some_and(|t| *t == crate::term::Tok::Sym(":")) {
                        rid = Some(p.ident().map_err(err)?);
                        p.expect_sym(":").map_err(err)?;
                    }
                    let mother = parse_cat(&mut p).map_err(err)?;
                    p.expect_sym("-->").map_err(err)?;
                    let mut daughters = vec![parse_cat(&mut p).map_err(err)?];
                    while !p.is_sym(".") {
                        daughters.push(parse_cat(&mut p).map_err(err)?);
                    }
                    let rid = rid.unwrap_or_else(|| format!("r{}", rules.len() + 1));
                    if rules.iter().any(|r| r.id == rid) {
                        return Err(FileError::at(src, at, format!("duplicate rule id `{rid}`")));
                    }
                    rules.push(GrammarRule {
                        id: rid,
                        mother,
                        daughters,
                    });
                }
                "word" => {
                    let mut words = vec![p.ident().map_err(err)?];
                    while p.eat_sym(",") {
                        words.push(p.ident().map_err(err)?);
                    }
                    p.expect_sym(":").map_err(err)?;
                    let cat = parse_cat(&mut p).map_err(err)?;
                    for w in words {
                        lexicon.push((w, cat.clone()));
                    }
                }
                other => return Err(FileError::at(src, at, format!("unknown statement `{other}`"))),
            }
            p.expect_sym(".").map_err(err)?;
        }
        let missing = |what: &str| FileError::at(src, src.len(), format!("missing `{what}` line"));
        let g = Grammar {
            id: id.ok_or_else(|| missing("grammar"))?,
            kind: kind.ok_or_else(|| missing("kind"))?,
            start: start.ok_or_else(|| missing("start"))?,
            rules,
            lexicon,
        };
        g.validate().map_err(|m| FileError::at(src, 0, m))?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), String> {
        match self.kind {
            GrammarKind::Cg if !self.rules.is_empty() => return Err("categorial grammars take no rules".into()),
            GrammarKind::Psg => {
                let slashed = |c: &Cat| matches!(c, Cat::Slash { .. });
                for r in &self.rules {
                    if slashed(&r.mother) || r.daughters.iter().any(slashed) {
                        return Err(format!("rule `{}` uses a slash category", r.id));
                    }
                    let mut g = FsGraph::new();
                    let mut tags = HashMap::new();
                    let ok = add_cat(&mut g, &r.mother, &mut tags).is_some()
                        && r.daughters.iter().all(|d| add_cat(&mut g, d, &mut tags).is_some());
                    if !ok {
                        return Err(format!("rule `{}` has inconsistent features", r.id));
                    }
                }
                if let Some(cycle) = self.unary_cycle() {
                    return Err(format!("unary rule cycle through `{cycle}`"));
                }
            }
            GrammarKind::Cg => {}
        }
        for (w, c) in &self.lexicon {
            if c.normalized().is_none() {
                return Err(format!("entry for `{w}` has inconsistent features"));
            }
        }
        Ok(())
    }

    fn unary_cycle(&self) -> Option<String> {
        let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for r in &self.rules {
            if let ([d], Some(m)) = (r.daughters.as_slice(), r.mother.name()) {
                edges.entry(d.name()?).or_default().push(m);
            }
        }
        for &from in edges.keys() {
            let mut seen = BTreeSet::new();
            let mut stack = vec![from];
            while let Some(n) = stack.pop() {
                for &m in edges.get(n).map(Vec::as_slice).unwrap_or(&[]) {
                    if m == from {
                        return Some(from.to_string());
                    }
                    if seen.insert(m) {
                        stack.push(m);
                    }
                }
            }
        }
        None
    }

    /// The file text; parsing it gives back an equal grammar.
    pub fn to_text(&self) -> String {
        let kind = match self.kind {
            GrammarKind::Psg => "psg",
            GrammarKind::Cg => "cg",
        };
        let mut out = format!("grammar {}.\nkind {kind}.\nstart {}.\n", self.id, self.start);
        for r in &self.rules {
            let ds: Vec<String> = r.daughters.iter().map(Cat::to_string).collect();
            out.push_str(&format!("rule {}: {} --> {}.\n", r.id, r.mother, ds.join(" ")));
        }
        for (w, c) in &self.lexicon {
            out.push_str(&format!("word {w} : {c}.\n"));
        }
        out
    }
}
