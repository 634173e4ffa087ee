//! Combination recipes, keyed on rule ids or on category patterns.
//!
//! ```text
//! mapping rule-to-rule.
//! recipe s : app(d1, up(d2)) for il.
//!
//! mapping template.
//! template X --> X/Y Y : app(d1, d2).
//! ```

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SemmapError;
use crate::datafile::FileError;
use crate::params::{FormalismId, MappingKind};
use crate::syntax::grammar::parse_cat;
use crate::syntax::{Cat, SynTree};
use crate::term::{all_names, fresh_name, type_of, Signature, Term, TermError, TermParser, Var};

/// How daughter meanings are put together. `D(i)` is the i-th daughter,
/// counting from 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recipe {
    D(usize),
    App(Box<Recipe>, Box<Recipe>),
    Up(Box<Recipe>),
    Merge(Box<Recipe>, Box<Recipe>),
    /// `compose(f, g)` builds `lam(z, app(f, app(g, z)))`.
    Compose(Box<Recipe>, Box<Recipe>),
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::D(i) => write!(f, "d{}", i + 1),
            Recipe::App(a, b) => write!(f, "app({a}, {b})"),
            Recipe::Up(a) => write!(f, "up({a})"),
            Recipe::Merge(a, b) => write!(f, "merge({a}, {b})"),
            Recipe::Compose(a, b) => write!(f, "compose({a}, {b})"),
        }
    }
}

impl Recipe {
    fn daughters(&self, out: &mut Vec<usize>) {
        match self {
            Recipe::D(i) => out.push(*i),
            Recipe::Up(a) => a.daughters(out),
            Recipe::App(a, b) | Recipe::Merge(a, b) | Recipe::Compose(a, b) => {
                a.daughters(out);
                b.daughters(out);
            }
        }
    }

    /// Builds the unreduced combination of `kids`.
    pub fn build(&self, kids: &[Term]) -> Result<Term, TermError> {
        Ok(match self {
            Recipe::D(i) => kids.get(*i).cloned().ok_or_else(|| TermError::IllTyped {
                path: Vec::new(),
                reason: format!("recipe uses daughter {} of {}", i + 1, kids.len()),
            })?,
            Recipe::App(a, b) => Term::app(a.build(kids)?, b.build(kids)?),
            Recipe::Up(a) => Term::up(a.build(kids)?),
            Recipe::Merge(a, b) => Term::merge(a.build(kids)?, b.build(kids)?),
            Recipe::Compose(a, b) => {
                let (f, g) = (a.build(kids)?, b.build(kids)?);
                let gty = type_of(&g)?;
                let dom = gty.domain().cloned().ok_or_else(|| TermError::IllTyped {
                    path: Vec::new(),
                    reason: format!("cannot compose with a term of type {gty}"),
                })?;
                let mut avoid = all_names(&f);
                avoid.extend(all_names(&g));
                let z = Var::new(fresh_name("z", &avoid), dom);
                Term::lam(z.clone(), Term::app(f, Term::app(g, Term::Var(z))))
            }
        })
    }
}

fn parse_recipe(p: &mut TermParser<'_>) -> Result<Recipe, TermError> {
    let name = p.ident()?;
    if let Some(n) = name.strip_prefix('d').and_then(|n| n.parse::<usize>().ok()) {
        if n == 0 {
            return p.error("daughters are numbered from d1");
        }
        return Ok(Recipe::D(n - 1));
    }
    p.expect_sym("(")?;
    let mut args = vec![parse_recipe(p)?];
    while p.eat_sym(",") {
        args.push(parse_recipe(p)?);
    }
    p.expect_sym(")")?;
    let two = |args: Vec<Recipe>, p: &TermParser<'_>| -> Result<(Box<Recipe>, Box<Recipe>), TermError> {
        match <[Recipe; 2]>::try_from(args) {
            Ok([a, b]) => Ok((Box::new(a), Box::new(b))),
            Err(_) => p.error(format!("`{name}` takes two arguments")),
        }
    };
    match name.as_str() {
        "app" if args.len() >= 2 => {
            let mut it = args.into_iter();
            let first = it.next().expect("non-empty");
            Ok(it.fold(first, |f, a| Recipe::App(Box::new(f), Box::new(a))))
        }
        "up" if args.len() == 1 => Ok(Recipe::Up(Box::new(args.into_iter().next().expect("one argument")))),
        "merge" => two(args, p).map(|(a, b)| Recipe::Merge(a, b)),
        "compose" => two(args, p).map(|(a, b)| Recipe::Compose(a, b)),
        _ => p.error(format!("unknown recipe form `{name}`")),
    }
}

/// Category pattern; capitalised basic names are variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub mother: Cat,
    pub daughters: Vec<Cat>,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds: Vec<String> = self.daughters.iter().map(Cat::skeleton).collect();
        write!(f, "{} --> {}", self.mother.skeleton(), ds.join(" "))
    }
}

fn is_var(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase())
}

fn match_cat(pat: &Cat, cat: &Cat, env: &mut HashMap<String, String>) -> bool {
    match (pat, cat) {
        (Cat::Basic { name, .. }, _) if is_var(name) => {
            let sk = cat.skeleton();
            match env.get(name) {
                Some(bound) => *bound == sk,
                None => {
                    env.insert(name.clone(), sk);
                    true
                }
            }
        }
        (Cat::Basic { name: a, .. }, Cat::Basic { name: b, .. }) => a == b,
        (
            Cat::Slash {
                result: r1,
                dir: d1,
                arg: a1,
            },
            Cat::Slash {
                result: r2,
                dir: d2,
                arg: a2,
            },
        ) => d1 == d2 && match_cat(r1, r2, env) && match_cat(a1, a2, env),
        _ => false,
    }
}

impl Pattern {
    pub fn matches(&self, node: &SynTree) -> bool {
        if node.children.len() != self.daughters.len() {
            return false;
        }
        let mut env = HashMap::new();
        match_cat(&self.mother, &node.cat, &mut env)
            && self
                .daughters
                .iter()
                .zip(&node.children)
                .all(|(p, c)| match_cat(p, &c.cat, &mut env))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Key {
    Rule(String),
    Shape(Pattern),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeLine {
    pub key: Key,
    /// Empty means every formalism.
    pub formalisms: Vec<FormalismId>,
    pub recipe: Recipe,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingStrategy {
    pub kind: MappingKind,
    pub lines: Vec<RecipeLine>,
}

impl MappingStrategy {
    /// The recipe for `node`: lines restricted to `formalism` win over
    /// unrestricted ones, then file order decides.
    pub fn recipe_for(&self, node: &SynTree, formalism: FormalismId) -> Result<&Recipe, SemmapError> {
        let hits = |l: &&RecipeLine| match &l.key {
            Key::Rule(id) => node.rule_id() == Some(id.as_str()),
            Key::Shape(p) => p.matches(node),
        };
        let specific = self
            .lines
            .iter()
            .filter(hits)
            .find(|l| l.formalisms.contains(&formalism));
        specific
            .or_else(|| self.lines.iter().filter(hits).find(|l| l.formalisms.is_empty()))
            .map(|l| &l.recipe)
            .ok_or_else(|| SemmapError::NoRecipe(self.describe(node)))
    }

    fn describe(&self, node: &SynTree) -> String {
        match self.kind {
            MappingKind::RuleToRule => node.rule_id().unwrap_or("<leaf>").to_string(),
            MappingKind::Template => {
                let ds: Vec<String> = node.children.iter().map(SynTree::label).collect();
                format!("{} --> {}", node.label(), ds.join(" "))
            }
        }
    }

    pub fn parse(src: &str) -> Result<MappingStrategy, FileError> {
        let sig = Signature::new();
        let mut p = TermParser::new(src, &sig).map_err(|e| FileError::from_term(src, e, 0))?;
        let mut kind = None;
        let mut lines = Vec::new();
        while !p.at_end() {
            let at = p.offset();
            let err = |e: TermError| FileError::from_term(src, e, at);
            let stmt = p.ident().map_err(err)?;
            let key = match stmt.as_str() {
                "mapping" => {
                    let k = p.ident().map_err(err)?;
                    kind = Some(k.parse::<MappingKind>().map_err(|m| FileError::at(src, at, m))?);
                    p.expect_sym(".").map_err(err)?;
                    continue;
                }
                "recipe" => Key::Rule(p.ident().map_err(err)?),
                "template" => {
                    let mother = parse_cat(&mut p).map_err(err)?;
                    p.expect_sym("-->").map_err(err)?;
                    let mut daughters = vec![parse_cat(&mut p).map_err(err)?];
                    while !p.is_sym(":") {
                        daughters.push(parse_cat(&mut p).map_err(err)?);
                    }
                    Key::Shape(Pattern { mother, daughters })
                }
                other => return Err(FileError::at(src, at, format!("unknown statement `{other}`"))),
            };
            p.expect_sym(":").map_err(err)?;
            let recipe = parse_recipe(&mut p).map_err(err)?;
            let mut formalisms = Vec::new();
            if p.peek().is_some_and(|t| *t == crate::term::Tok::Ident("for".into())) {
                p.ident().map_err(err)?;
                loop {
                    let f = p.ident().map_err(err)?;
                    formalisms.push(f.parse::<FormalismId>().map_err(|m| FileError::at(src, at, m))?);
                    if !p.eat_sym(",") {
                        break;
                    }
                }
            }
            p.expect_sym(".").map_err(err)?;
            let mut used = Vec::new();
            recipe.daughters(&mut used);
            let arity = match &key {
                Key::Shape(pat) => Some(pat.daughters.len()),
                Key::Rule(_) => None,
            };
            let mut sorted = used.clone();
            sorted.sort_unstable();
            let expected: Vec<usize> = (0..arity.unwrap_or(used.len())).collect();
            if sorted != expected {
                return Err(FileError::at(src, at, "a recipe must use each daughter exactly once"));
            }
            let clash = lines.iter().any(|l: &RecipeLine| {
                l.key == key
                    && (l.formalisms.is_empty() && formalisms.is_empty()
                        || l.formalisms.iter().any(|f| formalisms.contains(f)))
            });
            if clash {
                return Err(FileError::at(src, at, "two recipes for the same key and formalism"));
            }
            lines.push(RecipeLine {
                key,
                formalisms,
                recipe,
            });
        }
        Ok(MappingStrategy {
            kind: kind.ok_or_else(|| FileError::at(src, src.len(), "missing `mapping` line"))?,
            lines,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("mapping {}.\n", self.kind);
        for l in &self.lines {
            let key = match &l.key {
                Key::Rule(id) => format!("recipe {id}"),
                Key::Shape(p) => format!("template {p}"),
            };
            let fs = if l.formalisms.is_empty() {
                String::new()
            } else {
                let names: Vec<&str> = l.formalisms.iter().map(|f| f.name()).collect();
                format!(" for {}", names.join(", "))
            };
            out.push_str(&format!("{key} : {}{fs}.\n", l.recipe));
        }
        out
    }
}
