//! Left-to-right shift-reduce parsing for categorial grammars with forward
//! and backward application and forward composition.
//!
//! After each word the parser holds every stack reachable by shifting it
//! and then reducing in all possible ways. Derivations that differ only in
//! how composition brackets the same functor chain are kept once, in the
//! most incremental (earliest reducing) form.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::chart::cat_unifies;
use super::fs::FsGraph;
use super::grammar::{add_cat, read_cats, unify_cat, Cat, Dir, GCat, Grammar, GrammarKind};
use super::{Origin, SynTree, SyntaxError};

pub const FORWARD_APPLICATION: &str = "fa";
pub const BACKWARD_APPLICATION: &str = "ba";
pub const FORWARD_COMPOSITION: &str = "fc";

/// Combinator names in the order reductions are tried.
pub const COMBINATORS: [&str; 3] = [FORWARD_APPLICATION, FORWARD_COMPOSITION, BACKWARD_APPLICATION];

#[derive(Debug)]
enum Deriv {
    Leaf(String),
    Node(&'static str, Rc<Item>, Rc<Item>),
}

#[derive(Debug)]
struct Item {
    cat: Cat,
    span: (usize, usize),
    deriv: Deriv,
    /// Normal-form key shared by spuriously ambiguous derivations.
    key: Rc<Nf>,
}

#[derive(Debug, PartialEq, Eq, Hash)]
enum Nf {
    Word(usize),
    App(Rc<Nf>, Rc<Nf>),
    Comp(Rc<Nf>, Rc<Nf>),
}

fn nf_app(f: Rc<Nf>, a: Rc<Nf>) -> Rc<Nf> {
    match &*f {
        // (f . g) a == f (g a)
        Nf::Comp(x, y) => nf_app(x.clone(), nf_app(y.clone(), a)),
        _ => Rc::new(Nf::App(f, a)),
    }
}

fn nf_comp(f: Rc<Nf>, g: Rc<Nf>) -> Rc<Nf> {
    match &*f {
        Nf::Comp(x, y) => nf_comp(x.clone(), nf_comp(y.clone(), g)),
        _ => Rc::new(Nf::Comp(f, g)),
    }
}

type Stack = Vec<Rc<Item>>;

fn stack_key(s: &Stack) -> Vec<(String, Rc<Nf>)> {
    s.iter().map(|i| (i.cat.to_string(), i.key.clone())).collect()
}

/// Applies the combinator `rule` to `left` and `right`, giving the
/// resulting category.
pub fn combine(rule: &str, left: &Cat, right: &Cat) -> Option<Cat> {
    let mut g = FsGraph::new();
    let l = add_cat(&mut g, left, &mut HashMap::new())?;
    let r = add_cat(&mut g, right, &mut HashMap::new())?;
    let out = match (rule, &l, &r) {
        ("fa", GCat::Slash(x, Dir::Forward, y), _) => unify_cat(&mut g, y, &r).then(|| (**x).clone()),
        ("ba", _, GCat::Slash(x, Dir::Backward, y)) => unify_cat(&mut g, y, &l).then(|| (**x).clone()),
        ("fc", GCat::Slash(x, Dir::Forward, y), GCat::Slash(y2, Dir::Forward, z)) => {
            unify_cat(&mut g, y, y2).then(|| GCat::Slash(x.clone(), Dir::Forward, z.clone()))
        }
        _ => None,
    }?;
    Some(read_cats(&g, &[&out]).remove(0))
}

pub struct IncrementalParser<'a> {
    grammar: &'a Grammar,
    frontiers: Vec<Vec<Stack>>,
}

impl<'a> IncrementalParser<'a> {
    pub fn new(grammar: &'a Grammar) -> Self {
        assert_eq!(
            grammar.kind,
            GrammarKind::Cg,
            "incremental parsing needs a categorial grammar"
        );
        IncrementalParser {
            grammar,
            frontiers: vec![vec![Vec::new()]],
        }
    }

    pub fn len(&self) -> usize {
        self.frontiers.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Shifts the next word onto every stack and closes under reduction.
    pub fn push(&mut self, word: &str) -> Result<(), SyntaxError> {
        let entries = self.grammar.entries(word);
        if entries.is_empty() {
            return Err(SyntaxError::UnknownWord(word.to_string()));
        }
        let pos = self.len();
        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for stack in self.frontiers.last().expect("initial frontier") {
            for cat in &entries {
                let mut s = stack.clone();
                s.push(Rc::new(Item {
                    cat: (*cat).clone(),
                    span: (pos, pos + 1),
                    deriv: Deriv::Leaf(word.to_string()),
                    key: Rc::new(Nf::Word(pos)),
                }));
                close(s, &mut next, &mut seen);
            }
        }
        self.frontiers.push(next);
        Ok(())
    }

    pub fn pop(&mut self) {
        if self.frontiers.len() > 1 {
            self.frontiers.pop();
        }
    }

    fn complete(&self) -> impl Iterator<Item = &Rc<Item>> + '_ {
        let start = &self.grammar.start;
        let n = self.len();
        self.frontiers
            .last()
            .into_iter()
            .flatten()
            .filter(move |s| n > 0 && s.len() == 1)
            .map(|s| &s[0])
            .filter(move |i| i.cat.name() == start.name() && cat_unifies(&i.cat, start))
    }

    pub fn accepts(&self) -> bool {
        self.complete().next().is_some()
    }

    pub fn parses(&self) -> Vec<SynTree> {
        self.complete()
            .map(|i| {
                let mut t = tree(i);
                t.number();
                t
            })
            .collect()
    }
}

/// Depth first: every reduction of the top two items is explored before
/// the unreduced stack is kept.
fn close(stack: Stack, out: &mut Vec<Stack>, seen: &mut HashSet<Vec<(String, Rc<Nf>)>>) {
    if !seen.insert(stack_key(&stack)) {
        return;
    }
    if stack.len() >= 2 {
        let (l, r) = (&stack[stack.len() - 2], &stack[stack.len() - 1]);
        for rule in COMBINATORS {
            if let Some(cat) = combine(rule, &l.cat, &r.cat) {
                let key = match rule {
                    FORWARD_APPLICATION => nf_app(l.key.clone(), r.key.clone()),
                    BACKWARD_APPLICATION => nf_app(r.key.clone(), l.key.clone()),
                    _ => nf_comp(l.key.clone(), r.key.clone()),
                };
                let item = Item {
                    cat,
                    span: (l.span.0, r.span.1),
                    deriv: Deriv::Node(rule, l.clone(), r.clone()),
                    key,
                };
                let mut s = stack[..stack.len() - 2].to_vec();
                s.push(Rc::new(item));
                close(s, out, seen);
            }
        }
    }
    out.push(stack);
}

fn tree(item: &Item) -> SynTree {
    let (origin, children) = match &item.deriv {
        Deriv::Leaf(w) => (Origin::Word(w.clone()), Vec::new()),
        Deriv::Node(rule, l, r) => (Origin::Rule(rule.to_string()), vec![tree(l), tree(r)]),
    };
    SynTree {
        id: 0,
        cat: item.cat.clone(),
        span: item.span,
        origin,
        children,
    }
}
