//! Naive exhaustive recognition: expand the start symbol top-down in every
//! possible way and collect all strings up to a length bound. Strings are
//! sequences of word classes (see [`Grammar::word_classes`]).

use std::collections::{BTreeSet, HashMap};

use super::fs::FsGraph;
use super::grammar::{add_cat, unify_cat, GCat, Grammar, GrammarKind};

enum Sym {
    Word(usize),
    Cat(GCat),
}

/// Every class sequence of length at most `max_len` the phrase structure
/// grammar derives.
pub fn language(grammar: &Grammar, max_len: usize) -> BTreeSet<Vec<usize>> {
    assert_eq!(grammar.kind, GrammarKind::Psg);
    let classes = grammar.word_classes();
    let reps: Vec<&str> = classes.iter().map(|c| c[0].as_str()).collect();
    let mut g = FsGraph::new();
    let start = add_cat(&mut g, &grammar.start, &mut HashMap::new()).expect("valid start");
    let mut out = BTreeSet::new();
    expand(grammar, &reps, g, vec![Sym::Cat(start)], max_len, &mut out);
    out
}

fn expand(
    grammar: &Grammar,
    reps: &[&str],
    g: FsGraph,
    form: Vec<Sym>,
    max_len: usize,
    out: &mut BTreeSet<Vec<usize>>,
) {
    if form.len() > max_len {
        return;
    }
    let Some(k) = form.iter().position(|s| matches!(s, Sym::Cat(_))) else {
        out.insert(
            form.iter()
                .map(|s| match s {
                    Sym::Word(c) => *c,
                    Sym::Cat(_) => unreachable!(),
                })
                .collect(),
        );
        return;
    };
    let Sym::Cat(target) = &form[k] else { unreachable!() };
    let replace = |with: Vec<Sym>, form: &[Sym]| -> Vec<Sym> {
        let mut next = Vec::with_capacity(form.len() + with.len());
        for (i, s) in form.iter().enumerate() {
            if i == k {
                next.extend(with.iter().map(clone_sym));
            } else {
                next.push(clone_sym(s));
            }
        }
        next
    };
    for (c, rep) in reps.iter().enumerate() {
        for entry in grammar.entries(rep) {
            let mut g2 = g.clone();
            let Some(e) = add_cat(&mut g2, entry, &mut HashMap::new()) else {
                continue;
            };
            if unify_cat(&mut g2, target, &e) {
                expand(grammar, reps, g2, replace(vec![Sym::Word(c)], &form), max_len, out);
                break;
            }
        }
    }
    for rule in &grammar.rules {
        if rule.mother.name() != target.name() {
            continue;
        }
        let mut g2 = g.clone();
        let mut tags = HashMap::new();
        let Some(m) = add_cat(&mut g2, &rule.mother, &mut tags) else {
            continue;
        };
        let ds: Option<Vec<GCat>> = rule.daughters.iter().map(|d| add_cat(&mut g2, d, &mut tags)).collect();
        let Some(ds) = ds else { continue };
        if unify_cat(&mut g2, target, &m) {
            let with = ds.into_iter().map(Sym::Cat).collect();
            expand(grammar, reps, g2, replace(with, &form), max_len, out);
        }
    }
}

fn clone_sym(s: &Sym) -> Sym {
    match s {
        Sym::Word(c) => Sym::Word(*c),
        Sym::Cat(c) => Sym::Cat(c.clone()),
    }
}
