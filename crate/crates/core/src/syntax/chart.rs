//! Bottom-up chart parser for phrase structure grammars. Words are added
//! one at a time and every edge ending at the new position is computed
//! before the next word arrives, so a chart can be extended and cut back
//! like a stack.

use std::collections::{HashMap, VecDeque};

use super::fs::FsGraph;
use super::grammar::{add_cat, read_cats, unify_cat, Cat, GCat, Grammar, GrammarKind};
use super::{Origin, SynTree, SyntaxError};

struct RuleInst {
    g: FsGraph,
    mother: GCat,
    daughters: Vec<GCat>,
}

struct Passive {
    cat: Cat,
    start: usize,
    end: usize,
    origin: Origin,
    kids: Vec<usize>,
}

struct Active {
    rule: usize,
    start: usize,
    end: usize,
    g: FsGraph,
    kids: Vec<usize>,
}

pub struct Chart<'a> {
    grammar: &'a Grammar,
    insts: Vec<RuleInst>,
    by_first: HashMap<String, Vec<usize>>,
    passives: Vec<Passive>,
    actives: Vec<Active>,
    /// Active edges by end position.
    active_at: Vec<Vec<usize>>,
    marks: Vec<(usize, usize)>,
    words: Vec<String>,
}

impl<'a> Chart<'a> {
    pub fn new(grammar: &'a Grammar) -> Self {
        assert_eq!(
            grammar.kind,
            GrammarKind::Psg,
            "chart parsing needs a phrase structure grammar"
        );
        let mut insts = Vec::new();
        let mut by_first: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, r) in grammar.rules.iter().enumerate() {
            let mut g = FsGraph::new();
            let mut tags = HashMap::new();
            let mother = add_cat(&mut g, &r.mother, &mut tags).expect("validated rule");
            let daughters: Vec<GCat> = r
                .daughters
                .iter()
                .map(|d| add_cat(&mut g, d, &mut tags).expect("validated rule"))
                .collect();
            let first = daughters[0].name().unwrap_or_default().to_string();
            by_first.entry(first).or_default().push(i);
            insts.push(RuleInst { g, mother, daughters });
        }
        Chart {
            grammar,
            insts,
            by_first,
            passives: Vec::new(),
            actives: Vec::new(),
            active_at: vec![Vec::new()],
            marks: Vec::new(),
            words: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Adds the next word and all edges ending after it.
    pub fn push(&mut self, word: &str) -> Result<(), SyntaxError> {
        let entries = self.grammar.entries(word);
        if entries.is_empty() {
            return Err(SyntaxError::UnknownWord(word.to_string()));
        }
        let j = self.words.len();
        self.marks.push((self.passives.len(), self.actives.len()));
        self.words.push(word.to_string());
        self.active_at.push(Vec::new());
        let mut agenda = VecDeque::new();
        for cat in entries {
            agenda.push_back(self.passives.len());
            self.passives.push(Passive {
                cat: cat.clone(),
                start: j,
                end: j + 1,
                origin: Origin::Word(word.to_string()),
                kids: Vec::new(),
            });
        }
        while let Some(pid) = agenda.pop_front() {
            let (name, start) = {
                let p = &self.passives[pid];
                (p.cat.name().unwrap_or_default().to_string(), p.start)
            };
            let starting = self.by_first.get(&name).cloned().unwrap_or_default();
            for r in starting {
                let seed = Active {
                    rule: r,
                    start,
                    end: start,
                    g: self.insts[r].g.clone(),
                    kids: Vec::new(),
                };
                self.extend(&seed, pid, &mut agenda);
            }
            for aid in self.active_at[start].clone() {
                let a = &self.actives[aid];
                let expects = self.insts[a.rule].daughters[a.kids.len()].name();
                if expects == Some(name.as_str()) {
                    let a = Active {
                        rule: a.rule,
                        start: a.start,
                        end: a.end,
                        g: a.g.clone(),
                        kids: a.kids.clone(),
                    };
                    self.extend(&a, pid, &mut agenda);
                }
            }
        }
        Ok(())
    }

    fn extend(&mut self, a: &Active, pid: usize, agenda: &mut VecDeque<usize>) {
        let inst = &self.insts[a.rule];
        let p = &self.passives[pid];
        let mut g = a.g.clone();
        let Some(added) = add_cat(&mut g, &p.cat, &mut HashMap::new()) else {
            return;
        };
        if !unify_cat(&mut g, &inst.daughters[a.kids.len()], &added) {
            return;
        }
        let mut kids = a.kids.clone();
        kids.push(pid);
        let end = p.end;
        if kids.len() == inst.daughters.len() {
            let cat = read_cats(&g, &[&inst.mother]).remove(0);
            agenda.push_back(self.passives.len());
            self.passives.push(Passive {
                cat,
                start: a.start,
                end,
                origin: Origin::Rule(self.grammar.rules[a.rule].id.clone()),
                kids,
            });
        } else {
            self.active_at[end].push(self.actives.len());
            self.actives.push(Active {
                rule: a.rule,
                start: a.start,
                end,
                g,
                kids,
            });
        }
    }

    /// Removes the last word and every edge that depended on it.
    pub fn pop(&mut self) {
        if let Some((np, na)) = self.marks.pop() {
            self.passives.truncate(np);
            self.actives.truncate(na);
            self.active_at.pop();
            self.words.pop();
        }
    }

    fn complete(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.words.len();
        let start = &self.grammar.start;
        self.passives.iter().enumerate().filter_map(move |(i, p)| {
            let spans = p.start == 0 && p.end == n && n > 0;
            (spans && p.cat.name() == start.name() && cat_unifies(&p.cat, start)).then_some(i)
        })
    }

    pub fn accepts(&self) -> bool {
        self.complete().next().is_some()
    }

    /// Complete parses in the order their edges were built.
    pub fn parses(&self) -> Vec<SynTree> {
        self.complete()
            .map(|i| {
                let mut t = self.tree(i);
                t.number();
                t
            })
            .collect()
    }

    fn tree(&self, pid: usize) -> SynTree {
        let p = &self.passives[pid];
        SynTree {
            id: 0,
            cat: p.cat.clone(),
            span: (p.start, p.end),
            origin: p.origin.clone(),
            children: p.kids.iter().map(|&k| self.tree(k)).collect(),
        }
    }
}

pub(crate) fn cat_unifies(a: &Cat, b: &Cat) -> bool {
    let mut g = FsGraph::new();
    match (
        add_cat(&mut g, a, &mut HashMap::new()),
        add_cat(&mut g, b, &mut HashMap::new()),
    ) {
        (Some(x), Some(y)) => unify_cat(&mut g, &x, &y),
        _ => false,
    }
}
