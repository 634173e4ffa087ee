//! Feature structures with reentrancy and graph unification.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{Signature, TermError, TermParser, Tok};

/// A feature structure as written. Every occurrence of the same tag
/// denotes the same node; tags are scoped to the enclosing structure (or
/// to a whole grammar rule or lexical entry).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Fs {
    #[default]
    Any,
    Atom(String),
    Map(BTreeMap<String, Fs>),
    Tagged(String, Box<Fs>),
}

impl Fs {
    pub fn atom(s: &str) -> Fs {
        Fs::Atom(s.to_string())
    }

    pub fn map<'a>(pairs: impl IntoIterator<Item = (&'a str, Fs)>) -> Fs {
        Fs::Map(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn tag(name: &str, value: Fs) -> Fs {
        Fs::Tagged(name.to_string(), Box::new(value))
    }

    pub fn is_any(&self) -> bool {
        matches!(self, Fs::Any)
    }

    pub fn parse(src: &str) -> Result<Fs, TermError> {
        let sig = Signature::new();
        let mut p = TermParser::new(src, &sig)?;
        let fs = parse_fs(&mut p)?;
        p.expect_end()?;
        Ok(fs)
    }

    /// Canonical form: tags renamed in order of first occurrence, tags
    /// that occur once dropped. `None` if the tags are inconsistent.
    pub fn normalized(&self) -> Option<Fs> {
        let mut g = FsGraph::new();
        let n = g.add(self, &mut HashMap::new())?;
        Some(g.read(&[n]).remove(0))
    }

    /// Value reached by following `path`, with reentrancies resolved.
    pub fn value_at(&self, path: &[&str]) -> Option<Fs> {
        let mut g = FsGraph::new();
        let mut n = g.add(self, &mut HashMap::new())?;
        for f in path {
            match &g.nodes[g.find(n)] {
                Node::Map(m) => n = *m.get(*f)?,
                _ => return None,
            }
        }
        Some(g.read(&[n]).remove(0))
    }
}

impl fmt::Display for Fs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fs::Any => f.write_str("_"),
            Fs::Atom(a) => f.write_str(a),
            Fs::Map(m) => {
                f.write_str("[")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}={v}")?;
                }
                f.write_str("]")
            }
            Fs::Tagged(t, v) if v.is_any() => f.write_str(t),
            Fs::Tagged(t, v) => write!(f, "{t}:{v}"),
        }
    }
}

fn is_tag(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase())
}

/// `_`, an atom, a tag (capitalised, optionally `Tag:value`) or a
/// bracketed list of `feature=value` pairs.
pub(crate) fn parse_fs(p: &mut TermParser<'_>) -> Result<Fs, TermError> {
    if p.eat_sym("[") {
        let mut m = BTreeMap::new();
        while !p.is_sym("]") {
            if !m.is_empty() {
                p.expect_sym(",")?;
            }
            let k = p.ident()?;
            p.expect_sym("=")?;
            let v = parse_fs(p)?;
            if m.insert(k.clone(), v).is_some() {
                return p.error(format!("feature `{k}` given twice"));
            }
        }
        p.expect_sym("]")?;
        return Ok(Fs::Map(m));
    }
    match p.peek() {
        Some(Tok::Int(_)) => Ok(Fs::Atom(p.int()?.to_string())),
        Some(Tok::Ident(_)) => {
            let name = p.ident()?;
            if name == "_" {
                Ok(Fs::Any)
            } else if is_tag(&name) {
                let v = if p.eat_sym(":") { parse_fs(p)? } else { Fs::Any };
                Ok(Fs::Tagged(name, Box::new(v)))
            } else {
                Ok(Fs::Atom(name))
            }
        }
        _ => p.error("expected a feature value"),
    }
}

#[derive(Debug, Clone)]
enum Node {
    Any,
    Atom(String),
    Map(BTreeMap<String, usize>),
    Fwd(usize),
}

/// Union-find graph in which structures from several sources are unified.
/// A failed unification leaves the graph in an unspecified state, so
/// callers clone before trying.
#[derive(Debug, Clone, Default)]
pub struct FsGraph {
    nodes: Vec<Node>,
}

impl FsGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn find(&self, mut n: usize) -> usize {
        while let Node::Fwd(m) = self.nodes[n] {
            n = m;
        }
        n
    }

    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Adds `fs`, resolving tags through `tags`. `None` if the structure
    /// gives one tag incompatible values.
    pub fn add(&mut self, fs: &Fs, tags: &mut HashMap<String, usize>) -> Option<usize> {
        match fs {
            Fs::Any => Some(self.push(Node::Any)),
            Fs::Atom(a) => Some(self.push(Node::Atom(a.clone()))),
            Fs::Map(m) => {
                let mut kids = BTreeMap::new();
                for (k, v) in m {
                    kids.insert(k.clone(), self.add(v, tags)?);
                }
                Some(self.push(Node::Map(kids)))
            }
            Fs::Tagged(t, v) => {
                let n = self.add(v, tags)?;
                match tags.get(t) {
                    Some(&old) => self.unify(old, n).then_some(old),
                    None => {
                        tags.insert(t.clone(), n);
                        Some(n)
                    }
                }
            }
        }
    }

    pub fn unify(&mut self, a: usize, b: usize) -> bool {
        let mut todo = vec![(a, b)];
        while let Some((a, b)) = todo.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            match (&self.nodes[a], &self.nodes[b]) {
                (Node::Any, _) => self.nodes[a] = Node::Fwd(b),
                (_, Node::Any) => self.nodes[b] = Node::Fwd(a),
                (Node::Atom(x), Node::Atom(y)) => {
                    if x != y {
                        return false;
                    }
                    self.nodes[a] = Node::Fwd(b);
                }
                (Node::Map(ma), Node::Map(mb)) => {
                    let mut merged = mb.clone();
                    for (k, &na) in ma {
                        match mb.get(k) {
                            Some(&nb) => todo.push((na, nb)),
                            None => {
                                merged.insert(k.clone(), na);
                            }
                        }
                    }
                    self.nodes[b] = Node::Map(merged);
                    self.nodes[a] = Node::Fwd(b);
                }
                _ => return false,
            }
        }
        self.acyclic(b)
    }

    fn acyclic(&self, root: usize) -> bool {
        // 0 unseen, 1 on stack, 2 done
        let mut state = vec![0u8; self.nodes.len()];
        let mut stack = vec![(self.find(root), false)];
        while let Some((n, leaving)) = stack.pop() {
            if leaving {
                state[n] = 2;
                continue;
            }
            match state[n] {
                1 => return false,
                2 => continue,
                _ => {}
            }
            state[n] = 1;
            stack.push((n, true));
            if let Node::Map(m) = &self.nodes[n] {
                for &c in m.values() {
                    let c = self.find(c);
                    if state[c] == 1 {
                        return false;
                    }
                    if state[c] == 0 {
                        stack.push((c, false));
                    }
                }
            }
        }
        true
    }

    /// Reads several roots out together so that sharing between them is
    /// kept. Shared nodes are tagged `X1`, `X2`, ... in order of first
    /// occurrence; the value is written at the first occurrence only.
    pub fn read(&self, roots: &[usize]) -> Vec<Fs> {
        let mut count: HashMap<usize, usize> = HashMap::new();
        for &r in roots {
            self.count(r, &mut count);
        }
        let mut names: HashMap<usize, String> = HashMap::new();
        roots.iter().map(|&r| self.emit(r, &count, &mut names)).collect()
    }

    fn count(&self, n: usize, count: &mut HashMap<usize, usize>) {
        let n = self.find(n);
        let c = count.entry(n).or_insert(0);
        *c += 1;
        if *c == 1 {
            if let Node::Map(m) = &self.nodes[n] {
                for &k in m.values() {
                    self.count(k, count);
                }
            }
        }
    }

    fn emit(&self, n: usize, count: &HashMap<usize, usize>, names: &mut HashMap<usize, String>) -> Fs {
        let n = self.find(n);
        let shared = count.get(&n).copied().unwrap_or(0) > 1;
        if shared {
            if let Some(name) = names.get(&n) {
                return Fs::Tagged(name.clone(), Box::new(Fs::Any));
            }
            let name = format!("X{}", names.len() + 1);
            names.insert(n, name.clone());
            let v = self.value(n, count, names);
            return Fs::Tagged(name, Box::new(v));
        }
        self.value(n, count, names)
    }

    fn value(&self, n: usize, count: &HashMap<usize, usize>, names: &mut HashMap<usize, String>) -> Fs {
        match &self.nodes[n] {
            Node::Any => Fs::Any,
            Node::Atom(a) => Fs::Atom(a.clone()),
            Node::Map(m) => Fs::Map(
                m.iter()
                    .map(|(k, &c)| (k.clone(), self.emit(c, count, names)))
                    .collect(),
            ),
            Node::Fwd(_) => unreachable!("emit resolves forwards"),
        }
    }
}

/// Most general unifier of two independent structures.
pub fn unify(a: &Fs, b: &Fs) -> Option<Fs> {
    let mut g = FsGraph::new();
    let na = g.add(a, &mut HashMap::new())?;
    let nb = g.add(b, &mut HashMap::new())?;
    g.unify(na, nb).then(|| g.read(&[na]).remove(0))
}
