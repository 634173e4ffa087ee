//! Object-language terms shared by every formalism: a simply typed lambda
//! calculus with intensional operators, quantifiers, connectives, embedded
//! DRSs, DRS merge and storage placeholders.
//!
//! Binding follows the usual lambda-calculus rules plus two dynamic ones: the
//! universe of a DRS binds within its conditions, and the referents exported
//! by the left operand of a merge (or the antecedent of an implication
//! condition) bind within the right operand (or the consequent).

mod ops;
mod parse;
mod print;
mod types;

use serde::{Deserialize, Serialize};

pub use ops::{all_names, alpha_eq, exports, free_vars, fresh_var, rename_apart, substitute, Substitution};
pub(crate) use ops::{free_names, fresh_name, map_children, rename_spine, stem, subst_names};
pub use parse::{parse_term, parse_term_expecting, parse_type, Signature};
pub(crate) use parse::{TermParser, Tok};
pub use print::{canonical, compact, pretty};
pub use types::{type_of, SemType, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub ty: SemType,
}

impl Var {
    pub fn new(name: impl Into<String>, ty: SemType) -> Self {
        Var { name: name.into(), ty }
    }

    pub fn entity(name: impl Into<String>) -> Self {
        Var::new(name, SemType::E)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuantKind {
    Forall,
    Exists,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Connective {
    And,
    Or,
    Not,
    Implies,
    Eq,
    /// The verum constant; takes no arguments.
    True,
}

impl Connective {
    pub fn keyword(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Not => "not",
            Connective::Implies => "implies",
            Connective::Eq => "eq",
            Connective::True => "true",
        }
    }
}

/// A discourse representation structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Drs {
    pub universe: Vec<Var>,
    pub conditions: Vec<Condition>,
}

/// DRS conditions. Sub-DRS operands are terms so that they can hold
/// unreduced material during a derivation; after normalization they are
/// DRS literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    Atom { pred: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Term),
    Implies(Term, Term),
    Or(Term, Term),
}

impl Condition {
    pub fn operands(&self) -> Vec<&Term> {
        match self {
            Condition::Atom { args, .. } => args.iter().collect(),
            Condition::Eq(a, b) | Condition::Implies(a, b) | Condition::Or(a, b) => vec![a, b],
            Condition::Not(a) => vec![a],
        }
    }

    pub fn operands_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Condition::Atom { args, .. } => args.iter_mut().collect(),
            Condition::Eq(a, b) | Condition::Implies(a, b) | Condition::Or(a, b) => vec![a, b],
            Condition::Not(a) => vec![a],
        }
    }

    pub fn map_operands(&self, mut f: impl FnMut(&Term) -> Term) -> Condition {
        match self {
            Condition::Atom { pred, args } => Condition::Atom {
                pred: pred.clone(),
                args: args.iter().map(f).collect(),
            },
            Condition::Eq(a, b) => Condition::Eq(f(a), f(b)),
            Condition::Not(a) => Condition::Not(f(a)),
            Condition::Implies(a, b) => Condition::Implies(f(a), f(b)),
            Condition::Or(a, b) => Condition::Or(f(a), f(b)),
        }
    }
}

impl Drs {
    pub fn new(universe: Vec<Var>, conditions: Vec<Condition>) -> Self {
        Drs { universe, conditions }
    }

    pub fn empty() -> Self {
        Drs::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(Var),
    Const(Var),
    Lam(Var, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// Intension `^E`.
    Up(Box<Term>),
    /// Extension `vE`.
    Down(Box<Term>),
    Quant {
        kind: QuantKind,
        var: Var,
        restrictor: Option<Box<Term>>,
        body: Box<Term>,
    },
    Conn(Connective, Vec<Term>),
    Drs(Drs),
    Merge(Box<Term>, Box<Term>),
    /// Storage placeholder for the quantifier stored under this index.
    Idx(u32, SemType),
}

impl Term {
    pub fn var(name: &str, ty: SemType) -> Term {
        Term::Var(Var::new(name, ty))
    }

    pub fn constant(name: &str, ty: SemType) -> Term {
        Term::Const(Var::new(name, ty))
    }

    pub fn lam(param: Var, body: Term) -> Term {
        Term::Lam(param, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Curried application of `f` to each argument in turn.
    pub fn apply(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn up(t: Term) -> Term {
        Term::Up(Box::new(t))
    }

    pub fn down(t: Term) -> Term {
        Term::Down(Box::new(t))
    }

    pub fn merge(a: Term, b: Term) -> Term {
        Term::Merge(Box::new(a), Box::new(b))
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::Conn(Connective::And, vec![a, b])
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::Conn(Connective::Or, vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Term) -> Term {
        Term::Conn(Connective::Not, vec![a])
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::Conn(Connective::Implies, vec![a, b])
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::Conn(Connective::Eq, vec![a, b])
    }

    pub fn verum() -> Term {
        Term::Conn(Connective::True, vec![])
    }

    pub fn forall(var: Var, body: Term) -> Term {
        Term::Quant {
            kind: QuantKind::Forall,
            var,
            restrictor: None,
            body: Box::new(body),
        }
    }

    pub fn exists(var: Var, body: Term) -> Term {
        Term::Quant {
            kind: QuantKind::Exists,
            var,
            restrictor: None,
            body: Box::new(body),
        }
    }

    pub fn drs(d: Drs) -> Term {
        Term::Drs(d)
    }

    /// Immediate subterms, in left-to-right order. Paths index into this list.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Idx(..) => vec![],
            Term::Lam(_, b) | Term::Up(b) | Term::Down(b) => vec![b],
            Term::App(f, a) | Term::Merge(f, a) => vec![f, a],
            Term::Quant { restrictor, body, .. } => restrictor.iter().map(|r| &**r).chain([&**body]).collect(),
            Term::Conn(_, args) => args.iter().collect(),
            Term::Drs(d) => d.conditions.iter().flat_map(|c| c.operands()).collect(),
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Idx(..) => vec![],
            Term::Lam(_, b) | Term::Up(b) | Term::Down(b) => vec![b],
            Term::App(f, a) | Term::Merge(f, a) => vec![f, a],
            Term::Quant { restrictor, body, .. } => {
                restrictor.iter_mut().map(|r| &mut **r).chain([&mut **body]).collect()
            }
            Term::Conn(_, args) => args.iter_mut().collect(),
            Term::Drs(d) => d.conditions.iter_mut().flat_map(|c| c.operands_mut()).collect(),
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.children().get(*i)?.at_path(rest),
        }
    }

    pub fn at_path_mut(&mut self, path: &[usize]) -> Option<&mut Term> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.children_mut().into_iter().nth(*i)?.at_path_mut(rest),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// True if any subterm satisfies `f`.
    pub fn any(&self, f: &mut impl FnMut(&Term) -> bool) -> bool {
        f(self) || self.children().into_iter().any(|c| c.any(f))
    }

    pub fn contains_idx(&self) -> bool {
        self.any(&mut |t| matches!(t, Term::Idx(..)))
    }

    pub fn as_drs(&self) -> Option<&Drs> {
        match self {
            Term::Drs(d) => Some(d),
            _ => None,
        }
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&compact(self))
    }
}

impl std::fmt::Display for Drs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&compact(&Term::Drs(self.clone())))
    }
}
