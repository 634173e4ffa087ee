//! DRSs to first-order formulas, and a brute-force model checker for both
//! that serves as the oracle for the translation.
//!
//! Models are small: a domain of named individuals, an extension per
//! predicate and a referent per constant.
//!
//! ```text
//! domain a b. pred laugh = {a}. pred love = {(a, b)}. const anna = a.
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datafile::FileError;
use crate::drt::first_free_referent;
use crate::term::{Condition, Connective, Drs, QuantKind, SemType, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("referent `{referent}` is free at {path:?}")]
    FreeReferent { referent: String, path: Vec<usize> },
    #[error("operand is not a DRS literal: {0}")]
    NotReduced(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("not first order: {0}")]
    NotFirstOrder(String),
    #[error("`{pred}` used with {found} arguments, model has {expected}")]
    Arity {
        pred: String,
        expected: usize,
        found: usize,
    },
}

/// Predicates with their arities and entity constants.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub preds: Vec<(String, usize)>,
    pub consts: Vec<String>,
}

impl Vocabulary {
    pub fn new(preds: &[(&str, usize)], consts: &[&str]) -> Self {
        Vocabulary {
            preds: preds.iter().map(|(p, n)| (p.to_string(), *n)).collect(),
            consts: consts.iter().map(|c| c.to_string()).collect(),
        }
    }

    fn add_pred(&mut self, name: &str, arity: usize) -> Result<(), TranslateError> {
        match self.preds.iter().find(|(p, _)| p == name) {
            Some(&(_, n)) if n != arity => Err(TranslateError::Arity {
                pred: name.to_string(),
                expected: n,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.preds.push((name.to_string(), arity));
                Ok(())
            }
        }
    }

    fn add_const(&mut self, name: &str) {
        if !self.consts.iter().any(|c| c == name) {
            self.consts.push(name.to_string());
        }
    }

    /// Symbols of a DRS, formula or generalised-quantifier formula, in
    /// order of first occurrence.
    pub fn of_term(t: &Term) -> Result<Vocabulary, TranslateError> {
        let mut v = Vocabulary::default();
        v.collect(t)?;
        Ok(v)
    }

    pub fn merged(mut self, other: &Vocabulary) -> Result<Vocabulary, TranslateError> {
        for (p, n) in &other.preds {
            self.add_pred(p, *n)?;
        }
        for c in &other.consts {
            self.add_const(c);
        }
        Ok(self)
    }

    fn collect(&mut self, t: &Term) -> Result<(), TranslateError> {
        match t {
            Term::Const(c) if c.ty == SemType::E => self.add_const(&c.name),
            Term::Const(c) if c.ty == SemType::T => self.add_pred(&c.name, 0)?,
            Term::Const(c) if c.ty == SemType::pred1() => self.add_pred(&c.name, 1)?,
            Term::Drs(d) => {
                for c in &d.conditions {
                    if let Condition::Atom { pred, args } = c {
                        self.add_pred(pred, args.len())?;
                    }
                    for o in c.operands() {
                        self.collect(o)?;
                    }
                }
            }
            Term::App(..) => {
                let (head, args) = spine(t);
                match head {
                    Term::Const(c) if gq_kind(c).is_some() => {}
                    Term::Const(c) if args.iter().all(|a| is_entity(a)) => self.add_pred(&c.name, args.len())?,
                    _ => self.collect(head)?,
                }
                for a in args {
                    self.collect(a)?;
                }
            }
            _ => {
                for c in t.children() {
                    self.collect(c)?;
                }
            }
        }
        Ok(())
    }
}

fn is_entity(t: &Term) -> bool {
    match t {
        Term::Var(v) | Term::Const(v) => v.ty == SemType::E,
        _ => false,
    }
}

fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let Term::App(f, a) = cur {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gq {
    Every,
    Some,
    No,
    The,
}

fn gq_kind(c: &Var) -> Option<Gq> {
    let ty = SemType::func(SemType::pred1(), SemType::func(SemType::pred1(), SemType::T));
    if c.ty != ty {
        return None;
    }
    Some(match c.name.as_str() {
        "every" => Gq::Every,
        "a" | "some" => Gq::Some,
        "no" => Gq::No,
        "the" => Gq::The,
        _ => return None,
    })
}

fn conj(mut parts: Vec<Term>) -> Term {
    if parts.is_empty() {
        return Term::verum();
    }
    let first = parts.remove(0);
    parts.into_iter().fold(first, Term::and)
}

/// The standard embedding: a DRS becomes the existential closure of the
/// conjunction of its conditions; an implication quantifies universally
/// over the antecedent's referents.
pub fn drs_to_fol(d: &Drs) -> Result<Term, TranslateError> {
    if let Some((v, path)) = first_free_referent(d) {
        return Err(TranslateError::FreeReferent { referent: v.name, path });
    }
    exists_closure(d)
}

fn exists_closure(d: &Drs) -> Result<Term, TranslateError> {
    let body = conj(conditions(d)?);
    Ok(d.universe.iter().rev().fold(body, |b, v| Term::exists(v.clone(), b)))
}

fn conditions(d: &Drs) -> Result<Vec<Term>, TranslateError> {
    d.conditions.iter().map(condition).collect()
}

fn literal(t: &Term) -> Result<&Drs, TranslateError> {
    t.as_drs()
        .ok_or_else(|| TranslateError::NotReduced(crate::term::compact(t)))
}

fn condition(c: &Condition) -> Result<Term, TranslateError> {
    Ok(match c {
        Condition::Atom { pred, args } => {
            let ty = args
                .iter()
                .rev()
                .fold(SemType::T, |acc, _| SemType::func(SemType::E, acc));
            Term::apply(Term::constant(pred, ty), args.iter().cloned())
        }
        Condition::Eq(a, b) => Term::eq(a.clone(), b.clone()),
        Condition::Not(k) => Term::not(exists_closure(literal(k)?)?),
        Condition::Or(a, b) => Term::or(exists_closure(literal(a)?)?, exists_closure(literal(b)?)?),
        Condition::Implies(a, b) => {
            let (a, b) = (literal(a)?, literal(b)?);
            let cons = exists_closure(b)?;
            let ante = conditions(a)?;
            let body = if ante.is_empty() {
                cons
            } else {
                Term::implies(conj(ante), cons)
            };
            a.universe.iter().rev().fold(body, |b, v| Term::forall(v.clone(), b))
        }
    })
}

/// True iff `t` uses only first-order constructors over entity variables.
pub fn is_fol(t: &Term) -> bool {
    match t {
        Term::Var(v) | Term::Const(v) => v.ty == SemType::E || v.ty == SemType::T,
        Term::Conn(_, args) => args.iter().all(is_fol),
        Term::Quant {
            var, restrictor, body, ..
        } => var.ty == SemType::E && restrictor.as_deref().is_none_or(is_fol) && is_fol(body),
        Term::App(..) => {
            let (head, args) = spine(t);
            matches!(head, Term::Const(_)) && args.iter().all(|a| is_entity(a))
        }
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteModel {
    pub domain: Vec<String>,
    pub preds: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub consts: BTreeMap<String, usize>,
}

/// A model over a fixed vocabulary with extensions stored as bit tables,
/// for fast exhaustive checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub size: usize,
    /// Per predicate, one flag per argument tuple.
    pub rels: Vec<Vec<bool>>,
    pub consts: Vec<usize>,
}

impl Structure {
    fn holds(&self, pred: usize, args: &[usize]) -> bool {
        let idx = args.iter().rev().fold(0, |acc, &a| acc * self.size + a);
        self.rels[pred][idx]
    }

    pub fn from_model(voc: &Vocabulary, m: &FiniteModel) -> Result<Structure, TranslateError> {
        let n = m.domain.len();
        let mut rels = Vec::new();
        for (p, arity) in &voc.preds {
            let ext = m.preds.get(p).ok_or_else(|| TranslateError::UnknownSymbol(p.clone()))?;
            let mut table = vec![false; n.pow(*arity as u32)];
            for tuple in ext {
                if tuple.len() != *arity {
                    return Err(TranslateError::Arity {
                        pred: p.clone(),
                        expected: tuple.len(),
                        found: *arity,
                    });
                }
                let idx = tuple.iter().rev().fold(0, |acc, &a| acc * n + a);
                table[idx] = true;
            }
            rels.push(table);
        }
        let consts = voc
            .consts
            .iter()
            .map(|c| {
                m.consts
                    .get(c)
                    .copied()
                    .ok_or_else(|| TranslateError::UnknownSymbol(c.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Structure { size: n, rels, consts })
    }

    pub fn to_model(&self, voc: &Vocabulary) -> FiniteModel {
        let domain: Vec<String> = (0..self.size).map(individual_name).collect();
        let mut preds = BTreeMap::new();
        for ((p, arity), table) in voc.preds.iter().zip(&self.rels) {
            let mut ext = BTreeSet::new();
            for (idx, &on) in table.iter().enumerate() {
                if on {
                    let mut tuple = Vec::with_capacity(*arity);
                    let mut rest = idx;
                    for _ in 0..*arity {
                        tuple.push(rest % self.size);
                        rest /= self.size;
                    }
                    ext.insert(tuple);
                }
            }
            preds.insert(p.clone(), ext);
        }
        let consts = voc.consts.iter().cloned().zip(self.consts.iter().copied()).collect();
        FiniteModel { domain, preds, consts }
    }
}

fn individual_name(i: usize) -> String {
    let letters = b"abcdefghijklmnopqrstuvwxyz";
    if i < letters.len() {
        (letters[i] as char).to_string()
    } else {
        format!("d{i}")
    }
}

/// Calls `f` on every structure with the given domain size; stops early
/// when `f` returns false. Returns the number of structures visited.
pub fn for_each_structure(voc: &Vocabulary, size: usize, mut f: impl FnMut(&Structure) -> bool) -> u64 {
    if size == 0 {
        return 0;
    }
    let mut s = Structure {
        size,
        rels: voc
            .preds
            .iter()
            .map(|(_, a)| vec![false; size.pow(*a as u32)])
            .collect(),
        consts: vec![0; voc.consts.len()],
    };
    let mut count = 0;
    loop {
        count += 1;
        if !f(&s) {
            return count;
        }
        // odometer: constants first, then relation bits
        let mut carried = true;
        for c in s.consts.iter_mut() {
            *c += 1;
            if *c < size {
                carried = false;
                break;
            }
            *c = 0;
        }
        if carried {
            'bits: for table in s.rels.iter_mut() {
                for b in table.iter_mut() {
                    *b = !*b;
                    if *b {
                        carried = false;
                        break 'bits;
                    }
                }
            }
        }
        if carried {
            return count;
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Arg {
    Slot(usize),
    Const(usize),
}

#[derive(Debug, Clone)]
enum F {
    True,
    Atom(usize, Vec<Arg>),
    Eq(Arg, Arg),
    Not(Box<F>),
    And(Vec<F>),
    Or(Vec<F>),
    Implies(Box<F>, Box<F>),
    Forall(usize, Box<F>),
    Exists(usize, Box<F>),
    /// Determiner over two properties, each a slot and a body.
    Gq(Gq, usize, Box<F>, usize, Box<F>),
}

struct Compiler<'a> {
    voc: &'a Vocabulary,
    scope: Vec<(String, usize)>,
    slots: usize,
    allow_gq: bool,
}

impl Compiler<'_> {
    fn new(voc: &Vocabulary, allow_gq: bool) -> Compiler<'_> {
        Compiler {
            voc,
            scope: Vec::new(),
            slots: 0,
            allow_gq,
        }
    }

    fn bind(&mut self, v: &Var) -> usize {
        let s = self.slots;
        self.slots += 1;
        self.scope.push((v.name.clone(), s));
        s
    }

    fn arg(&self, t: &Term) -> Result<Arg, TranslateError> {
        match t {
            Term::Var(v) => self
                .scope
                .iter()
                .rev()
                .find(|(n, _)| *n == v.name)
                .map(|&(_, s)| Arg::Slot(s))
                .ok_or_else(|| TranslateError::FreeReferent {
                    referent: v.name.clone(),
                    path: Vec::new(),
                }),
            Term::Const(c) if c.ty == SemType::E => self.constant(&c.name),
            _ => Err(TranslateError::NotFirstOrder(crate::term::compact(t))),
        }
    }

    fn constant(&self, name: &str) -> Result<Arg, TranslateError> {
        self.voc
            .consts
            .iter()
            .position(|c| c == name)
            .map(Arg::Const)
            .ok_or_else(|| TranslateError::UnknownSymbol(name.to_string()))
    }

    fn atom(&self, pred: &str, args: &[&Term]) -> Result<F, TranslateError> {
        let p = self
            .voc
            .preds
            .iter()
            .position(|(n, a)| n == pred && *a == args.len())
            .ok_or_else(|| TranslateError::UnknownSymbol(pred.to_string()))?;
        let args = args.iter().map(|a| self.arg(a)).collect::<Result<_, _>>()?;
        Ok(F::Atom(p, args))
    }

    fn formula(&mut self, t: &Term) -> Result<F, TranslateError> {
        let not_fo = || TranslateError::NotFirstOrder(crate::term::compact(t));
        Ok(match t {
            Term::Conn(Connective::True, _) => F::True,
            Term::Conn(Connective::Eq, args) if args.len() == 2 => F::Eq(self.arg(&args[0])?, self.arg(&args[1])?),
            Term::Conn(Connective::Not, args) if args.len() == 1 => F::Not(Box::new(self.formula(&args[0])?)),
            Term::Conn(Connective::And, args) => {
                F::And(args.iter().map(|a| self.formula(a)).collect::<Result<_, _>>()?)
            }
            Term::Conn(Connective::Or, args) => F::Or(args.iter().map(|a| self.formula(a)).collect::<Result<_, _>>()?),
            Term::Conn(Connective::Implies, args) if args.len() == 2 => {
                F::Implies(Box::new(self.formula(&args[0])?), Box::new(self.formula(&args[1])?))
            }
            Term::Quant {
                kind,
                var,
                restrictor,
                body,
            } if var.ty == SemType::E => {
                let n = self.scope.len();
                let s = self.bind(var);
                let r = restrictor.as_deref().map(|r| self.formula(r)).transpose()?;
                let b = self.formula(body)?;
                self.scope.truncate(n);
                let inner = match (kind, r) {
                    (_, None) => b,
                    (QuantKind::Forall, Some(r)) => F::Implies(Box::new(r), Box::new(b)),
                    (QuantKind::Exists, Some(r)) => F::And(vec![r, b]),
                };
                match kind {
                    QuantKind::Forall => F::Forall(s, Box::new(inner)),
                    QuantKind::Exists => F::Exists(s, Box::new(inner)),
                }
            }
            Term::Const(c) if c.ty == SemType::T => self.atom(&c.name, &[])?,
            Term::App(..) => {
                let (head, args) = spine(t);
                match head {
                    Term::Const(c) if gq_kind(c).is_some() && args.len() == 2 && self.allow_gq => {
                        let (s1, r) = self.property(args[0])?;
                        let (s2, b) = self.property(args[1])?;
                        F::Gq(gq_kind(c).expect("checked"), s1, Box::new(r), s2, Box::new(b))
                    }
                    Term::Const(c) => self.atom(&c.name, &args)?,
                    _ => return Err(not_fo()),
                }
            }
            _ => return Err(not_fo()),
        })
    }

    fn property(&mut self, t: &Term) -> Result<(usize, F), TranslateError> {
        match t {
            Term::Lam(v, body) if v.ty == SemType::E => {
                let n = self.scope.len();
                let s = self.bind(v);
                let f = self.formula(body)?;
                self.scope.truncate(n);
                Ok((s, f))
            }
            Term::Const(c) if c.ty == SemType::pred1() => {
                let s = self.slots;
                self.slots += 1;
                let p = self
                    .voc
                    .preds
                    .iter()
                    .position(|(n, a)| *n == c.name && *a == 1)
                    .ok_or_else(|| TranslateError::UnknownSymbol(c.name.clone()))?;
                Ok((s, F::Atom(p, vec![Arg::Slot(s)])))
            }
            _ => Err(TranslateError::NotFirstOrder(crate::term::compact(t))),
        }
    }
}

fn val(a: Arg, s: &Structure, g: &[usize]) -> usize {
    match a {
        Arg::Slot(i) => g[i],
        Arg::Const(c) => s.consts[c],
    }
}

fn eval(f: &F, s: &Structure, g: &mut [usize]) -> bool {
    match f {
        F::True => true,
        F::Atom(p, args) => {
            let mut buf = [0usize; 8];
            if args.len() <= buf.len() {
                for (b, a) in buf.iter_mut().zip(args) {
                    *b = val(*a, s, g);
                }
                s.holds(*p, &buf[..args.len()])
            } else {
                let vals: Vec<usize> = args.iter().map(|a| val(*a, s, g)).collect();
                s.holds(*p, &vals)
            }
        }
        F::Eq(a, b) => val(*a, s, g) == val(*b, s, g),
        F::Not(a) => !eval(a, s, g),
        F::And(xs) => xs.iter().all(|x| eval(x, s, g)),
        F::Or(xs) => xs.iter().any(|x| eval(x, s, g)),
        F::Implies(a, b) => !eval(a, s, g) || eval(b, s, g),
        F::Forall(v, b) => (0..s.size).all(|d| {
            g[*v] = d;
            eval(b, s, g)
        }),
        F::Exists(v, b) => (0..s.size).any(|d| {
            g[*v] = d;
            eval(b, s, g)
        }),
        F::Gq(kind, v1, r, v2, b) => {
            let mut restr = Vec::new();
            let mut both = 0;
            for d in 0..s.size {
                g[*v1] = d;
                if eval(r, s, g) {
                    restr.push(d);
                    g[*v2] = d;
                    if eval(b, s, g) {
                        both += 1;
                    }
                }
            }
            match kind {
                Gq::Every => both == restr.len(),
                Gq::Some => both > 0,
                Gq::No => both == 0,
                Gq::The => restr.len() == 1 && both == 1,
            }
        }
    }
}

/// A formula ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    f: F,
    slots: usize,
}

impl CompiledFormula {
    /// Accepts first-order formulas and, in addition, the determiner
    /// constants `every`, `a`/`some`, `no` and `the` applied to two
    /// properties.
    pub fn new(t: &Term, voc: &Vocabulary) -> Result<Self, TranslateError> {
        let mut c = Compiler::new(voc, true);
        let f = c.formula(t)?;
        Ok(CompiledFormula { f, slots: c.slots })
    }

    pub fn eval(&self, s: &Structure) -> bool {
        eval(&self.f, s, &mut vec![0; self.slots])
    }
}

#[derive(Debug, Clone)]
struct CDrs {
    universe: Vec<usize>,
    conds: Vec<CCond>,
}

#[derive(Debug, Clone)]
enum CCond {
    Atom(F),
    Not(CDrs),
    Implies(CDrs, CDrs),
    Or(CDrs, CDrs),
}

impl Compiler<'_> {
    fn drs(&mut self, d: &Drs) -> Result<CDrs, TranslateError> {
        let n = self.scope.len();
        let universe = d.universe.iter().map(|v| self.bind(v)).collect();
        let conds = d.conditions.iter().map(|c| self.cond(c)).collect::<Result<_, _>>();
        self.scope.truncate(n);
        Ok(CDrs {
            universe,
            conds: conds?,
        })
    }

    fn cond(&mut self, c: &Condition) -> Result<CCond, TranslateError> {
        Ok(match c {
            Condition::Atom { pred, args } => {
                let args: Vec<&Term> = args.iter().collect();
                CCond::Atom(self.atom(pred, &args)?)
            }
            Condition::Eq(a, b) => CCond::Atom(F::Eq(self.arg(a)?, self.arg(b)?)),
            Condition::Not(k) => CCond::Not(self.drs(literal(k)?)?),
            Condition::Or(a, b) => CCond::Or(self.drs(literal(a)?)?, self.drs(literal(b)?)?),
            Condition::Implies(a, b) => {
                let n = self.scope.len();
                let ante = self.drs(literal(a)?)?;
                // the consequent sees the antecedent's referents
                for (v, s) in literal(a)?.universe.iter().zip(&ante.universe) {
                    self.scope.push((v.name.clone(), *s));
                }
                let cons = self.drs(literal(b)?);
                self.scope.truncate(n);
                CCond::Implies(ante, cons?)
            }
        })
    }
}

/// Calls `k` for every extension of `g` over the universe of `d` that
/// satisfies its conditions; stops as soon as `k` returns true.
fn verify_with(d: &CDrs, s: &Structure, g: &mut [usize], i: usize, k: &mut dyn FnMut(&mut [usize]) -> bool) -> bool {
    if i == d.universe.len() {
        return d.conds.iter().all(|c| holds(c, s, g)) && k(g);
    }
    (0..s.size).any(|e| {
        g[d.universe[i]] = e;
        verify_with(d, s, g, i + 1, k)
    })
}

fn verifies(d: &CDrs, s: &Structure, g: &mut [usize]) -> bool {
    verify_with(d, s, g, 0, &mut |_| true)
}

fn holds(c: &CCond, s: &Structure, g: &mut [usize]) -> bool {
    match c {
        CCond::Atom(f) => eval(f, s, g),
        CCond::Not(k) => !verifies(k, s, g),
        CCond::Or(a, b) => verifies(a, s, g) || verifies(b, s, g),
        CCond::Implies(a, b) => !verify_with(a, s, g, 0, &mut |g| !verifies(b, s, g)),
    }
}

/// A DRS ready for repeated evaluation by embedding verification.
#[derive(Debug, Clone)]
pub struct CompiledDrs {
    d: CDrs,
    slots: usize,
}

impl CompiledDrs {
    pub fn new(d: &Drs, voc: &Vocabulary) -> Result<Self, TranslateError> {
        if let Some((v, path)) = first_free_referent(d) {
            return Err(TranslateError::FreeReferent { referent: v.name, path });
        }
        let mut c = Compiler::new(voc, false);
        let d = c.drs(d)?;
        Ok(CompiledDrs { d, slots: c.slots })
    }

    pub fn eval(&self, s: &Structure) -> bool {
        verifies(&self.d, s, &mut vec![0; self.slots])
    }
}

fn model_vocabulary(t: &Term, m: &FiniteModel) -> Result<Vocabulary, TranslateError> {
    let voc = Vocabulary::of_term(t)?;
    for (p, _) in &voc.preds {
        if !m.preds.contains_key(p) {
            return Err(TranslateError::UnknownSymbol(p.clone()));
        }
    }
    Ok(voc)
}

/// Tarskian evaluation of a first-order formula.
pub fn eval_fol(f: &Term, m: &FiniteModel) -> Result<bool, TranslateError> {
    if !is_fol(f) {
        return Err(TranslateError::NotFirstOrder(crate::term::compact(f)));
    }
    eval_formula(f, m)
}

/// Like [`eval_fol`], also accepting determiner constants.
pub fn eval_formula(f: &Term, m: &FiniteModel) -> Result<bool, TranslateError> {
    let voc = model_vocabulary(f, m)?;
    let s = Structure::from_model(&voc, m)?;
    Ok(CompiledFormula::new(f, &voc)?.eval(&s))
}

/// Truth of a DRS: some assignment to its universe verifies every
/// condition.
pub fn eval_drs(d: &Drs, m: &FiniteModel) -> Result<bool, TranslateError> {
    let voc = model_vocabulary(&Term::Drs(d.clone()), m)?;
    let s = Structure::from_model(&voc, m)?;
    Ok(CompiledDrs::new(d, &voc)?.eval(&s))
}

impl FiniteModel {
    pub fn parse(src: &str) -> Result<FiniteModel, FileError> {
        let toks = lex_model(src)?;
        let mut i = 0;
        let mut domain: Option<Vec<String>> = None;
        let mut preds = BTreeMap::new();
        let mut consts = BTreeMap::new();
        let err = |pos: usize, msg: String| FileError::at(src, pos, msg);
        let expect = |i: &mut usize, s: &str| -> Result<(), FileError> {
            match toks.get(*i) {
                Some((t, _)) if t == s => {
                    *i += 1;
                    Ok(())
                }
                Some((t, p)) => Err(err(*p, format!("expected `{s}`, found `{t}`"))),
                None => Err(err(src.len(), format!("expected `{s}`"))),
            }
        };
        let ident = |i: &mut usize| -> Result<(String, usize), FileError> {
            match toks.get(*i) {
                Some((t, p)) if t.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                    *i += 1;
                    Ok((t.clone(), *p))
                }
                Some((t, p)) => Err(err(*p, format!("expected a name, found `{t}`"))),
                None => Err(err(src.len(), "expected a name".into())),
            }
        };
        while i < toks.len() {
            let (kw, at) = ident(&mut i)?;
            let dom = |at: usize| {
                domain
                    .as_ref()
                    .ok_or_else(|| err(at, "`domain` must come first".into()))
            };
            let individual = |name: &str, at: usize| -> Result<usize, FileError> {
                dom(at)?
                    .iter()
                    .position(|d| d == name)
                    .ok_or_else(|| err(at, format!("`{name}` is not in the domain")))
            };
            match kw.as_str() {
                "domain" => {
                    if domain.is_some() {
                        return Err(err(at, "second `domain` line".into()));
                    }
                    let mut names = Vec::new();
                    while toks.get(i).is_some_and(|(t, _)| t != ".") {
                        let (n, p) = ident(&mut i)?;
                        if names.contains(&n) {
                            return Err(err(p, format!("`{n}` listed twice")));
                        }
                        names.push(n);
                    }
                    if names.is_empty() {
                        return Err(err(at, "empty domain".into()));
                    }
                    domain = Some(names);
                }
                "pred" => {
                    let (name, _) = ident(&mut i)?;
                    expect(&mut i, "=")?;
                    expect(&mut i, "{")?;
                    let mut ext = BTreeSet::new();
                    while toks.get(i).is_some_and(|(t, _)| t != "}") {
                        let tuple = if toks[i].0 == "(" {
                            i += 1;
                            let mut tuple = Vec::new();
                            loop {
                                let (n, p) = ident(&mut i)?;
                                tuple.push(individual(&n, p)?);
                                if toks.get(i).is_some_and(|(t, _)| t == ",") {
                                    i += 1;
                                } else {
                                    break;
                                }
                            }
                            expect(&mut i, ")")?;
                            tuple
                        } else {
                            let (n, p) = ident(&mut i)?;
                            vec![individual(&n, p)?]
                        };
                        if let Some(first) = ext.iter().next() {
                            let first: &Vec<usize> = first;
                            if first.len() != tuple.len() {
                                return Err(err(at, format!("`{name}` mixes tuple lengths")));
                            }
                        }
                        ext.insert(tuple);
                        if toks.get(i).is_some_and(|(t, _)| t == ",") {
                            i += 1;
                        }
                    }
                    expect(&mut i, "}")?;
                    if preds.insert(name.clone(), ext).is_some() {
                        return Err(err(at, format!("`{name}` defined twice")));
                    }
                }
                "const" => {
                    let (name, _) = ident(&mut i)?;
                    expect(&mut i, "=")?;
                    let (v, p) = ident(&mut i)?;
                    let v = individual(&v, p)?;
                    if consts.insert(name.clone(), v).is_some() {
                        return Err(err(at, format!("`{name}` defined twice")));
                    }
                }
                other => return Err(err(at, format!("unknown statement `{other}`"))),
            }
            expect(&mut i, ".")?;
        }
        Ok(FiniteModel {
            domain: domain.ok_or_else(|| err(0, "missing `domain` line".into()))?,
            preds,
            consts,
        })
    }
}

fn lex_model(src: &str) -> Result<Vec<(String, usize)>, FileError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '%' {
            while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                chars.next();
            }
        } else if "{}(),=.".contains(c) {
            out.push((c.to_string(), i));
            chars.next();
        } else if c.is_alphanumeric() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, c)) = chars.peek().filter(|(_, c)| c.is_alphanumeric() || *c == '_') {
                s.push(c);
                chars.next();
            }
            out.push((s, i));
        } else {
            return Err(FileError::at(src, i, format!("unexpected `{c}`")));
        }
    }
    Ok(out)
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain {}.", self.domain.join(" "))?;
        for (p, ext) in &self.preds {
            let items: Vec<String> = ext
                .iter()
                .map(|t| {
                    let names: Vec<&str> = t.iter().map(|&i| self.domain[i].as_str()).collect();
                    if names.len() == 1 {
                        names[0].to_string()
                    } else {
                        format!("({})", names.join(", "))
                    }
                })
                .collect();
            writeln!(f, "pred {p} = {{{}}}.", items.join(", "))?;
        }
        for (c, v) in &self.consts {
            writeln!(f, "const {c} = {}.", self.domain[*v])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{alpha_eq, parse_term, Signature};

    fn t(src: &str) -> Term {
        parse_term(src, &Signature::new()).unwrap()
    }

    fn drs(src: &str) -> Drs {
        t(src).as_drs().unwrap().clone()
    }

    const DONKEY: &str = "drs([], [implies(drs([x, y], [farmer(x), donkey(y), owns(x, y)]), drs([], [beats(x, y)]))])";

    #[test]
    fn translation_examples() {
        let anna = drs_to_fol(&drs("drs([x], [eq(x, anna:e), laugh(x)])")).unwrap();
        assert!(alpha_eq(&anna, &t("exists(x:e, and(eq(x, anna:e), laugh:<e,t>(x)))")));
        let donkey = drs_to_fol(&drs(DONKEY)).unwrap();
        let expected = t("forall(x:e, forall(y:e, implies(and(and(farmer:<e,t>(x), donkey:<e,t>(y)), owns:<e,<e,t>>(x, y)), beats:<e,<e,t>>(x, y))))");
        assert!(alpha_eq(&donkey, &expected), "{donkey}");
        assert_eq!(drs_to_fol(&Drs::empty()).unwrap(), Term::verum());
        assert!(is_fol(&donkey));
    }

    #[test]
    fn evaluation_examples() {
        let m = FiniteModel::parse("domain a b. pred laugh = {a}.").unwrap();
        assert!(eval_fol(&t("exists(x:e, laugh:<e,t>(x))"), &m).unwrap());
        assert!(!eval_fol(&t("forall(x:e, laugh:<e,t>(x))"), &m).unwrap());
        assert!(eval_fol(&Term::verum(), &m).unwrap());
        assert!(eval_drs(&drs("drs([x], [laugh(x)])"), &m).unwrap());
        assert!(eval_drs(&Drs::empty(), &m).unwrap());

        let m = FiniteModel::parse(
            "domain a b. pred farmer = {a}. pred donkey = {b}. pred owns = {(a, b)}. pred beats = {}.",
        )
        .unwrap();
        assert!(!eval_drs(&drs(DONKEY), &m).unwrap());
        assert!(!eval_fol(&drs_to_fol(&drs(DONKEY)).unwrap(), &m).unwrap());
    }

    #[test]
    fn unknown_symbols_and_free_referents() {
        let m = FiniteModel::parse("domain a.").unwrap();
        assert_eq!(
            eval_fol(&t("exists(x:e, laugh:<e,t>(x))"), &m),
            Err(TranslateError::UnknownSymbol("laugh".into()))
        );
        let open = Drs::new(
            vec![],
            vec![Condition::Atom {
                pred: "p".into(),
                args: vec![Term::Var(Var::entity("x"))],
            }],
        );
        assert!(matches!(drs_to_fol(&open), Err(TranslateError::FreeReferent { .. })));
    }

    #[test]
    fn determiners() {
        let m = FiniteModel::parse("domain a b. pred man = {a, b}. pred laugh = {a}.").unwrap();
        let q = |d: &str| {
            t(&format!(
                "app(app({d}:<<e,t>,<<e,t>,t>>, man:<e,t>), lam(x:e, laugh:<e,t>(x)))"
            ))
        };
        assert!(!eval_formula(&q("every"), &m).unwrap());
        assert!(eval_formula(&q("a"), &m).unwrap());
        assert!(!eval_formula(&q("no"), &m).unwrap());
        assert!(!eval_formula(&q("the"), &m).unwrap());
        assert!(eval_fol(&q("every"), &m).is_err());
    }

    #[test]
    fn model_round_trip_and_enumeration() {
        let src = "domain a b. pred love = {(a, b), (b, b)}. pred man = {a}. const anna = b.\n";
        let m = FiniteModel::parse(src).unwrap();
        assert_eq!(FiniteModel::parse(&m.to_string()).unwrap(), m);
        assert!(FiniteModel::parse("pred p = {a}.").is_err());
        assert!(FiniteModel::parse("domain a. pred p = {b}.").is_err());

        let voc = Vocabulary::new(&[("p", 1), ("r", 2)], &["c"]);
        let n = for_each_structure(&voc, 2, |_| true);
        assert_eq!(n, 4 * 16 * 2);
        let mut seen = BTreeSet::new();
        for_each_structure(&voc, 2, |s| {
            let m = s.to_model(&voc);
            assert_eq!(&Structure::from_model(&voc, &m).unwrap(), s);
            seen.insert(m.to_string());
            true
        });
        assert_eq!(seen.len() as u64, n);
    }
}
