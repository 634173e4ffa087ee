//! Binding-aware operations: free variables, exports, alpha-equivalence,
//! renaming and capture-avoiding substitution.

use std::collections::{BTreeMap, BTreeSet};

use super::{type_of, Condition, Drs, Term, TermError, Var};

/// Rebuilds `t` with `f` applied to each immediate subterm.
pub(crate) fn map_children(t: &Term, mut f: impl FnMut(&Term) -> Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) | Term::Idx(..) => t.clone(),
        Term::Lam(x, b) => Term::Lam(x.clone(), Box::new(f(b))),
        Term::App(a, b) => Term::app(f(a), f(b)),
        Term::Merge(a, b) => Term::merge(f(a), f(b)),
        Term::Up(b) => Term::up(f(b)),
        Term::Down(b) => Term::down(f(b)),
        Term::Quant {
            kind,
            var,
            restrictor,
            body,
        } => Term::Quant {
            kind: *kind,
            var: var.clone(),
            restrictor: restrictor.as_ref().map(|r| Box::new(f(r))),
            body: Box::new(f(body)),
        },
        Term::Conn(k, args) => Term::Conn(*k, args.iter().map(f).collect()),
        Term::Drs(d) => Term::Drs(Drs {
            universe: d.universe.clone(),
            conditions: d.conditions.iter().map(|c| c.map_operands(&mut f)).collect(),
        }),
    }
}

/// Referents made available by `t` to the right operand of an enclosing
/// merge. When two referents share a name the leftmost one is visible.
pub fn exports(t: &Term) -> Vec<Var> {
    match t {
        Term::Drs(d) => d.universe.clone(),
        Term::Merge(a, b) => {
            let mut out = exports(a);
            for v in exports(b) {
                if !out.iter().any(|w| w.name == v.name) {
                    out.push(v);
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

fn export_names(t: &Term) -> Vec<String> {
    exports(t).into_iter().map(|v| v.name).collect()
}

fn fv_into(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(&v.name) {
                out.insert(v.clone());
            }
        }
        Term::Lam(x, b) => {
            bound.push(x.name.clone());
            fv_into(b, bound, out);
            bound.pop();
        }
        Term::Quant {
            var, restrictor, body, ..
        } => {
            bound.push(var.name.clone());
            if let Some(r) = restrictor {
                fv_into(r, bound, out);
            }
            fv_into(body, bound, out);
            bound.pop();
        }
        Term::Drs(d) => {
            let n = bound.len();
            bound.extend(d.universe.iter().map(|v| v.name.clone()));
            for c in &d.conditions {
                match c {
                    Condition::Implies(a, b) => scoped_pair_fv(a, b, bound, out),
                    _ => {
                        for o in c.operands() {
                            fv_into(o, bound, out);
                        }
                    }
                }
            }
            bound.truncate(n);
        }
        Term::Merge(a, b) => scoped_pair_fv(a, b, bound, out),
        _ => {
            for c in t.children() {
                fv_into(c, bound, out);
            }
        }
    }
}

fn scoped_pair_fv(a: &Term, b: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<Var>) {
    fv_into(a, bound, out);
    let n = bound.len();
    bound.extend(export_names(a));
    fv_into(b, bound, out);
    bound.truncate(n);
}

/// Variables with a free occurrence in `t`.
pub fn free_vars(t: &Term) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    fv_into(t, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn free_names(t: &Term) -> BTreeSet<String> {
    free_vars(t).into_iter().map(|v| v.name).collect()
}

/// Every variable, binder and constant name occurring in `t`.
pub fn all_names(t: &Term) -> BTreeSet<String> {
    fn go(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Var(v) | Term::Const(v) => {
                out.insert(v.name.clone());
            }
            Term::Lam(x, _) => {
                out.insert(x.name.clone());
            }
            Term::Quant { var, .. } => {
                out.insert(var.name.clone());
            }
            Term::Drs(d) => out.extend(d.universe.iter().map(|v| v.name.clone())),
            _ => {}
        }
        for c in t.children() {
            go(c, out);
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

/// Name with trailing digits removed, the base for generated variants.
pub(crate) fn stem(name: &str) -> &str {
    let s = name.trim_end_matches(|c: char| c.is_ascii_digit());
    if s.is_empty() {
        name
    } else {
        s
    }
}

pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded suffixes")
}

/// `base` itself if unused, otherwise `base` with the smallest positive
/// numeric suffix not in `avoid`.
pub fn fresh_var(base: &Var, avoid: &BTreeSet<Var>) -> Var {
    let names: BTreeSet<String> = avoid.iter().map(|v| v.name.clone()).collect();
    Var::new(fresh_name(&base.name, &names), base.ty.clone())
}

/// Renames free occurrences of `from`. `to` must not occur in `t`.
pub(crate) fn rename_free(t: &Term, from: &str, to: &str) -> Term {
    match t {
        Term::Var(v) if v.name == from => Term::Var(Var::new(to, v.ty.clone())),
        Term::Lam(x, _) if x.name == from => t.clone(),
        Term::Quant { var, .. } if var.name == from => t.clone(),
        Term::Drs(d) => {
            if d.universe.iter().any(|v| v.name == from) {
                t.clone()
            } else {
                Term::Drs(Drs {
                    universe: d.universe.clone(),
                    conditions: d.conditions.iter().map(|c| rename_cond(c, from, to)).collect(),
                })
            }
        }
        Term::Merge(a, b) => {
            let (a, b) = rename_pair(a, b, from, to);
            Term::merge(a, b)
        }
        _ => map_children(t, |c| rename_free(c, from, to)),
    }
}

fn rename_pair(a: &Term, b: &Term, from: &str, to: &str) -> (Term, Term) {
    let a2 = rename_free(a, from, to);
    let b2 = if export_names(a).iter().any(|n| n == from) {
        b.clone()
    } else {
        rename_free(b, from, to)
    };
    (a2, b2)
}

fn rename_cond(c: &Condition, from: &str, to: &str) -> Condition {
    match c {
        Condition::Implies(a, b) => {
            let (a, b) = rename_pair(a, b, from, to);
            Condition::Implies(a, b)
        }
        _ => c.map_operands(|o| rename_free(o, from, to)),
    }
}

/// Renames the referent `from` wherever it is bound along the export spine
/// of `t` (DRS literals reachable through merges), together with the
/// occurrences those binders capture. With `captured` set, free occurrences
/// of `from` in `t` are taken to refer to a referent being renamed as well.
pub(crate) fn rename_spine(t: &Term, from: &str, to: &str, captured: bool) -> Term {
    match t {
        Term::Drs(d) => {
            let binds = d.universe.iter().any(|v| v.name == from);
            if !binds && !captured {
                return t.clone();
            }
            Term::Drs(Drs {
                universe: d
                    .universe
                    .iter()
                    .map(|v| {
                        if v.name == from {
                            Var::new(to, v.ty.clone())
                        } else {
                            v.clone()
                        }
                    })
                    .collect(),
                conditions: d.conditions.iter().map(|c| rename_cond(c, from, to)).collect(),
            })
        }
        Term::Merge(a, b) => {
            let a2 = rename_spine(a, from, to, captured);
            let b_captured = captured || export_names(a).iter().any(|n| n == from);
            Term::merge(a2, rename_spine(b, from, to, b_captured))
        }
        _ if captured => rename_free(t, from, to),
        _ => t.clone(),
    }
}

fn restrict(s: &BTreeMap<String, Term>, free: &BTreeSet<String>) -> BTreeMap<String, Term> {
    s.iter()
        .filter(|(k, _)| free.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

fn range_names(s: &BTreeMap<String, Term>) -> BTreeSet<String> {
    s.values().flat_map(free_names).collect()
}

fn avoid_set(parts: &[&Term], s: &BTreeMap<String, Term>, ranges: &BTreeSet<String>) -> BTreeSet<String> {
    let mut avoid: BTreeSet<String> = parts.iter().flat_map(|p| all_names(p)).collect();
    avoid.extend(ranges.iter().cloned());
    avoid.extend(s.keys().cloned());
    for v in s.values() {
        avoid.extend(all_names(v));
    }
    avoid
}

/// Capture-avoiding simultaneous substitution keyed by variable name.
pub(crate) fn subst_names(t: &Term, s: &BTreeMap<String, Term>) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(v) => s.get(&v.name).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(_) | Term::Idx(..) => t.clone(),
        Term::Lam(x, b) => {
            let s = restrict(s, &free_names(t));
            if s.is_empty() {
                return t.clone();
            }
            let ranges = range_names(&s);
            let (x, b) = rename_binder(x, b, &s, &ranges);
            Term::Lam(x, Box::new(subst_names(&b, &s)))
        }
        Term::Quant {
            kind,
            var,
            restrictor,
            body,
        } => {
            let s = restrict(s, &free_names(t));
            if s.is_empty() {
                return t.clone();
            }
            let ranges = range_names(&s);
            let mut var = var.clone();
            let mut restrictor = restrictor.as_deref().cloned();
            let mut body = (**body).clone();
            if ranges.contains(&var.name) {
                let mut parts = vec![&body];
                if let Some(r) = &restrictor {
                    parts.push(r);
                }
                let fresh = fresh_name(stem(&var.name), &avoid_set(&parts, &s, &ranges));
                restrictor = restrictor.map(|r| rename_free(&r, &var.name, &fresh));
                body = rename_free(&body, &var.name, &fresh);
                var = Var::new(fresh, var.ty.clone());
            }
            Term::Quant {
                kind: *kind,
                var,
                restrictor: restrictor.map(|r| Box::new(subst_names(&r, &s))),
                body: Box::new(subst_names(&body, &s)),
            }
        }
        Term::Drs(_) => {
            let s = restrict(s, &free_names(t));
            if s.is_empty() {
                return t.clone();
            }
            let ranges = range_names(&s);
            let mut t = t.clone();
            let mut avoid = avoid_set(&[&t], &s, &ranges);
            for v in exports(&t) {
                if ranges.contains(&v.name) {
                    let fresh = fresh_name(stem(&v.name), &avoid);
                    avoid.insert(fresh.clone());
                    t = rename_spine(&t, &v.name, &fresh, false);
                }
            }
            let Term::Drs(d) = t else { unreachable!() };
            Term::Drs(Drs {
                universe: d.universe,
                conditions: d
                    .conditions
                    .iter()
                    .map(|c| match c {
                        Condition::Implies(a, b) => {
                            let (a, b) = subst_pair(a, b, &s);
                            Condition::Implies(a, b)
                        }
                        _ => c.map_operands(|o| subst_names(o, &s)),
                    })
                    .collect(),
            })
        }
        Term::Merge(a, b) => {
            let (a, b) = subst_pair(a, b, s);
            Term::merge(a, b)
        }
        _ => map_children(t, |c| subst_names(c, s)),
    }
}

fn rename_binder(x: &Var, b: &Term, s: &BTreeMap<String, Term>, ranges: &BTreeSet<String>) -> (Var, Term) {
    if !ranges.contains(&x.name) {
        return (x.clone(), b.clone());
    }
    let fresh = fresh_name(stem(&x.name), &avoid_set(&[b], s, ranges));
    let body = rename_free(b, &x.name, &fresh);
    (Var::new(fresh, x.ty.clone()), body)
}

/// Substitution into a pair where the referents exported by `a` scope over `b`.
fn subst_pair(a: &Term, b: &Term, s: &BTreeMap<String, Term>) -> (Term, Term) {
    let pair = Term::merge(a.clone(), b.clone());
    let s = restrict(s, &free_names(&pair));
    if s.is_empty() {
        return (a.clone(), b.clone());
    }
    let ranges = range_names(&s);
    let mut avoid = avoid_set(&[a, b], &s, &ranges);
    let (mut a, mut b) = (a.clone(), b.clone());
    for e in export_names(&a) {
        if ranges.contains(&e) {
            let fresh = fresh_name(stem(&e), &avoid);
            avoid.insert(fresh.clone());
            a = rename_spine(&a, &e, &fresh, false);
            b = rename_spine(&b, &e, &fresh, true);
        }
    }
    let old = export_names(&a);
    let a2 = subst_names(&a, &s);
    let inner: BTreeMap<String, Term> = s
        .iter()
        .filter(|(k, _)| !old.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let b2 = subst_names(&b, &inner);
    // A substituted term may have introduced new referents in export
    // position; they must not capture what is free in the right operand.
    let b_free = free_names(&b2);
    let mut a2 = a2;
    for n in export_names(&a2) {
        if !old.contains(&n) && b_free.contains(&n) {
            avoid.extend(all_names(&a2));
            avoid.extend(all_names(&b2));
            let fresh = fresh_name(stem(&n), &avoid);
            avoid.insert(fresh.clone());
            a2 = rename_spine(&a2, &n, &fresh, false);
        }
    }
    (a2, b2)
}

/// An ordered, type-checked substitution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(v: Var, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(v, t);
        s
    }

    pub fn insert(&mut self, v: Var, t: Term) -> Option<Term> {
        self.map.insert(v, t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// Capture-avoiding simultaneous substitution. Bound variables (including
/// DRS referents) are renamed with numeric suffixes whenever a substituted
/// term would otherwise be captured.
pub fn substitute(t: &Term, s: &Substitution) -> Result<Term, TermError> {
    let mut by_name = BTreeMap::new();
    for (v, u) in s.iter() {
        let found = type_of(u)?;
        if found != v.ty {
            return Err(TermError::TypeMismatch {
                var: v.name.clone(),
                expected: v.ty.clone(),
                found,
            });
        }
        if by_name.insert(v.name.clone(), u.clone()).is_some() {
            return Err(TermError::TypeMismatch {
                var: v.name.clone(),
                expected: v.ty.clone(),
                found: v.ty.clone(),
            });
        }
    }
    Ok(subst_names(t, &by_name))
}

/// Renames every binder of `t` (lambda, quantifier and DRS referents) to a
/// name outside `avoid`, extending `avoid` with the names chosen.
pub fn rename_apart(t: &Term, avoid: &mut BTreeSet<String>) -> Term {
    apart(t, &mut Vec::new(), avoid).0
}

type Renaming = Vec<(String, String)>;

fn dedupe_first(r: Renaming) -> Renaming {
    let mut out: Renaming = Vec::new();
    for (old, new) in r {
        if !out.iter().any(|(o, _)| *o == old) {
            out.push((old, new));
        }
    }
    out
}

fn push_scope(env: &mut Renaming, r: &Renaming) {
    // Leftmost export wins, so push in reverse to make it innermost.
    env.extend(r.iter().rev().cloned());
}

fn fresh_binder(v: &Var, avoid: &mut BTreeSet<String>) -> Var {
    let n = fresh_name(stem(&v.name), avoid);
    avoid.insert(n.clone());
    Var::new(n, v.ty.clone())
}

fn apart(t: &Term, env: &mut Renaming, avoid: &mut BTreeSet<String>) -> (Term, Renaming) {
    match t {
        Term::Var(v) => {
            let name = env
                .iter()
                .rev()
                .find(|(o, _)| *o == v.name)
                .map(|(_, n)| n.clone())
                .unwrap_or_else(|| v.name.clone());
            (Term::Var(Var::new(name, v.ty.clone())), Vec::new())
        }
        Term::Lam(x, b) => {
            let x2 = fresh_binder(x, avoid);
            env.push((x.name.clone(), x2.name.clone()));
            let (b2, _) = apart(b, env, avoid);
            env.pop();
            (Term::Lam(x2, Box::new(b2)), Vec::new())
        }
        Term::Quant {
            kind,
            var,
            restrictor,
            body,
        } => {
            let v2 = fresh_binder(var, avoid);
            env.push((var.name.clone(), v2.name.clone()));
            let r2 = restrictor.as_ref().map(|r| Box::new(apart(r, env, avoid).0));
            let b2 = apart(body, env, avoid).0;
            env.pop();
            (
                Term::Quant {
                    kind: *kind,
                    var: v2,
                    restrictor: r2,
                    body: Box::new(b2),
                },
                Vec::new(),
            )
        }
        Term::Drs(d) => {
            let universe: Vec<Var> = d.universe.iter().map(|v| fresh_binder(v, avoid)).collect();
            let renaming: Renaming = d
                .universe
                .iter()
                .zip(&universe)
                .map(|(o, n)| (o.name.clone(), n.name.clone()))
                .collect();
            let n = env.len();
            push_scope(env, &renaming);
            let conditions = d
                .conditions
                .iter()
                .map(|c| match c {
                    Condition::Implies(a, b) => {
                        let (a, b, _) = apart_pair(a, b, env, avoid);
                        Condition::Implies(a, b)
                    }
                    _ => c.map_operands(|o| apart(o, env, avoid).0),
                })
                .collect();
            env.truncate(n);
            (Term::Drs(Drs { universe, conditions }), renaming)
        }
        Term::Merge(a, b) => {
            let (a, b, r) = apart_pair(a, b, env, avoid);
            (Term::merge(a, b), r)
        }
        _ => (map_children(t, |c| apart(c, env, avoid).0), Vec::new()),
    }
}

fn apart_pair(a: &Term, b: &Term, env: &mut Renaming, avoid: &mut BTreeSet<String>) -> (Term, Term, Renaming) {
    let (a2, ra) = apart(a, env, avoid);
    let ra = dedupe_first(ra);
    let n = env.len();
    push_scope(env, &ra);
    let (b2, rb) = apart(b, env, avoid);
    env.truncate(n);
    let mut r = ra;
    r.extend(rb);
    (a2, b2, dedupe_first(r))
}

type Bindings = Vec<(String, usize)>;

struct Alpha {
    left: Bindings,
    right: Bindings,
    next: usize,
}

fn lookup(env: &Bindings, name: &str) -> Option<usize> {
    env.iter().rev().find(|(n, _)| n == name).map(|(_, i)| *i)
}

fn dedupe_bindings(b: Bindings) -> Bindings {
    let mut out: Bindings = Vec::new();
    for (n, i) in b {
        if !out.iter().any(|(m, _)| *m == n) {
            out.push((n, i));
        }
    }
    out
}

impl Alpha {
    fn bind(&mut self, a: &Var, b: &Var) -> bool {
        if a.ty != b.ty {
            return false;
        }
        let id = self.next;
        self.next += 1;
        self.left.push((a.name.clone(), id));
        self.right.push((b.name.clone(), id));
        true
    }

    fn push_exports(&mut self, l: &Bindings, r: &Bindings) -> (usize, usize) {
        let marks = (self.left.len(), self.right.len());
        self.left.extend(l.iter().rev().cloned());
        self.right.extend(r.iter().rev().cloned());
        marks
    }

    fn restore(&mut self, marks: (usize, usize)) {
        self.left.truncate(marks.0);
        self.right.truncate(marks.1);
    }

    /// Compares two terms; on success returns the bindings each exports.
    fn eq(&mut self, a: &Term, b: &Term) -> Option<(Bindings, Bindings)> {
        let none = || Some((Vec::new(), Vec::new()));
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                if x.ty != y.ty {
                    return None;
                }
                match (lookup(&self.left, &x.name), lookup(&self.right, &y.name)) {
                    (Some(i), Some(j)) if i == j => none(),
                    (None, None) if x.name == y.name => none(),
                    _ => None,
                }
            }
            (Term::Const(x), Term::Const(y)) => (x == y).then(|| (Vec::new(), Vec::new())),
            (Term::Idx(i, s), Term::Idx(j, t)) => (i == j && s == t).then(|| (Vec::new(), Vec::new())),
            (Term::Lam(x, p), Term::Lam(y, q)) => {
                let marks = (self.left.len(), self.right.len());
                let ok = self.bind(x, y) && self.eq(p, q).is_some();
                self.restore(marks);
                ok.then(|| (Vec::new(), Vec::new()))
            }
            (
                Term::Quant {
                    kind: k1,
                    var: v1,
                    restrictor: r1,
                    body: b1,
                },
                Term::Quant {
                    kind: k2,
                    var: v2,
                    restrictor: r2,
                    body: b2,
                },
            ) => {
                if k1 != k2 || r1.is_some() != r2.is_some() {
                    return None;
                }
                let marks = (self.left.len(), self.right.len());
                let ok = self.bind(v1, v2)
                    && match (r1, r2) {
                        (Some(p), Some(q)) => self.eq(p, q).is_some(),
                        _ => true,
                    }
                    && self.eq(b1, b2).is_some();
                self.restore(marks);
                ok.then(|| (Vec::new(), Vec::new()))
            }
            (Term::App(f1, a1), Term::App(f2, a2)) => {
                (self.eq(f1, f2).is_some() && self.eq(a1, a2).is_some()).then(|| (Vec::new(), Vec::new()))
            }
            (Term::Up(p), Term::Up(q)) | (Term::Down(p), Term::Down(q)) => {
                self.eq(p, q).map(|_| (Vec::new(), Vec::new()))
            }
            (Term::Conn(k1, xs), Term::Conn(k2, ys)) => {
                (k1 == k2 && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.eq(x, y).is_some()))
                    .then(|| (Vec::new(), Vec::new()))
            }
            (Term::Drs(d1), Term::Drs(d2)) => self.drs(d1, d2),
            (Term::Merge(a1, b1), Term::Merge(a2, b2)) => self.pair(a1, b1, a2, b2),
            _ => None,
        }
    }

    fn pair(&mut self, a1: &Term, b1: &Term, a2: &Term, b2: &Term) -> Option<(Bindings, Bindings)> {
        let (ea1, ea2) = self.eq(a1, a2)?;
        let (ea1, ea2) = (dedupe_bindings(ea1), dedupe_bindings(ea2));
        let marks = self.push_exports(&ea1, &ea2);
        let inner = self.eq(b1, b2);
        self.restore(marks);
        let (eb1, eb2) = inner?;
        let mut l = ea1;
        l.extend(eb1);
        let mut r = ea2;
        r.extend(eb2);
        Some((dedupe_bindings(l), dedupe_bindings(r)))
    }

    fn drs(&mut self, d1: &Drs, d2: &Drs) -> Option<(Bindings, Bindings)> {
        if d1.universe.len() != d2.universe.len() || d1.conditions.len() != d2.conditions.len() {
            return None;
        }
        let marks = (self.left.len(), self.right.len());
        let mut exported = (Vec::new(), Vec::new());
        let mut ok = true;
        for (u, v) in d1.universe.iter().zip(&d2.universe) {
            if !self.bind(u, v) {
                ok = false;
                break;
            }
            let id = self.next - 1;
            exported.0.push((u.name.clone(), id));
            exported.1.push((v.name.clone(), id));
        }
        if ok {
            // Universe entries are distinct in well-formed DRSs; the last
            // declaration is innermost if they are not.
            ok = d1
                .conditions
                .iter()
                .zip(&d2.conditions)
                .all(|(c1, c2)| self.cond(c1, c2));
        }
        self.restore(marks);
        ok.then_some(exported)
    }

    fn cond(&mut self, c1: &Condition, c2: &Condition) -> bool {
        match (c1, c2) {
            (Condition::Atom { pred: p, args: xs }, Condition::Atom { pred: q, args: ys }) => {
                p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.eq(x, y).is_some())
            }
            (Condition::Eq(a1, b1), Condition::Eq(a2, b2)) | (Condition::Or(a1, b1), Condition::Or(a2, b2)) => {
                self.eq(a1, a2).is_some() && self.eq(b1, b2).is_some()
            }
            (Condition::Not(a), Condition::Not(b)) => self.eq(a, b).is_some(),
            (Condition::Implies(a1, b1), Condition::Implies(a2, b2)) => self.pair(a1, b1, a2, b2).is_some(),
            _ => false,
        }
    }
}

/// Equality up to consistent renaming of bound variables and referents.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    Alpha {
        left: Vec::new(),
        right: Vec::new(),
        next: 0,
    }
    .eq(a, b)
    .is_some()
}
