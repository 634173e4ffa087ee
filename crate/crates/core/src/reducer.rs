//! Normalization by beta-reduction, intensional-operator cancellation and
//! DRS merging, one leftmost-outermost step at a time.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drt;
use crate::term::{
    all_names, exports, free_names, fresh_name, map_children, rename_apart, rename_spine, stem, subst_names, type_of,
    Condition, Term, TermError,
};

pub use crate::params::ReducerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Beta,
    Cancel,
    Merge,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Beta => "beta",
            Rule::Cancel => "cancel",
            Rule::Merge => "merge",
        }
    }

    /// The rule whose redex shape `t` has, if any.
    pub fn of_redex(t: &Term) -> Option<Rule> {
        match t {
            Term::App(f, _) if matches!(**f, Term::Lam(..)) => Some(Rule::Beta),
            Term::Down(b) if matches!(**b, Term::Up(_)) => Some(Rule::Cancel),
            Term::Merge(a, b) if matches!(**a, Term::Drs(_)) && matches!(**b, Term::Drs(_)) => Some(Rule::Merge),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: Rule,
    pub path: Vec<usize>,
    pub term: Term,
}

pub type ReductionTrace = Vec<TraceStep>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("no redex")]
    NoRedex,
    #[error("fuel exhausted after {} steps", trace.len())]
    FuelExhausted { term: Term, trace: ReductionTrace },
    #[error(transparent)]
    Term(#[from] TermError),
}

pub const DEFAULT_FUEL: usize = 10_000;

/// Path of the first subterm in preorder satisfying `pred`.
pub fn find_path(t: &Term, pred: &dyn Fn(&Term) -> bool) -> Option<Vec<usize>> {
    if pred(t) {
        return Some(Vec::new());
    }
    for (i, c) in t.children().into_iter().enumerate() {
        if let Some(mut p) = find_path(c, pred) {
            p.insert(0, i);
            return Some(p);
        }
    }
    None
}

/// Leftmost-outermost redex of any rule.
pub fn next_redex(t: &Term) -> Option<(Rule, Vec<usize>)> {
    let path = find_path(t, &|s| Rule::of_redex(s).is_some())?;
    let rule = Rule::of_redex(t.at_path(&path).expect("path from find_path"))?;
    Some((rule, path))
}

fn contract_beta(whole: &Term, redex: &Term, kind: ReducerKind) -> Term {
    let Term::App(f, arg) = redex else {
        unreachable!("not a beta redex")
    };
    let Term::Lam(x, body) = &**f else {
        unreachable!("not a beta redex")
    };
    match kind {
        ReducerKind::Substitution => subst_names(body, &BTreeMap::from([(x.name.clone(), (**arg).clone())])),
        ReducerKind::Metavariable => {
            let mut avoid = all_names(whole);
            avoid.extend(all_names(arg));
            let Term::Lam(meta, copy) = rename_apart(f, &mut avoid) else {
                unreachable!()
            };
            resolve(&copy, &meta.name, arg, &mut avoid)
        }
    }
}

/// Read-out of a body under the binding `meta := value`. Each occurrence
/// receives its own copy of `value` with fresh binders.
fn resolve(t: &Term, meta: &str, value: &Term, avoid: &mut BTreeSet<String>) -> Term {
    match t {
        Term::Var(v) if v.name == meta => rename_apart(value, avoid),
        _ => map_children(t, |c| resolve(c, meta, value, avoid)),
    }
}

/// Rewrites the redex at `path` with `rule`. Referents newly exported by
/// the contractum are renamed when they would capture free occurrences in
/// the material they come to scope over.
pub fn contract_at(t: &Term, path: &[usize], rule: Rule, kind: ReducerKind) -> Term {
    let redex = t.at_path(path).expect("valid redex path");
    let mut out = match rule {
        Rule::Beta => contract_beta(t, redex, kind),
        Rule::Cancel => match redex {
            Term::Down(b) => match &**b {
                Term::Up(e) => (**e).clone(),
                _ => unreachable!("not a cancel redex"),
            },
            _ => unreachable!("not a cancel redex"),
        },
        Rule::Merge => match redex {
            Term::Merge(a, b) => match (&**a, &**b) {
                (Term::Drs(a), Term::Drs(b)) => Term::Drs(drt::merge(a, b)),
                _ => unreachable!("not a merge redex"),
            },
            _ => unreachable!("not a merge redex"),
        },
    };
    let old: BTreeSet<String> = exports(redex).into_iter().map(|v| v.name).collect();
    let clash = scope_regions(t, path);
    let mut avoid = all_names(t);
    avoid.extend(all_names(&out));
    for v in exports(&out) {
        if !old.contains(&v.name) && clash.contains(&v.name) {
            let fresh = fresh_name(stem(&v.name), &avoid);
            avoid.insert(fresh.clone());
            out = rename_spine(&out, &v.name, &fresh, false);
        }
    }
    let mut result = t.clone();
    *result.at_path_mut(path).expect("valid redex path") = out;
    result
}

/// Names free in the material over which referents exported at `path`
/// would scope.
fn scope_regions(t: &Term, path: &[usize]) -> BTreeSet<String> {
    let mut regions = BTreeSet::new();
    let mut node = t;
    for &i in path {
        match node {
            Term::Merge(_, b) if i == 0 => regions.extend(free_names(b)),
            Term::Merge(..) => {}
            Term::Drs(d) => {
                regions.clear();
                let mut k = 0;
                for c in &d.conditions {
                    let n = c.operands().len();
                    if i < k + n {
                        if let Condition::Implies(_, cons) = c {
                            if i == k {
                                regions.extend(free_names(cons));
                            }
                        }
                        break;
                    }
                    k += n;
                }
            }
            _ => regions.clear(),
        }
        node = node.children()[i];
    }
    regions
}

fn single(t: &Term, rule: Rule, kind: ReducerKind) -> Result<Term, ReduceError> {
    let path = find_path(t, &|s| Rule::of_redex(s) == Some(rule)).ok_or(ReduceError::NoRedex)?;
    Ok(contract_at(t, &path, rule, kind))
}

/// Contracts the leftmost-outermost beta redex.
pub fn beta_step(t: &Term, kind: ReducerKind) -> Result<Term, ReduceError> {
    single(t, Rule::Beta, kind)
}

/// Rewrites the leftmost-outermost `down(up(E))` to `E`.
pub fn cancel_step(t: &Term) -> Result<Term, ReduceError> {
    single(t, Rule::Cancel, ReducerKind::Substitution)
}

/// Rewrites the leftmost-outermost merge of two DRS literals.
pub fn merge_step(t: &Term) -> Result<Term, ReduceError> {
    single(t, Rule::Merge, ReducerKind::Substitution)
}

/// One step at the leftmost-outermost redex of any rule.
pub fn step(t: &Term, kind: ReducerKind) -> Option<TraceStep> {
    let (rule, path) = next_redex(t)?;
    let term = contract_at(t, &path, rule, kind);
    Some(TraceStep { rule, path, term })
}

/// Reduces to normal form, recording every step.
pub fn normalize(t: &Term, kind: ReducerKind, fuel: usize) -> Result<(Term, ReductionTrace), ReduceError> {
    type_of(t)?;
    let mut cur = t.clone();
    let mut trace = Vec::new();
    while let Some(s) = step(&cur, kind) {
        if trace.len() == fuel {
            return Err(ReduceError::FuelExhausted { term: cur, trace });
        }
        cur = s.term.clone();
        trace.push(s);
    }
    Ok((cur, trace))
}

/// Re-applies each recorded step and checks it reproduces the trace.
pub fn replay(start: &Term, trace: &ReductionTrace, kind: ReducerKind) -> bool {
    let mut cur = start.clone();
    for s in trace {
        match cur.at_path(&s.path) {
            Some(r) if Rule::of_redex(r) == Some(s.rule) => {}
            _ => return false,
        }
        cur = contract_at(&cur, &s.path, s.rule, kind);
        if cur != s.term {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{alpha_eq, parse_term, Signature};

    fn t(s: &str) -> Term {
        parse_term(s, &Signature::default()).unwrap()
    }

    #[test]
    fn beta_examples() {
        for &kind in ReducerKind::ALL {
            let out = beta_step(&t("app(lam(x, laugh(x)), anna)"), kind).unwrap();
            assert!(alpha_eq(&out, &t("laugh(anna)")));
            assert_eq!(beta_step(&t("lam(x, x)"), kind), Err(ReduceError::NoRedex));
            let sig = [("f", crate::term::parse_type("e -> e -> t").unwrap())]
                .into_iter()
                .collect();
            let capture = parse_term("app(lam(x, lam(y, f(x, y))), var(y))", &sig).unwrap();
            let out = beta_step(&capture, kind).unwrap();
            assert!(alpha_eq(&out, &parse_term("lam(z, f(var(y), z))", &sig).unwrap()));
        }
        let sig = [("f", crate::term::parse_type("e -> e -> t").unwrap())]
            .into_iter()
            .collect();
        let capture = parse_term("app(lam(x, lam(y, f(x, y))), var(y))", &sig).unwrap();
        let out = beta_step(&capture, ReducerKind::Substitution).unwrap();
        assert_eq!(out, parse_term("lam(y1, f(var(y), y1))", &sig).unwrap());
    }

    #[test]
    fn cancel_examples() {
        assert_eq!(cancel_step(&t("down(up(walk:<e,t>))")).unwrap(), t("walk:<e,t>"));
        assert_eq!(cancel_step(&t("up(down(var(w:<s,<e,t>>)))")), Err(ReduceError::NoRedex));
        assert_eq!(
            cancel_step(&t("app(down(up(lam(x, walk(x)))), anna)")).unwrap(),
            t("app(lam(x, walk(x)), anna)")
        );
    }

    #[test]
    fn normalize_examples() {
        let ptq = t("app(lam(P:<s,<e,t>>, app(down(P), anna)), up(lam(x, laugh(x))))");
        let (nf, trace) = normalize(&ptq, ReducerKind::Substitution, DEFAULT_FUEL).unwrap();
        assert_eq!(nf, t("laugh(anna)"));
        assert_eq!(trace.len(), 3);
        assert!(replay(&ptq, &trace, ReducerKind::Substitution));

        let (nf, trace) = normalize(&t("anna"), ReducerKind::Substitution, 10).unwrap();
        assert_eq!(nf, t("anna"));
        assert!(trace.is_empty());

        let m = t("merge(drs([x],[man(x)]), drs([y],[laugh(y)]))");
        let (nf, _) = normalize(&m, ReducerKind::Metavariable, 10).unwrap();
        assert_eq!(nf, t("drs([x, y],[man(x), laugh(y)])"));
    }

    #[test]
    fn fuel_exhaustion_keeps_partial_trace() {
        let ptq = t("app(lam(P:<s,<e,t>>, app(down(P), anna)), up(lam(x, laugh(x))))");
        match normalize(&ptq, ReducerKind::Substitution, 2) {
            Err(ReduceError::FuelExhausted { trace, .. }) => assert_eq!(trace.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contraction_does_not_let_new_referents_capture() {
        // After the beta step the DRS exports x into the right operand,
        // where x is free.
        let term = t("merge(app(lam(p:t, p), drs([x],[man(x)])), walk(var(x)))");
        for &kind in ReducerKind::ALL {
            let (nf, _) = normalize(&term, kind, 10).unwrap();
            assert_eq!(crate::term::free_vars(&nf).len(), 1, "{nf}");
        }
    }
}
