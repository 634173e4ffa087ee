//! Cooper storage and its nested variant. Plain Cooper storage is the
//! special case in which stored items carry no store of their own.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{FormalismId, StorageMode};
use crate::reducer::{normalize, ReduceError, ReducerKind, DEFAULT_FUEL};
use crate::term::{
    all_names, alpha_eq, compact, fresh_name, map_children, type_of, SemType, Signature, Term, TermError, TermParser,
    Var,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredTerm {
    pub body: Term,
    pub store: Vec<StoreEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreEntry {
    pub index: u32,
    pub quantifier: StoredTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StorageError {
    #[error("cannot store a term of type {0}")]
    TypeError(SemType),
    #[error("index {0} is nested inside another entry and not yet retrievable")]
    NotRetrievable(u32),
    #[error("no store entry with index {0}")]
    UnknownIndex(u32),
    #[error("reading still contains store index {index}: {reading}")]
    FreeIndexRemaining { index: u32, reading: Term },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

impl StoredTerm {
    pub fn plain(body: Term) -> Self {
        StoredTerm {
            body,
            store: Vec::new(),
        }
    }

    /// Every index in the structure, nested ones included.
    pub fn indices(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for e in &self.store {
            out.push(e.index);
            out.extend(e.quantifier.indices());
        }
        out
    }

    /// Indices retrievable right now.
    pub fn top_indices(&self) -> Vec<u32> {
        self.store.iter().map(|e| e.index).collect()
    }

    pub fn max_index(&self) -> u32 {
        self.indices().into_iter().max().unwrap_or(0)
    }
}

impl fmt::Display for StoredTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_stored(self))
    }
}

/// Replaces a quantifier-typed meaning by an indexed placeholder and puts
/// it in the store. In nested mode the stored item keeps its own store;
/// in Cooper mode that store is flattened into the result.
pub fn store(np: &StoredTerm, index: u32, mode: StorageMode) -> Result<StoredTerm, StorageError> {
    let ty = type_of(&np.body)?;
    if !ty.is_quantifier() {
        return Err(StorageError::TypeError(ty));
    }
    let property = ty.domain().expect("quantifier type").clone();
    let p = Var::new("P", property.clone());
    let head = if property == SemType::pred1() {
        Term::Var(p.clone())
    } else {
        Term::down(Term::Var(p.clone()))
    };
    let body = Term::lam(p, Term::app(head, Term::Idx(index, SemType::E)));
    let (quantifier, mut rest) = match mode {
        StorageMode::Nested => (np.clone(), Vec::new()),
        _ => (StoredTerm::plain(np.body.clone()), np.store.clone()),
    };
    rest.push(StoreEntry { index, quantifier });
    Ok(StoredTerm { body, store: rest })
}

fn replace_idx(t: &Term, index: u32, with: &Term) -> Term {
    match t {
        Term::Idx(i, _) if *i == index => with.clone(),
        _ => map_children(t, |c| replace_idx(c, index, with)),
    }
}

fn nested_contains(entries: &[StoreEntry], index: u32) -> bool {
    entries
        .iter()
        .any(|e| e.quantifier.store.iter().any(|n| n.index == index) || nested_contains(&e.quantifier.store, index))
}

/// Discharges the top-level entry `index`, giving it scope over the body.
pub fn retrieve(st: &StoredTerm, index: u32, formalism: FormalismId) -> Result<StoredTerm, StorageError> {
    let Some(pos) = st.store.iter().position(|e| e.index == index) else {
        return Err(if nested_contains(&st.store, index) {
            StorageError::NotRetrievable(index)
        } else {
            StorageError::UnknownIndex(index)
        });
    };
    let entry = &st.store[pos];
    let mut avoid = all_names(&st.body);
    avoid.extend(all_names(&entry.quantifier.body));
    let x = Var::entity(fresh_name("x", &avoid));
    let scope = Term::lam(x.clone(), replace_idx(&st.body, index, &Term::Var(x)));
    let scope = if formalism.is_intensional() {
        Term::up(scope)
    } else {
        scope
    };
    let body = Term::app(entry.quantifier.body.clone(), scope);
    type_of(&body)?;
    let mut rest: Vec<StoreEntry> = st.store.clone();
    rest.remove(pos);
    rest.extend(entry.quantifier.store.iter().cloned());
    Ok(StoredTerm { body, store: rest })
}

/// Outcome of trying every retrieval order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Readings {
    /// Distinct normal forms, in order of first discovery.
    pub readings: Vec<Term>,
    /// Retrieval orders explored, duplicates included.
    pub orders: Vec<Vec<u32>>,
    /// Orders whose result still contains a store index, with that result.
    pub violations: Vec<(Vec<u32>, Term)>,
}

/// Depth-first over all retrieval orders, largest index first. Quantifiers
/// are stored left to right, so the first reading keeps surface scope.
pub fn enumerate_readings(
    st: &StoredTerm,
    formalism: FormalismId,
    kind: ReducerKind,
) -> Result<Readings, StorageError> {
    let mut out = Readings::default();
    let mut order = Vec::new();
    walk(st, formalism, kind, &mut order, &mut out)?;
    Ok(out)
}

fn walk(
    st: &StoredTerm,
    formalism: FormalismId,
    kind: ReducerKind,
    order: &mut Vec<u32>,
    out: &mut Readings,
) -> Result<(), StorageError> {
    if st.store.is_empty() {
        let (nf, _) = normalize(&st.body, kind, DEFAULT_FUEL)?;
        out.orders.push(order.clone());
        if nf.contains_idx() {
            out.violations.push((order.clone(), nf));
        } else if !out.readings.iter().any(|r| alpha_eq(r, &nf)) {
            out.readings.push(nf);
        }
        return Ok(());
    }
    let mut tops = st.top_indices();
    tops.sort_unstable_by(|a, b| b.cmp(a));
    for i in tops {
        let next = retrieve(st, i, formalism)?;
        order.push(i);
        walk(&next, formalism, kind, order, out)?;
        order.pop();
    }
    Ok(())
}

/// All readings, or an error naming the first result with a leftover index.
pub fn all_readings(st: &StoredTerm, formalism: FormalismId) -> Result<Vec<Term>, StorageError> {
    all_readings_with(st, formalism, ReducerKind::Substitution)
}

pub fn all_readings_with(
    st: &StoredTerm,
    formalism: FormalismId,
    kind: ReducerKind,
) -> Result<Vec<Term>, StorageError> {
    let r = enumerate_readings(st, formalism, kind)?;
    if let Some((_, reading)) = r.violations.into_iter().next() {
        let mut index = 0;
        reading.any(&mut |t| match t {
            Term::Idx(i, _) => {
                index = *i;
                true
            }
            _ => false,
        });
        return Err(StorageError::FreeIndexRemaining { index, reading });
    }
    Ok(r.readings)
}

/// `st(Body, [entry(I, ST), ...])` with bodies in compact notation.
pub fn print_stored(st: &StoredTerm) -> String {
    let entries: Vec<String> = st
        .store
        .iter()
        .map(|e| format!("entry({}, {})", e.index, print_stored(&e.quantifier)))
        .collect();
    format!("st({}, [{}])", compact(&st.body), entries.join(", "))
}

pub fn parse_stored(src: &str, sig: &Signature) -> Result<StoredTerm, TermError> {
    let mut p = TermParser::new(src, sig)?;
    let st = stored(&mut p)?;
    p.expect_end()?;
    Ok(st)
}

fn stored(p: &mut TermParser<'_>) -> Result<StoredTerm, TermError> {
    if p.ident()? != "st" {
        return p.error("expected `st`");
    }
    p.expect_sym("(")?;
    let body = p.term(None)?;
    p.expect_sym(",")?;
    p.expect_sym("[")?;
    let mut store = Vec::new();
    let mut seen = BTreeSet::new();
    while !p.is_sym("]") {
        if !store.is_empty() {
            p.expect_sym(",")?;
        }
        if p.ident()? != "entry" {
            return p.error("expected `entry`");
        }
        p.expect_sym("(")?;
        let index = p.int()?;
        if !seen.insert(index) {
            return p.error(format!("duplicate store index {index}"));
        }
        p.expect_sym(",")?;
        let quantifier = stored(p)?;
        p.expect_sym(")")?;
        store.push(StoreEntry { index, quantifier });
    }
    p.expect_sym("]")?;
    p.expect_sym(")")?;
    Ok(StoredTerm { body, store })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn sig() -> Signature {
        let mut s = Signature::new();
        for (n, t) in [
            ("every", "<<e,t>,<<e,t>,t>>"),
            ("a", "<<e,t>,<<e,t>,t>>"),
            ("man", "<e,t>"),
            ("woman", "<e,t>"),
            ("love", "<e,<e,t>>"),
            ("laugh", "<e,t>"),
            ("anna", "e"),
        ] {
            s.insert(n, crate::term::parse_type(t).unwrap());
        }
        s
    }

    fn t(s: &str) -> Term {
        parse_term(s, &sig()).unwrap()
    }

    fn q(s: &str) -> StoredTerm {
        StoredTerm::plain(t(s))
    }

    #[test]
    fn store_example() {
        let st = store(&q("app(every, man)"), 1, StorageMode::Cooper).unwrap();
        assert!(alpha_eq(&st.body, &t("lam(P:<e,t>, app(P, idx(1)))")));
        assert_eq!(
            st.store,
            vec![StoreEntry {
                index: 1,
                quantifier: q("app(every, man)")
            }]
        );
        assert!(matches!(
            store(&q("anna"), 1, StorageMode::Cooper),
            Err(StorageError::TypeError(SemType::E))
        ));
    }

    fn two_quantifiers() -> StoredTerm {
        StoredTerm {
            body: t("love(idx(1), idx(2))"),
            store: vec![
                StoreEntry {
                    index: 1,
                    quantifier: q("app(every, man)"),
                },
                StoreEntry {
                    index: 2,
                    quantifier: q("app(a, woman)"),
                },
            ],
        }
    }

    #[test]
    fn retrieval_orders_give_both_scopings() {
        let st = two_quantifiers();
        let r = retrieve(&retrieve(&st, 2, FormalismId::Lgq).unwrap(), 1, FormalismId::Lgq).unwrap();
        assert!(r.store.is_empty());
        let (nf, _) = normalize(&r.body, ReducerKind::Substitution, 100).unwrap();
        assert!(alpha_eq(
            &nf,
            &t("app(every, man, lam(x, app(a, woman, lam(y, love(x, y)))))")
        ));
        let readings = all_readings(&st, FormalismId::Lgq).unwrap();
        assert_eq!(readings.len(), 2);
        assert!(!alpha_eq(&readings[0], &readings[1]));
    }

    #[test]
    fn nested_entries_wait_for_their_host() {
        let inner = store(&q("app(a, woman)"), 2, StorageMode::Nested).unwrap();
        let host = StoredTerm {
            body: t("app(every, lam(y, love(y, idx(2))))"),
            store: inner.store.clone(),
        };
        let st = store(&host, 1, StorageMode::Nested).unwrap();
        assert_eq!(st.top_indices(), [1]);
        assert_eq!(retrieve(&st, 2, FormalismId::Lgq), Err(StorageError::NotRetrievable(2)));
        assert_eq!(retrieve(&st, 7, FormalismId::Lgq), Err(StorageError::UnknownIndex(7)));

        let sentence = StoredTerm {
            body: t("app(lam(P:<e,t>, app(P, idx(1))), laugh)"),
            store: st.store.clone(),
        };
        let r = enumerate_readings(&sentence, FormalismId::Lgq, ReducerKind::Substitution).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.readings.len(), 1);

        // The flat store lets the inner quantifier go first and leaves its
        // index unbound.
        let flat = store(&host, 1, StorageMode::Cooper).unwrap();
        let sentence = StoredTerm {
            store: flat.store,
            ..sentence
        };
        let r = enumerate_readings(&sentence, FormalismId::Lgq, ReducerKind::Substitution).unwrap();
        assert_eq!(r.orders.len(), 2);
        assert_eq!(r.violations.len(), 1);
        assert!(matches!(
            all_readings(&sentence, FormalismId::Lgq),
            Err(StorageError::FreeIndexRemaining { index: 2, .. })
        ));
    }

    #[test]
    fn intensional_retrieval_wraps_scope() {
        let mut s = sig();
        s.insert("every_i", crate::term::parse_type("<<s,<e,t>>,t>").unwrap());
        let np = StoredTerm::plain(parse_term("every_i", &s).unwrap());
        let placeholder = store(&np, 1, StorageMode::Cooper).unwrap();
        let body = Term::app(
            placeholder.body.clone(),
            parse_term("up(lam(x, laugh(x)))", &s).unwrap(),
        );
        let st = StoredTerm {
            body,
            store: placeholder.store,
        };
        let r = retrieve(&st, 1, FormalismId::Il).unwrap();
        assert!(matches!(&r.body, Term::App(_, arg) if matches!(**arg, Term::Up(_))));
        let (nf, _) = normalize(&r.body, ReducerKind::Substitution, 100).unwrap();
        assert!(alpha_eq(
            &nf,
            &parse_term("app(every_i, up(lam(x, laugh(x))))", &s).unwrap()
        ));
    }

    #[test]
    fn serialization_round_trip() {
        let st = two_quantifiers();
        let nested = store(
            &StoredTerm {
                body: t("app(every, man)"),
                store: st.store.clone(),
            },
            3,
            StorageMode::Nested,
        )
        .unwrap();
        for x in [st, nested] {
            let text = print_stored(&x);
            assert_eq!(parse_stored(&text, &sig()).unwrap(), x, "{text}");
        }
    }
}
