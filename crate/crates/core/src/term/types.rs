use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Condition, Connective, Term};

/// Semantic types: entities, truth values, worlds and functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SemType {
    E,
    T,
    S,
    Fn(Box<SemType>, Box<SemType>),
}

impl SemType {
    pub fn func(dom: SemType, cod: SemType) -> SemType {
        SemType::Fn(Box::new(dom), Box::new(cod))
    }

    /// `e -> t`
    pub fn pred1() -> SemType {
        SemType::func(SemType::E, SemType::T)
    }

    /// Generalised quantifier over the given property type: `(p -> t)`.
    pub fn quantifier_over(property: SemType) -> SemType {
        SemType::func(property, SemType::T)
    }

    /// Intension of a type: `s -> ty`.
    pub fn intension(ty: SemType) -> SemType {
        SemType::func(SemType::S, ty)
    }

    pub fn domain(&self) -> Option<&SemType> {
        match self {
            SemType::Fn(d, _) => Some(d),
            _ => None,
        }
    }

    pub fn codomain(&self) -> Option<&SemType> {
        match self {
            SemType::Fn(_, c) => Some(c),
            _ => None,
        }
    }

    /// True for `(e->t)->t` and `((s->(e->t))->t)`, the types a stored
    /// noun phrase meaning may have.
    pub fn is_quantifier(&self) -> bool {
        let pred = SemType::pred1();
        *self == SemType::quantifier_over(pred.clone()) || *self == SemType::quantifier_over(SemType::intension(pred))
    }

    /// `s` may only occur as the domain of a function type.
    pub fn is_well_formed(&self) -> bool {
        fn go(t: &SemType, top: bool) -> bool {
            match t {
                SemType::S => !top,
                SemType::E | SemType::T => true,
                SemType::Fn(d, c) => go(d, false) && go(c, true),
            }
        }
        go(self, true)
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::E => f.write_str("e"),
            SemType::T => f.write_str("t"),
            SemType::S => f.write_str("s"),
            SemType::Fn(d, c) => write!(f, "<{d},{c}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("ill-typed term at path {path:?}: {reason}")]
    IllTyped { path: Vec<usize>, reason: String },
    #[error("type mismatch for {var}: expected {expected}, found {found}")]
    TypeMismatch {
        var: String,
        expected: SemType,
        found: SemType,
    },
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

struct Checker {
    path: Vec<usize>,
    /// Innermost binding last.
    scope: Vec<(String, SemType)>,
}

impl Checker {
    fn fail<T>(&self, reason: impl Into<String>) -> Result<T, TermError> {
        Err(TermError::IllTyped {
            path: self.path.clone(),
            reason: reason.into(),
        })
    }

    fn child(&mut self, i: usize, t: &Term) -> Result<SemType, TermError> {
        self.path.push(i);
        let r = self.check(t);
        self.path.pop();
        r
    }

    fn expect(&mut self, i: usize, t: &Term, want: &SemType) -> Result<(), TermError> {
        let got = self.child(i, t)?;
        if &got != want {
            self.path.push(i);
            let r = self.fail(format!("expected {want}, found {got}"));
            self.path.pop();
            return r;
        }
        Ok(())
    }

    fn bind<R>(&mut self, vars: &[(String, SemType)], f: impl FnOnce(&mut Self) -> R) -> R {
        let n = self.scope.len();
        self.scope.extend(vars.iter().cloned());
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    /// Referents a term exports, with their types.
    fn exported(t: &Term) -> Vec<(String, SemType)> {
        super::exports(t).into_iter().map(|v| (v.name, v.ty)).collect()
    }

    fn check(&mut self, t: &Term) -> Result<SemType, TermError> {
        match t {
            Term::Var(v) => {
                if let Some((_, ty)) = self.scope.iter().rev().find(|(n, _)| *n == v.name) {
                    if *ty != v.ty {
                        return self.fail(format!("variable {} used at {} but bound at {}", v.name, v.ty, ty));
                    }
                }
                Ok(v.ty.clone())
            }
            Term::Const(c) => Ok(c.ty.clone()),
            Term::Idx(_, ty) => Ok(ty.clone()),
            Term::Lam(x, b) => {
                let body = self.bind(&[(x.name.clone(), x.ty.clone())], |c| c.child(0, b))?;
                Ok(SemType::func(x.ty.clone(), body))
            }
            Term::App(f, a) => {
                let ft = self.child(0, f)?;
                let at = self.child(1, a)?;
                match ft {
                    SemType::Fn(d, c) if *d == at => Ok(*c),
                    SemType::Fn(d, _) => self.fail(format!("argument of type {at} where {d} is expected")),
                    other => self.fail(format!("applying a term of type {other}")),
                }
            }
            Term::Up(b) => Ok(SemType::intension(self.child(0, b)?)),
            Term::Down(b) => match self.child(0, b)? {
                SemType::Fn(d, c) if *d == SemType::S => Ok(*c),
                other => self.fail(format!("extension of a term of type {other}")),
            },
            Term::Quant {
                var, restrictor, body, ..
            } => {
                self.bind(&[(var.name.clone(), var.ty.clone())], |c| {
                    let mut i = 0;
                    if let Some(r) = restrictor {
                        c.expect(0, r, &SemType::T)?;
                        i = 1;
                    }
                    c.expect(i, body, &SemType::T)
                })?;
                Ok(SemType::T)
            }
            Term::Conn(k, args) => {
                let arity_ok = match k {
                    Connective::True => args.is_empty(),
                    Connective::Not => args.len() == 1,
                    Connective::Implies | Connective::Eq => args.len() == 2,
                    Connective::And | Connective::Or => args.len() >= 2,
                };
                if !arity_ok {
                    return self.fail(format!("{} with {} arguments", k.keyword(), args.len()));
                }
                if *k == Connective::Eq {
                    let a = self.child(0, &args[0])?;
                    self.expect(1, &args[1], &a)?;
                } else {
                    for (i, a) in args.iter().enumerate() {
                        self.expect(i, a, &SemType::T)?;
                    }
                }
                Ok(SemType::T)
            }
            Term::Drs(d) => {
                let mut seen = HashMap::new();
                for v in &d.universe {
                    if v.ty != SemType::E {
                        return self.fail(format!("referent {} has type {}", v.name, v.ty));
                    }
                    if seen.insert(v.name.clone(), ()).is_some() {
                        return self.fail(format!("referent {} declared twice", v.name));
                    }
                }
                let universe: Vec<_> = d.universe.iter().map(|v| (v.name.clone(), v.ty.clone())).collect();
                self.bind(&universe, |c| {
                    let mut i = 0;
                    for cond in &d.conditions {
                        match cond {
                            Condition::Atom { args, .. } => {
                                for a in args {
                                    c.expect(i, a, &SemType::E)?;
                                    i += 1;
                                }
                            }
                            Condition::Eq(a, b) => {
                                c.expect(i, a, &SemType::E)?;
                                c.expect(i + 1, b, &SemType::E)?;
                                i += 2;
                            }
                            Condition::Not(a) => {
                                c.expect(i, a, &SemType::T)?;
                                i += 1;
                            }
                            Condition::Or(a, b) => {
                                c.expect(i, a, &SemType::T)?;
                                c.expect(i + 1, b, &SemType::T)?;
                                i += 2;
                            }
                            Condition::Implies(a, b) => {
                                c.expect(i, a, &SemType::T)?;
                                let ex = Self::exported(a);
                                c.bind(&ex, |c| c.expect(i + 1, b, &SemType::T))?;
                                i += 2;
                            }
                        }
                    }
                    Ok(())
                })?;
                Ok(SemType::T)
            }
            Term::Merge(a, b) => {
                self.expect(0, a, &SemType::T)?;
                let ex = Self::exported(a);
                self.bind(&ex, |c| c.expect(1, b, &SemType::T))?;
                Ok(SemType::T)
            }
        }
    }
}

/// Principal type of a term, or the path to the first offending subterm.
pub fn type_of(t: &Term) -> Result<SemType, TermError> {
    Checker {
        path: Vec::new(),
        scope: Vec::new(),
    }
    .check(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Var;

    fn laugh() -> Term {
        Term::constant("laugh", SemType::pred1())
    }

    fn anna() -> Term {
        Term::constant("anna", SemType::E)
    }

    #[test]
    fn constants_and_application() {
        assert_eq!(type_of(&anna()).unwrap(), SemType::E);
        assert_eq!(type_of(&Term::app(laugh(), anna())).unwrap(), SemType::T);
    }

    #[test]
    fn domain_mismatch_reports_path() {
        let err = type_of(&Term::app(anna(), laugh())).unwrap_err();
        assert!(matches!(err, TermError::IllTyped { ref path, .. } if path.is_empty()));
        let nested = Term::lam(Var::entity("x"), Term::app(anna(), laugh()));
        let err = type_of(&nested).unwrap_err();
        assert!(matches!(err, TermError::IllTyped { ref path, .. } if *path == vec![0]));
    }

    #[test]
    fn intensional_operators() {
        let walk = Term::constant("walk", SemType::pred1());
        let up = Term::up(walk.clone());
        assert_eq!(type_of(&up).unwrap(), SemType::intension(SemType::pred1()));
        assert_eq!(type_of(&Term::down(up)).unwrap(), SemType::pred1());
        assert!(type_of(&Term::down(walk)).is_err());
    }

    #[test]
    fn merge_binds_exported_referents() {
        let x = Var::entity("x");
        let left = Term::drs(crate::term::Drs::new(vec![x.clone()], vec![]));
        let right = Term::app(laugh(), Term::Var(x));
        assert_eq!(type_of(&Term::merge(left, right)).unwrap(), SemType::T);
    }

    #[test]
    fn well_formed_types() {
        assert!(SemType::intension(SemType::pred1()).is_well_formed());
        assert!(!SemType::S.is_well_formed());
        assert!(!SemType::func(SemType::E, SemType::S).is_well_formed());
    }

    #[test]
    fn quantifier_types() {
        assert!(SemType::quantifier_over(SemType::pred1()).is_quantifier());
        assert!(SemType::quantifier_over(SemType::intension(SemType::pred1())).is_quantifier());
        assert!(!SemType::pred1().is_quantifier());
    }
}
