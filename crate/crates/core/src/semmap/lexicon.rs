//! Lexical macros and the lexicon file format.
//!
//! ```text
//! lexicon fragment.
//! macro propername(A:e) for il : lam(P:<s,<e,t>>, app(down(P), A)).
//! entry anna : propername(anna).
//! ```
//!
//! A macro body is a closed term apart from its parameters. Arguments in
//! entries are constant names and take the parameter's type. A parameter
//! used as the predicate of a DRS condition is replaced by the argument's
//! name.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SemmapError;
use crate::datafile::FileError;
use crate::params::FormalismId;
use crate::term::{
    canonical, free_vars, type_of, Condition, SemType, Signature, Substitution, Term, TermError, TermParser, Var,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Macro {
    pub name: String,
    pub formalism: FormalismId,
    pub params: Vec<Var>,
    pub body: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub word: String,
    pub macro_name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    pub id: String,
    pub macros: Vec<Macro>,
    pub entries: Vec<Entry>,
}

impl Macro {
    /// Fills the parameters with constants of the parameter types.
    pub fn expand(&self, args: &[String]) -> Result<Term, TermError> {
        if args.len() != self.params.len() {
            return Err(TermError::IllTyped {
                path: Vec::new(),
                reason: format!(
                    "macro `{}` takes {} arguments, got {}",
                    self.name,
                    self.params.len(),
                    args.len()
                ),
            });
        }
        let mut body = self.body.clone();
        let mut sub = Substitution::new();
        for (p, a) in self.params.iter().zip(args) {
            body = rename_pred(&body, &p.name, a);
            sub.insert(p.clone(), Term::constant(a, p.ty.clone()));
        }
        let out = crate::term::substitute(&body, &sub)?;
        type_of(&out)?;
        Ok(out)
    }
}

fn rename_pred(t: &Term, from: &str, to: &str) -> Term {
    match t {
        Term::Drs(d) => {
            let mut d = d.clone();
            for c in &mut d.conditions {
                if let Condition::Atom { pred, .. } = c {
                    if pred == from {
                        *pred = to.to_string();
                    }
                }
                *c = c.map_operands(|o| rename_pred(o, from, to));
            }
            Term::Drs(d)
        }
        _ => crate::term::map_children(t, |c| rename_pred(c, from, to)),
    }
}

impl Lexicon {
    pub fn find_macro(&self, name: &str, formalism: FormalismId) -> Option<&Macro> {
        self.macros.iter().find(|m| m.name == name && m.formalism == formalism)
    }

    pub fn entry(&self, word: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.word == word)
    }

    /// Formalisms for which every entry has a macro.
    pub fn formalisms(&self) -> Vec<FormalismId> {
        FormalismId::ALL
            .iter()
            .copied()
            .filter(|&f| self.entries.iter().all(|e| self.find_macro(&e.macro_name, f).is_some()))
            .collect()
    }

    pub fn supports(&self, formalism: FormalismId) -> bool {
        self.formalisms().contains(&formalism)
    }

    /// The meaning of `word` in `formalism`.
    pub fn expand(&self, word: &str, formalism: FormalismId) -> Result<Term, SemmapError> {
        let missing = || SemmapError::MissingMacro {
            word: word.to_string(),
            formalism,
        };
        let e = self.entry(word).ok_or_else(missing)?;
        let m = self.find_macro(&e.macro_name, formalism).ok_or_else(missing)?;
        m.expand(&e.args).map_err(|err| SemmapError::IllTypedMacro {
            word: word.to_string(),
            path: match &err {
                TermError::IllTyped { path, .. } => path.clone(),
                _ => Vec::new(),
            },
            reason: err.to_string(),
        })
    }

    pub fn parse(src: &str) -> Result<Lexicon, FileError> {
        let sig = Signature::new();
        let mut p = TermParser::new(src, &sig).map_err(|e| FileError::from_term(src, e, 0))?;
        let mut id = None;
        let mut macros: Vec<Macro> = Vec::new();
        let mut entries: Vec<Entry> = Vec::new();
        while !p.at_end() {
            let at = p.offset();
            let err = |e: TermError| FileError::from_term(src, e, at);
            match p.ident().map_err(err)?.as_str() {
                "lexicon" => id = Some(p.ident().map_err(err)?),
                "macro" => {
                    let m = parse_macro(&mut p).map_err(err)?;
                    if macros.iter().any(|o| o.name == m.name && o.formalism == m.formalism) {
                        return Err(FileError::at(
                            src,
                            at,
                            format!("macro `{}` defined twice for {}", m.name, m.formalism),
                        ));
                    }
                    macros.push(m);
                }
                "entry" => {
                    let mut words = vec![p.ident().map_err(err)?];
                    while p.eat_sym(",") {
                        words.push(p.ident().map_err(err)?);
                    }
                    p.expect_sym(":").map_err(err)?;
                    let macro_name = p.ident().map_err(err)?;
                    let mut args = Vec::new();
                    if p.eat_sym("(") {
                        loop {
                            args.push(p.ident().map_err(err)?);
                            if !p.eat_sym(",") {
                                break;
                            }
                        }
                        p.expect_sym(")").map_err(err)?;
                    }
                    for word in words {
                        if entries.iter().any(|e| e.word == word) {
                            return Err(FileError::at(src, at, format!("word `{word}` listed twice")));
                        }
                        entries.push(Entry {
                            word,
                            macro_name: macro_name.clone(),
                            args: args.clone(),
                        });
                    }
                }
                other => return Err(FileError::at(src, at, format!("unknown statement `{other}`"))),
            }
            p.expect_sym(".").map_err(err)?;
        }
        let lex = Lexicon {
            id: id.ok_or_else(|| FileError::at(src, src.len(), "missing `lexicon` line"))?,
            macros,
            entries,
        };
        for e in &lex.entries {
            let arity = lex
                .macros
                .iter()
                .find(|m| m.name == e.macro_name)
                .map(|m| m.params.len());
            match arity {
                None => {
                    return Err(FileError::at(
                        src,
                        0,
                        format!("entry `{}` uses unknown macro `{}`", e.word, e.macro_name),
                    ))
                }
                Some(n) if n != e.args.len() => {
                    return Err(FileError::at(
                        src,
                        0,
                        format!(
                            "entry `{}` gives {} arguments to `{}`",
                            e.word,
                            e.args.len(),
                            e.macro_name
                        ),
                    ))
                }
                _ => {}
            }
        }
        Ok(lex)
    }

    /// File text with bodies in canonical notation; parses back to an
    /// equal lexicon.
    pub fn to_text(&self) -> String {
        let mut out = format!("lexicon {}.\n", self.id);
        for m in &self.macros {
            let params: Vec<String> = m.params.iter().map(|v| format!("{}:{}", v.name, v.ty)).collect();
            let head = if params.is_empty() {
                m.name.clone()
            } else {
                format!("{}({})", m.name, params.join(", "))
            };
            out.push_str(&format!("macro {head} for {} : {}.\n", m.formalism, canonical(&m.body)));
        }
        for e in &self.entries {
            let call = if e.args.is_empty() {
                e.macro_name.clone()
            } else {
                format!("{}({})", e.macro_name, e.args.join(", "))
            };
            out.push_str(&format!("entry {} : {call}.\n", e.word));
        }
        out
    }
}

fn parse_macro(p: &mut TermParser<'_>) -> Result<Macro, TermError> {
    let name = p.ident()?;
    let mut params = Vec::new();
    if p.eat_sym("(") {
        loop {
            let v = p.ident()?;
            p.expect_sym(":")?;
            let ty: SemType = p.sem_type()?;
            params.push(Var::new(v, ty));
            if !p.eat_sym(",") {
                break;
            }
        }
        p.expect_sym(")")?;
    }
    if p.ident()? != "for" {
        return p.error("expected `for`");
    }
    let f = p.ident()?;
    let formalism: FormalismId = match f.parse() {
        Ok(f) => f,
        Err(e) => return p.error(e),
    };
    p.expect_sym(":")?;
    for v in &params {
        p.bind(&v.name, &v.ty);
    }
    let body = p.term(None);
    p.unbind_all();
    let body = body?;
    let allowed: BTreeSet<&Var> = params.iter().collect();
    if let Some(v) = free_vars(&body).iter().find(|v| !allowed.contains(v)) {
        return p.error(format!("macro `{name}` has free variable `{}`", v.name));
    }
    Ok(Macro {
        name,
        formalism,
        params,
        body,
    })
}
