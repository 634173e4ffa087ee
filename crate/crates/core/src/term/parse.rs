use std::collections::BTreeMap;

use super::{type_of, Condition, Connective, Drs, QuantKind, SemType, Term, TermError, Var};

/// Known constant types, consulted when a constant carries no annotation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    consts: BTreeMap<String, SemType>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, ty: SemType) {
        self.consts.insert(name.into(), ty);
    }

    pub fn get(&self, name: &str) -> Option<&SemType> {
        self.consts.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SemType)> {
        self.consts.iter()
    }
}

impl<S: Into<String>> FromIterator<(S, SemType)> for Signature {
    fn from_iter<I: IntoIterator<Item = (S, SemType)>>(iter: I) -> Self {
        Signature {
            consts: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

pub(crate) const KEYWORDS: &[&str] = &[
    "var", "const", "lam", "app", "up", "down", "forall", "exists", "and", "or", "not", "implies", "eq", "true", "drs",
    "merge", "idx",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u32),
    Sym(&'static str),
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

const SYMBOLS: &[&str] = &[
    "-->", "->", "(", ")", "[", "]", "{", "}", ",", ":", "<", ">", ".", "\\", "/", "=", "#", "|",
];

/// Shared tokenizer for terms, types and the plain-text data files.
/// `%` starts a comment running to the end of the line.
pub(crate) struct Lexer;

impl Lexer {
    pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, TermError> {
        let bytes = src.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c == '%' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    let hyphen_join = d == '-' && bytes.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric());
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' || hyphen_join {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i].parse().map_err(|_| TermError::Parse {
                    offset: start,
                    message: "integer out of range".into(),
                })?;
                out.push((Tok::Int(n), start));
            } else if let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
                out.push((Tok::Sym(sym), i));
                i += sym.len();
            } else {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(TermError::Parse {
                    offset: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
        Ok(out)
    }
}

/// Types during inference; `Meta` is an unresolved unknown.
#[derive(Debug, Clone)]
enum Ty {
    E,
    T,
    S,
    Fn(Box<Ty>, Box<Ty>),
    Meta(usize),
}

impl Ty {
    fn func(a: Ty, b: Ty) -> Ty {
        Ty::Fn(Box::new(a), Box::new(b))
    }

    fn from_sem(t: &SemType) -> Ty {
        match t {
            SemType::E => Ty::E,
            SemType::T => Ty::T,
            SemType::S => Ty::S,
            SemType::Fn(a, b) => Ty::func(Ty::from_sem(a), Ty::from_sem(b)),
        }
    }
}

#[derive(Default)]
struct Infer {
    metas: Vec<Option<Ty>>,
}

impl Infer {
    fn fresh(&mut self) -> Ty {
        self.metas.push(None);
        Ty::Meta(self.metas.len() - 1)
    }

    fn shallow(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Meta(m) = t {
            match &self.metas[m] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.shallow(t) {
            Ty::Meta(n) => n == m,
            Ty::Fn(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), String> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => Ok(()),
            (Ty::Meta(m), other) | (other, Ty::Meta(m)) => {
                if self.occurs(*m, other) {
                    return Err("infinite type".into());
                }
                self.metas[*m] = Some(other.clone());
                Ok(())
            }
            (Ty::E, Ty::E) | (Ty::T, Ty::T) | (Ty::S, Ty::S) => Ok(()),
            (Ty::Fn(a1, b1), Ty::Fn(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ => Err(format!("cannot unify {} with {}", self.zonk(&a), self.zonk(&b))),
        }
    }

    /// Resolved type; unknowns default to `e`.
    fn zonk(&self, t: &Ty) -> SemType {
        match self.shallow(t) {
            Ty::E | Ty::Meta(_) => SemType::E,
            Ty::T => SemType::T,
            Ty::S => SemType::S,
            Ty::Fn(a, b) => SemType::func(self.zonk(&a), self.zonk(&b)),
        }
    }
}

/// Parsed term whose types may still be unknown.
enum P {
    Var(String, Ty),
    Const(String, Ty),
    Lam(String, Ty, Box<P>),
    App(Box<P>, Box<P>),
    Up(Box<P>),
    Down(Box<P>),
    Quant(QuantKind, String, Ty, Option<Box<P>>, Box<P>),
    Conn(Connective, Vec<P>),
    Drs(Vec<(String, Ty)>, Vec<PCond>),
    Merge(Box<P>, Box<P>),
    Idx(u32, Ty),
    /// Type annotation on a subterm, erased after inference.
    Typed(Box<P>, Ty),
}

enum PCond {
    Atom(String, Vec<P>),
    Eq(P, P),
    Not(P),
    Implies(P, P),
    Or(P, P),
}

fn p_exports(p: &P) -> Vec<(String, Ty)> {
    match p {
        P::Drs(u, _) => u.clone(),
        P::Merge(a, b) => {
            let mut out = p_exports(a);
            for (n, t) in p_exports(b) {
                if !out.iter().any(|(m, _)| *m == n) {
                    out.push((n, t));
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Recursive-descent parser over a token stream. Data-file parsers drive
/// the cursor directly and call [`TermParser::term`] for embedded terms.
pub(crate) struct TermParser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    sig: &'a Signature,
    infer: Infer,
    scope: Vec<(String, Ty)>,
    free_vars: BTreeMap<String, Ty>,
    consts: BTreeMap<String, Ty>,
    /// Result types of `f(a,..)` calls, defaulted to `t` when left open.
    call_results: Vec<Ty>,
}

impl<'a> TermParser<'a> {
    pub(crate) fn new(src: &str, sig: &'a Signature) -> Result<Self, TermError> {
        let toks = Lexer::tokenize(src)?;
        Ok(TermParser {
            toks,
            pos: 0,
            end: src.len(),
            sig,
            infer: Infer::default(),
            scope: Vec::new(),
            free_vars: BTreeMap::new(),
            consts: BTreeMap::new(),
            call_results: Vec::new(),
        })
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    pub(crate) fn error<T>(&self, message: impl Into<String>) -> Result<T, TermError> {
        Err(TermError::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    pub(crate) fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> Result<(), TermError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |t| t.to_string());
            self.error(format!("expected `{s}`, found {found}"))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, TermError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => {
                let found = other.map_or("end of input".to_string(), |t| t.to_string());
                self.error(format!("expected a name, found {found}"))
            }
        }
    }

    pub(crate) fn int(&mut self) -> Result<u32, TermError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.error("expected an integer"),
        }
    }

    pub(crate) fn expect_end(&self) -> Result<(), TermError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.error(format!("unexpected {t} after end of input")),
        }
    }

    /// Parses a type: `e`, `t`, `s`, `<a,b>`, `a -> b` (right associative)
    /// or a parenthesized type.
    pub(crate) fn sem_type(&mut self) -> Result<SemType, TermError> {
        let dom = self.atomic_type()?;
        if self.eat_sym("->") {
            Ok(SemType::func(dom, self.sem_type()?))
        } else {
            Ok(dom)
        }
    }

    fn atomic_type(&mut self) -> Result<SemType, TermError> {
        if self.eat_sym("<") {
            let a = self.sem_type()?;
            self.expect_sym(",")?;
            let b = self.sem_type()?;
            self.expect_sym(">")?;
            return Ok(SemType::func(a, b));
        }
        if self.eat_sym("(") {
            let t = self.sem_type()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        match self.ident()?.as_str() {
            "e" => Ok(SemType::E),
            "t" => Ok(SemType::T),
            "s" => Ok(SemType::S),
            other => {
                self.pos -= 1;
                self.error(format!("unknown type `{other}`"))
            }
        }
    }

    fn annotation(&mut self) -> Result<Option<Ty>, TermError> {
        if self.eat_sym(":") {
            Ok(Some(Ty::from_sem(&self.sem_type()?)))
        } else {
            Ok(None)
        }
    }

    /// A binder name with optional type annotation.
    fn binder(&mut self) -> Result<(String, Ty), TermError> {
        let name = self.ident()?;
        let ty = match self.annotation()? {
            Some(t) => t,
            None => self.infer.fresh(),
        };
        Ok((name, ty))
    }

    /// Makes `name` available as a bound variable of type `ty` for every
    /// subsequent [`TermParser::term`] call.
    pub(crate) fn bind(&mut self, name: &str, ty: &SemType) {
        self.scope.push((name.to_string(), Ty::from_sem(ty)));
    }

    /// Drops every binding made with [`TermParser::bind`].
    pub(crate) fn unbind_all(&mut self) {
        self.scope.clear();
    }

    fn lookup(&self, name: &str) -> Option<Ty> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t.clone())
    }

    fn unify_here(&mut self, a: &Ty, b: &Ty) -> Result<(), TermError> {
        let r = self.infer.unify(a, b);
        match r {
            Ok(()) => Ok(()),
            Err(e) => self.error(e),
        }
    }

    fn const_ty(&mut self, name: &str) -> Ty {
        if let Some(t) = self.consts.get(name) {
            return t.clone();
        }
        let t = match self.sig.get(name) {
            Some(t) => Ty::from_sem(t),
            None => self.infer.fresh(),
        };
        self.consts.insert(name.to_string(), t.clone());
        t
    }

    fn free_var_ty(&mut self, name: &str) -> Ty {
        if let Some(t) = self.free_vars.get(name) {
            return t.clone();
        }
        let t = self.infer.fresh();
        self.free_vars.insert(name.to_string(), t.clone());
        t
    }

    /// Resolves a name occurrence: bound variable if in scope, constant otherwise.
    fn name_ref(&mut self, name: String) -> Result<P, TermError> {
        let ann = self.annotation()?;
        let (p, ty) = match self.lookup(&name) {
            Some(ty) => (P::Var(name, ty.clone()), ty),
            None => {
                let ty = self.const_ty(&name);
                (P::Const(name, ty.clone()), ty)
            }
        };
        if let Some(a) = ann {
            self.unify_here(&ty, &a)?;
        }
        Ok(p)
    }

    fn args(&mut self) -> Result<Vec<P>, TermError> {
        let mut out = Vec::new();
        if self.is_sym(")") {
            return Ok(out);
        }
        loop {
            out.push(self.p_term()?);
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn p_term(&mut self) -> Result<P, TermError> {
        let name = self.ident()?;
        let call = self.is_sym("(");
        if !KEYWORDS.contains(&name.as_str()) {
            let head = self.name_ref(name)?;
            if !self.eat_sym("(") {
                return Ok(head);
            }
            let args = self.args()?;
            self.expect_sym(")")?;
            if args.is_empty() {
                return self.error("empty argument list");
            }
            let call = args.into_iter().fold(head, |f, a| P::App(Box::new(f), Box::new(a)));
            let r = self.infer.fresh();
            self.call_results.push(r.clone());
            return Ok(P::Typed(Box::new(call), r));
        }
        if name == "true" {
            if self.eat_sym("(") {
                self.expect_sym(")")?;
            }
            return Ok(P::Conn(Connective::True, Vec::new()));
        }
        if !call {
            return self.error(format!("`{name}` must be followed by `(`"));
        }
        self.pos += 1;
        let p = match name.as_str() {
            "var" => {
                let n = self.ident()?;
                let ann = self.annotation()?;
                let ty = match self.lookup(&n) {
                    Some(t) => t,
                    None => self.free_var_ty(&n),
                };
                if let Some(a) = ann {
                    self.unify_here(&ty, &a)?;
                }
                P::Var(n, ty)
            }
            "const" => {
                let n = self.ident()?;
                let ann = self.annotation()?;
                let ty = self.const_ty(&n);
                if let Some(a) = ann {
                    self.unify_here(&ty, &a)?;
                }
                P::Const(n, ty)
            }
            "lam" => {
                let (x, ty) = self.binder()?;
                self.expect_sym(",")?;
                self.scope.push((x.clone(), ty.clone()));
                let body = self.p_term();
                self.scope.pop();
                P::Lam(x, ty, Box::new(body?))
            }
            "forall" | "exists" => {
                let kind = if name == "forall" {
                    QuantKind::Forall
                } else {
                    QuantKind::Exists
                };
                let (x, ty) = self.binder()?;
                self.expect_sym(",")?;
                self.scope.push((x.clone(), ty.clone()));
                let r = (|| {
                    let first = self.p_term()?;
                    if self.eat_sym(",") {
                        let body = self.p_term()?;
                        Ok((Some(Box::new(first)), body))
                    } else {
                        Ok((None, first))
                    }
                })();
                self.scope.pop();
                let (restrictor, body) = r?;
                P::Quant(kind, x, ty, restrictor, Box::new(body))
            }
            "app" => {
                let args = self.args()?;
                if args.len() < 2 {
                    return self.error("app needs a function and an argument");
                }
                let mut it = args.into_iter();
                let head = it.next().unwrap();
                it.fold(head, |f, a| P::App(Box::new(f), Box::new(a)))
            }
            "up" | "down" => {
                let b = Box::new(self.p_term()?);
                if name == "up" {
                    P::Up(b)
                } else {
                    P::Down(b)
                }
            }
            "and" | "or" | "not" | "implies" | "eq" => {
                let k = match name.as_str() {
                    "and" => Connective::And,
                    "or" => Connective::Or,
                    "not" => Connective::Not,
                    "implies" => Connective::Implies,
                    _ => Connective::Eq,
                };
                P::Conn(k, self.args()?)
            }
            "merge" => {
                let first = self.p_term()?;
                let n = self.scope.len();
                let mut acc = first;
                let mut r = Ok(());
                while self.eat_sym(",") {
                    self.scope.truncate(n);
                    self.scope.extend(p_exports(&acc));
                    match self.p_term() {
                        Ok(next) => acc = P::Merge(Box::new(acc), Box::new(next)),
                        Err(e) => {
                            r = Err(e);
                            break;
                        }
                    }
                }
                self.scope.truncate(n);
                r?;
                if !matches!(acc, P::Merge(..)) {
                    return self.error("merge needs two operands");
                }
                acc
            }
            "drs" => self.p_drs()?,
            "idx" => {
                let i = self.int()?;
                let ty = self.annotation()?.unwrap_or(Ty::E);
                P::Idx(i, ty)
            }
            _ => unreachable!("keyword list out of sync"),
        };
        self.expect_sym(")")?;
        Ok(p)
    }

    fn p_drs(&mut self) -> Result<P, TermError> {
        self.expect_sym("[")?;
        let mut universe = Vec::new();
        if !self.is_sym("]") {
            loop {
                let (x, ty) = self.binder()?;
                self.unify_here(&ty, &Ty::E)?;
                universe.push((x, ty));
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("]")?;
        self.expect_sym(",")?;
        self.expect_sym("[")?;
        let n = self.scope.len();
        self.scope.extend(universe.iter().cloned());
        let conds = self.p_conditions();
        self.scope.truncate(n);
        let conds = conds?;
        self.expect_sym("]")?;
        Ok(P::Drs(universe, conds))
    }

    fn p_conditions(&mut self) -> Result<Vec<PCond>, TermError> {
        let mut out = Vec::new();
        if self.is_sym("]") {
            return Ok(out);
        }
        loop {
            out.push(self.p_condition()?);
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn p_condition(&mut self) -> Result<PCond, TermError> {
        let name = self.ident()?;
        if !self.eat_sym("(") {
            return Ok(PCond::Atom(name, Vec::new()));
        }
        let c = match name.as_str() {
            "eq" | "or" => {
                let a = self.p_term()?;
                self.expect_sym(",")?;
                let b = self.p_term()?;
                if name == "eq" {
                    PCond::Eq(a, b)
                } else {
                    PCond::Or(a, b)
                }
            }
            "not" => PCond::Not(self.p_term()?),
            "implies" => {
                let a = self.p_term()?;
                self.expect_sym(",")?;
                let n = self.scope.len();
                self.scope.extend(p_exports(&a));
                let b = self.p_term();
                self.scope.truncate(n);
                PCond::Implies(a, b?)
            }
            _ => PCond::Atom(name, self.args()?),
        };
        self.expect_sym(")")?;
        Ok(c)
    }

    /// Parses one term, infers its types (optionally against `expected`)
    /// and checks the result.
    pub(crate) fn term(&mut self, expected: Option<&SemType>) -> Result<Term, TermError> {
        self.consts.clear();
        self.free_vars.clear();
        self.call_results.clear();
        let p = self.p_term()?;
        let mut path = Vec::new();
        let ty = self.infer_ty(&p, &mut path)?;
        if let Some(want) = expected {
            if let Err(e) = self.infer.unify(&ty, &Ty::from_sem(want)) {
                return Err(TermError::IllTyped {
                    path: Vec::new(),
                    reason: e,
                });
            }
        }
        // Named calls are predications unless something says otherwise.
        for r in std::mem::take(&mut self.call_results) {
            if let Ty::Meta(_) = self.infer.shallow(&r) {
                let _ = self.infer.unify(&r, &Ty::T);
            }
        }
        let t = self.finish(&p);
        type_of(&t)?;
        Ok(t)
    }

    fn infer_ty(&mut self, p: &P, path: &mut Vec<usize>) -> Result<Ty, TermError> {
        let mut child = |s: &mut Self, i: usize, c: &P, want: Option<&Ty>| -> Result<Ty, TermError> {
            path.push(i);
            let r = s.infer_ty(c, path).and_then(|t| match want {
                Some(w) => s.infer.unify(&t, w).map(|_| t).map_err(|reason| TermError::IllTyped {
                    path: path.clone(),
                    reason,
                }),
                None => Ok(t),
            });
            path.pop();
            r
        };
        match p {
            P::Var(_, t) | P::Const(_, t) | P::Idx(_, t) => Ok(t.clone()),
            P::Typed(inner, t) => {
                let got = self.infer_ty(inner, path)?;
                self.infer.unify(&got, t).map_err(|reason| TermError::IllTyped {
                    path: path.clone(),
                    reason,
                })?;
                Ok(got)
            }
            P::Lam(_, t, b) => Ok(Ty::func(t.clone(), child(self, 0, b, None)?)),
            P::App(f, a) => {
                let ta = child(self, 1, a, None)?;
                let r = self.infer.fresh();
                child(self, 0, f, Some(&Ty::func(ta, r.clone())))?;
                Ok(r)
            }
            P::Up(b) => Ok(Ty::func(Ty::S, child(self, 0, b, None)?)),
            P::Down(b) => {
                let r = self.infer.fresh();
                child(self, 0, b, Some(&Ty::func(Ty::S, r.clone())))?;
                Ok(r)
            }
            P::Quant(_, _, _, r, b) => {
                let mut i = 0;
                if let Some(r) = r {
                    child(self, 0, r, Some(&Ty::T))?;
                    i = 1;
                }
                child(self, i, b, Some(&Ty::T))?;
                Ok(Ty::T)
            }
            P::Conn(k, args) => {
                if *k == Connective::Eq && args.len() == 2 {
                    let a = child(self, 0, &args[0], None)?;
                    child(self, 1, &args[1], Some(&a))?;
                } else {
                    for (i, a) in args.iter().enumerate() {
                        child(self, i, a, Some(&Ty::T))?;
                    }
                }
                Ok(Ty::T)
            }
            P::Drs(_, conds) => {
                let mut i = 0;
                for c in conds {
                    let (ops, want): (Vec<&P>, Ty) = match c {
                        PCond::Atom(_, args) => (args.iter().collect(), Ty::E),
                        PCond::Eq(a, b) => (vec![a, b], Ty::E),
                        PCond::Not(a) => (vec![a], Ty::T),
                        PCond::Implies(a, b) | PCond::Or(a, b) => (vec![a, b], Ty::T),
                    };
                    for o in ops {
                        child(self, i, o, Some(&want))?;
                        i += 1;
                    }
                }
                Ok(Ty::T)
            }
            P::Merge(a, b) => {
                child(self, 0, a, Some(&Ty::T))?;
                child(self, 1, b, Some(&Ty::T))?;
                Ok(Ty::T)
            }
        }
    }

    fn finish(&self, p: &P) -> Term {
        let z = |t: &Ty| self.infer.zonk(t);
        match p {
            P::Var(n, t) => Term::Var(Var::new(n.clone(), z(t))),
            P::Const(n, t) => Term::Const(Var::new(n.clone(), z(t))),
            P::Idx(i, t) => Term::Idx(*i, z(t)),
            P::Typed(inner, _) => self.finish(inner),
            P::Lam(x, t, b) => Term::lam(Var::new(x.clone(), z(t)), self.finish(b)),
            P::App(f, a) => Term::app(self.finish(f), self.finish(a)),
            P::Up(b) => Term::up(self.finish(b)),
            P::Down(b) => Term::down(self.finish(b)),
            P::Quant(kind, x, t, r, b) => Term::Quant {
                kind: *kind,
                var: Var::new(x.clone(), z(t)),
                restrictor: r.as_ref().map(|r| Box::new(self.finish(r))),
                body: Box::new(self.finish(b)),
            },
            P::Conn(k, args) => Term::Conn(*k, args.iter().map(|a| self.finish(a)).collect()),
            P::Drs(u, conds) => Term::Drs(Drs {
                universe: u.iter().map(|(n, t)| Var::new(n.clone(), z(t))).collect(),
                conditions: conds
                    .iter()
                    .map(|c| match c {
                        PCond::Atom(pred, args) => Condition::Atom {
                            pred: pred.clone(),
                            args: args.iter().map(|a| self.finish(a)).collect(),
                        },
                        PCond::Eq(a, b) => Condition::Eq(self.finish(a), self.finish(b)),
                        PCond::Not(a) => Condition::Not(self.finish(a)),
                        PCond::Implies(a, b) => Condition::Implies(self.finish(a), self.finish(b)),
                        PCond::Or(a, b) => Condition::Or(self.finish(a), self.finish(b)),
                    })
                    .collect(),
            }),
            P::Merge(a, b) => Term::merge(self.finish(a), self.finish(b)),
        }
    }
}

/// Parses the canonical or compact text form. Constant types come from
/// annotations, then `sig`, then inference; anything left open is `e`.
pub fn parse_term(src: &str, sig: &Signature) -> Result<Term, TermError> {
    let mut p = TermParser::new(src, sig)?;
    let t = p.term(None)?;
    p.expect_end()?;
    Ok(t)
}

/// As [`parse_term`], with the top-level type fixed in advance.
pub fn parse_term_expecting(src: &str, sig: &Signature, expected: &SemType) -> Result<Term, TermError> {
    let mut p = TermParser::new(src, sig)?;
    let t = p.term(Some(expected))?;
    p.expect_end()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<SemType, TermError> {
    let sig = Signature::default();
    let mut p = TermParser::new(src, &sig)?;
    let t = p.sem_type()?;
    p.expect_end()?;
    Ok(t)
}
