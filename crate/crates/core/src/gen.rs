//! Seeded random generation of well-typed terms and closed DRSs, for
//! property tests and the oracles.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::term::{exports, Condition, Drs, QuantKind, SemType, Signature, Term, Var};
use crate::translate::Vocabulary;

fn ty(s: &str) -> SemType {
    crate::term::parse_type(s).expect("built-in type")
}

/// Constants available to generated terms.
pub fn signature() -> Signature {
    [
        ("anna", ty("e")),
        ("bob", ty("e")),
        ("laugh", ty("<e,t>")),
        ("walk", ty("<e,t>")),
        ("man", ty("<e,t>")),
        ("love", ty("<e,<e,t>>")),
        ("rain", ty("t")),
    ]
    .into_iter()
    .collect()
}

pub struct TermGen {
    rng: ChaCha8Rng,
    sig: Signature,
    arg_types: Vec<SemType>,
    /// Chance of mentioning a free variable where a variable is wanted.
    pub free_rate: f64,
}

type Ctx = Vec<Var>;

impl TermGen {
    pub fn new(seed: u64) -> Self {
        TermGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sig: signature(),
            arg_types: ["e", "t", "<e,t>", "<s,<e,t>>", "<<e,t>,t>"]
                .iter()
                .map(|s| ty(s))
                .collect(),
            free_rate: 0.05,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A term of a randomly chosen type.
    pub fn any_term(&mut self, depth: usize) -> Term {
        let ty = self.arg_types.choose(&mut self.rng).cloned().expect("types");
        self.term(&ty, depth)
    }

    pub fn term(&mut self, ty: &SemType, depth: usize) -> Term {
        self.gen(ty, depth, &mut Vec::new())
    }

    fn binder_name(&mut self, ty: &SemType) -> String {
        let pool: &[&str] = match ty {
            SemType::E => &["x", "y", "z"],
            SemType::T => &["p", "q"],
            _ if *ty == SemType::pred1() => &["P", "Q"],
            _ => &["F", "G"],
        };
        pool.choose(&mut self.rng).expect("pool").to_string()
    }

    fn var_of(&mut self, ty: &SemType, ctx: &Ctx) -> Option<Term> {
        let cands: Vec<&Var> = ctx.iter().rev().filter(|v| v.ty == *ty).collect();
        if !cands.is_empty() && !self.rng.gen_bool(self.free_rate) {
            // Innermost binding of a name shadows the rest.
            let v = (*cands.choose(&mut self.rng).expect("nonempty")).clone();
            let visible = ctx.iter().rev().find(|w| w.name == v.name).expect("in ctx");
            if visible.ty == v.ty {
                return Some(Term::Var(v));
            }
        }
        if self.rng.gen_bool(self.free_rate) {
            // One free name per type keeps the text forms unambiguous.
            let name = match ty {
                SemType::E => "u".to_string(),
                SemType::T => "r".to_string(),
                _ => {
                    let code: String = ty
                        .to_string()
                        .chars()
                        .map(|c| match c {
                            '<' => 'L',
                            '>' => 'R',
                            ',' => '_',
                            c => c,
                        })
                        .collect();
                    format!("h_{code}")
                }
            };
            return Some(Term::var(&name, ty.clone()));
        }
        None
    }

    fn const_of(&mut self, ty: &SemType) -> Option<Term> {
        let cands: Vec<String> = self
            .sig
            .iter()
            .filter(|(_, t)| *t == ty)
            .map(|(n, _)| n.clone())
            .collect();
        cands.choose(&mut self.rng).map(|n| Term::constant(n, ty.clone()))
    }

    fn base(&mut self, ty: &SemType, ctx: &mut Ctx) -> Term {
        if let Some(v) = self.var_of(ty, ctx) {
            if self.rng.gen_bool(0.7) {
                return v;
            }
        }
        if let Some(c) = self.const_of(ty) {
            return c;
        }
        if let Some(v) = self.var_of(ty, ctx) {
            return v;
        }
        match ty {
            SemType::Fn(d, c) if **d == SemType::S => Term::up(self.base(c, ctx)),
            SemType::Fn(d, c) => self.lam(d, c, 0, ctx),
            SemType::T => Term::verum(),
            _ => Term::constant("anna", SemType::E),
        }
    }

    fn lam(&mut self, d: &SemType, c: &SemType, depth: usize, ctx: &mut Ctx) -> Term {
        let x = Var::new(self.binder_name(d), d.clone());
        ctx.push(x.clone());
        let body = self.gen(c, depth, ctx);
        ctx.pop();
        Term::lam(x, body)
    }

    fn gen(&mut self, ty: &SemType, depth: usize, ctx: &mut Ctx) -> Term {
        if depth == 0 {
            return self.base(ty, ctx);
        }
        let d = depth - 1;
        let roll = self.rng.gen_range(0..10);
        match ty {
            SemType::Fn(dom, cod) if **dom == SemType::S => {
                if roll < 7 {
                    return Term::up(self.gen(cod, d, ctx));
                }
            }
            SemType::Fn(dom, cod) if roll < 3 => return self.lam(dom, cod, d, ctx),
            SemType::T if roll < 4 => return self.truth(d, ctx),
            _ => {}
        }
        match roll {
            8 => Term::down(self.gen(&SemType::intension(ty.clone()), d, ctx)),
            9 => self.base(ty, ctx),
            _ => self.application(ty, d, ctx),
        }
    }

    fn application(&mut self, ty: &SemType, d: usize, ctx: &mut Ctx) -> Term {
        let arg_ty = self.arg_types.choose(&mut self.rng).cloned().expect("types");
        let f_ty = SemType::func(arg_ty.clone(), ty.clone());
        let f = if self.rng.gen_bool(0.6) {
            self.lam(&arg_ty, ty, d, ctx)
        } else {
            self.gen(&f_ty, d, ctx)
        };
        let a = self.gen(&arg_ty, d, ctx);
        Term::app(f, a)
    }

    fn truth(&mut self, d: usize, ctx: &mut Ctx) -> Term {
        match self.rng.gen_range(0..8) {
            0 => Term::and(self.gen(&SemType::T, d, ctx), self.gen(&SemType::T, d, ctx)),
            1 => Term::not(self.gen(&SemType::T, d, ctx)),
            2 => Term::eq(self.gen(&SemType::E, d, ctx), self.gen(&SemType::E, d, ctx)),
            3 => {
                let x = Var::new(self.binder_name(&SemType::E), SemType::E);
                ctx.push(x.clone());
                let body = self.gen(&SemType::T, d, ctx);
                ctx.pop();
                let kind = *[QuantKind::Forall, QuantKind::Exists]
                    .choose(&mut self.rng)
                    .expect("kinds");
                Term::Quant {
                    kind,
                    var: x,
                    restrictor: None,
                    body: Box::new(body),
                }
            }
            4 | 5 => Term::Drs(self.drs_in(d, ctx)),
            _ => {
                let a = self.gen(&SemType::T, d, ctx);
                let n = ctx.len();
                ctx.extend(exports(&a));
                let b = self.gen(&SemType::T, d, ctx);
                ctx.truncate(n);
                Term::merge(a, b)
            }
        }
    }

    fn drs_in(&mut self, d: usize, ctx: &mut Ctx) -> Drs {
        let mut universe: Vec<Var> = Vec::new();
        for _ in 0..self.rng.gen_range(0..3) {
            let name = ["x", "y", "z"].choose(&mut self.rng).expect("pool").to_string();
            if !universe.iter().any(|v| v.name == name) {
                universe.push(Var::entity(name));
            }
        }
        let n = ctx.len();
        ctx.extend(universe.iter().cloned());
        let mut conditions = Vec::new();
        for _ in 0..self.rng.gen_range(0..3) {
            let c = match self.rng.gen_range(0..6) {
                0 | 1 => Condition::Atom {
                    pred: ["man", "walk"].choose(&mut self.rng).expect("preds").to_string(),
                    args: vec![self.gen(&SemType::E, 0, ctx)],
                },
                2 => Condition::Atom {
                    pred: "love".into(),
                    args: vec![self.gen(&SemType::E, 0, ctx), self.gen(&SemType::E, 0, ctx)],
                },
                3 => Condition::Not(self.gen(&SemType::T, d, ctx)),
                4 => {
                    let a = self.gen(&SemType::T, d, ctx);
                    let m = ctx.len();
                    ctx.extend(exports(&a));
                    let b = self.gen(&SemType::T, d, ctx);
                    ctx.truncate(m);
                    Condition::Implies(a, b)
                }
                _ => Condition::Eq(self.gen(&SemType::E, d, ctx), self.gen(&SemType::E, d, ctx)),
            };
            conditions.push(c);
        }
        ctx.truncate(n);
        Drs::new(universe, conditions)
    }
}

/// Closed DRSs built from atoms, equations, negation, implication and
/// disjunction over a fixed signature.
pub struct DrsGen {
    rng: ChaCha8Rng,
    pub sig: Vocabulary,
    names: Vec<&'static str>,
}

impl DrsGen {
    pub fn new(seed: u64, sig: Vocabulary) -> Self {
        DrsGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sig,
            names: vec!["x", "y", "z"],
        }
    }

    pub fn drs(&mut self, depth: usize) -> Drs {
        self.sub(depth, &mut Vec::new())
    }

    fn entity(&mut self, acc: &[Var]) -> Term {
        let use_const = acc.is_empty() || self.rng.gen_bool(0.2);
        if use_const && !self.sig.consts.is_empty() {
            let c = self.sig.consts.choose(&mut self.rng).expect("consts");
            return Term::constant(c, SemType::E);
        }
        match acc.choose(&mut self.rng) {
            Some(v) => Term::Var(v.clone()),
            None => Term::Var(Var::entity("x")),
        }
    }

    fn sub(&mut self, depth: usize, acc: &mut Vec<Var>) -> Drs {
        let mut universe: Vec<Var> = Vec::new();
        let size = self.rng.gen_range(0..3);
        for _ in 0..size {
            let name = *self.names.choose(&mut self.rng).expect("names");
            if !universe.iter().any(|v| v.name == name) {
                universe.push(Var::entity(name));
            }
        }
        let n = acc.len();
        acc.extend(universe.iter().cloned());
        let mut conditions = Vec::new();
        let count = self.rng.gen_range(if universe.is_empty() { 1 } else { 0 }..4);
        for _ in 0..count {
            let roll = if depth == 0 { 0 } else { self.rng.gen_range(0..8) };
            if acc.is_empty() && self.sig.consts.is_empty() && roll < 5 {
                continue;
            }
            let c = match roll {
                0..=3 => {
                    let (pred, arity) = self.sig.preds.choose(&mut self.rng).expect("preds").clone();
                    let args = (0..arity).map(|_| self.entity(acc)).collect();
                    Condition::Atom { pred, args }
                }
                4 => Condition::Eq(self.entity(acc), self.entity(acc)),
                5 => Condition::Not(Term::Drs(self.sub(depth - 1, acc))),
                6 => {
                    let ante = self.sub(depth - 1, acc);
                    let m = acc.len();
                    acc.extend(ante.universe.iter().cloned());
                    let cons = self.sub(depth - 1, acc);
                    acc.truncate(m);
                    Condition::Implies(Term::Drs(ante), Term::Drs(cons))
                }
                _ => Condition::Or(Term::Drs(self.sub(depth - 1, acc)), Term::Drs(self.sub(depth - 1, acc))),
            };
            conditions.push(c);
        }
        acc.truncate(n);
        Drs::new(universe, conditions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{free_vars, type_of};

    #[test]
    fn generated_terms_are_well_typed() {
        let mut g = TermGen::new(7);
        for _ in 0..300 {
            let t = g.any_term(5);
            type_of(&t).unwrap_or_else(|e| panic!("{t}: {e}"));
        }
    }

    #[test]
    fn generated_drss_are_closed() {
        let sig = Vocabulary::new(&[("p", 1), ("r", 2)], &["c"]);
        let mut g = DrsGen::new(3, sig);
        for _ in 0..300 {
            let d = g.drs(2);
            let t = Term::Drs(d);
            assert!(free_vars(&t).is_empty(), "{t}");
            assert_eq!(type_of(&t).unwrap(), SemType::T);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a: Vec<Term> = (0..20)
            .map({
                let mut g = TermGen::new(11);
                move |_| g.any_term(4)
            })
            .collect();
        let b: Vec<Term> = (0..20)
            .map({
                let mut g = TermGen::new(11);
                move |_| g.any_term(4)
            })
            .collect();
        assert_eq!(a, b);
    }
}
