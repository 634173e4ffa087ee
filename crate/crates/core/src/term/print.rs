use std::fmt::Write;

use super::parse::KEYWORDS;
use super::{exports, Condition, Connective, QuantKind, SemType, Term};

fn quant_kw(k: QuantKind) -> &'static str {
    match k {
        QuantKind::Forall => "forall",
        QuantKind::Exists => "exists",
    }
}

fn join<T>(out: &mut String, items: &[T], sep: &str, mut f: impl FnMut(&mut String, &T)) {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        f(out, x);
    }
}

/// Lossless, fully typed text form: `parse_term(&canonical(t))` gives back `t`.
pub fn canonical(t: &Term) -> String {
    let mut out = String::new();
    canon(t, &mut out);
    out
}

fn canon(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => {
            let _ = write!(out, "var({}:{})", v.name, v.ty);
        }
        Term::Const(c) => {
            let _ = write!(out, "const({}:{})", c.name, c.ty);
        }
        Term::Idx(i, ty) => {
            let _ = write!(out, "idx({i}:{ty})");
        }
        Term::Lam(x, b) => {
            let _ = write!(out, "lam({}:{}, ", x.name, x.ty);
            canon(b, out);
            out.push(')');
        }
        Term::App(f, a) => {
            out.push_str("app(");
            canon(f, out);
            out.push_str(", ");
            canon(a, out);
            out.push(')');
        }
        Term::Up(b) | Term::Down(b) => {
            out.push_str(if matches!(t, Term::Up(_)) { "up(" } else { "down(" });
            canon(b, out);
            out.push(')');
        }
        Term::Quant {
            kind,
            var,
            restrictor,
            body,
        } => {
            let _ = write!(out, "{}({}:{}, ", quant_kw(*kind), var.name, var.ty);
            if let Some(r) = restrictor {
                canon(r, out);
                out.push_str(", ");
            }
            canon(body, out);
            out.push(')');
        }
        Term::Conn(Connective::True, _) => out.push_str("true"),
        Term::Conn(k, args) => {
            out.push_str(k.keyword());
            out.push('(');
            join(out, args, ", ", |o, a| canon(a, o));
            out.push(')');
        }
        Term::Drs(d) => {
            out.push_str("drs([");
            join(out, &d.universe, ", ", |o, v| {
                let _ = write!(o, "{}:{}", v.name, v.ty);
            });
            out.push_str("], [");
            join(out, &d.conditions, ", ", |o, c| cond_with(c, o, ", ", &mut canon));
            out.push_str("])");
        }
        Term::Merge(a, b) => {
            out.push_str("merge(");
            canon(a, out);
            out.push_str(", ");
            canon(b, out);
            out.push(')');
        }
    }
}

fn cond_with(c: &Condition, out: &mut String, sep: &str, f: &mut dyn FnMut(&Term, &mut String)) {
    let (head, ops): (&str, Vec<&Term>) = match c {
        Condition::Atom { pred, args } => {
            if args.is_empty() {
                out.push_str(pred);
                return;
            }
            (pred, args.iter().collect())
        }
        Condition::Eq(a, b) => ("eq", vec![a, b]),
        Condition::Not(a) => ("not", vec![a]),
        Condition::Implies(a, b) => ("implies", vec![a, b]),
        Condition::Or(a, b) => ("or", vec![a, b]),
    };
    out.push_str(head);
    out.push('(');
    join(out, &ops, sep, |o, t| f(t, o));
    out.push(')');
}

/// Short text form used for display and the CLI. Bound variables and
/// constants print as bare names, free variables as `var(x)`, and
/// applications with a named head as `f(a,b)`. Types are left to inference
/// when the text is parsed back.
pub fn compact(t: &Term) -> String {
    let mut out = String::new();
    Compact { scope: Vec::new() }.go(t, &mut out);
    out
}

struct Compact {
    scope: Vec<String>,
}

impl Compact {
    fn bound(&self, n: &str) -> bool {
        self.scope.iter().any(|s| s == n)
    }

    fn bare_head(&self, t: &Term) -> Option<String> {
        match t {
            Term::Var(v) if self.bound(&v.name) && !KEYWORDS.contains(&v.name.as_str()) => Some(v.name.clone()),
            Term::Const(c) if !self.bound(&c.name) && !KEYWORDS.contains(&c.name.as_str()) => Some(c.name.clone()),
            _ => None,
        }
    }

    fn scoped(&mut self, names: impl IntoIterator<Item = String>, f: impl FnOnce(&mut Self)) {
        let n = self.scope.len();
        self.scope.extend(names);
        f(self);
        self.scope.truncate(n);
    }

    fn go(&mut self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => match self.bare_head(t) {
                Some(n) => out.push_str(&n),
                None => {
                    let _ = write!(out, "var({})", v.name);
                }
            },
            Term::Const(c) => match self.bare_head(t) {
                Some(n) => out.push_str(&n),
                None => {
                    let _ = write!(out, "const({})", c.name);
                }
            },
            Term::Idx(i, ty) => {
                if *ty == SemType::E {
                    let _ = write!(out, "idx({i})");
                } else {
                    let _ = write!(out, "idx({i}:{ty})");
                }
            }
            Term::Lam(x, b) => {
                let _ = write!(out, "lam({},", x.name);
                self.scoped([x.name.clone()], |s| s.go(b, out));
                out.push(')');
            }
            Term::App(..) => {
                let mut args = Vec::new();
                let mut head = t;
                while let Term::App(f, a) = head {
                    args.push(&**a);
                    head = f;
                }
                args.reverse();
                match self.bare_head(head) {
                    Some(n) => out.push_str(&n),
                    None => {
                        out.push_str("app(");
                        self.go(head, out);
                        out.push(',');
                    }
                }
                if self.bare_head(head).is_some() {
                    out.push('(');
                }
                join(out, &args, ",", |o, a| self.go(a, o));
                out.push(')');
            }
            Term::Up(b) | Term::Down(b) => {
                out.push_str(if matches!(t, Term::Up(_)) { "up(" } else { "down(" });
                self.go(b, out);
                out.push(')');
            }
            Term::Quant {
                kind,
                var,
                restrictor,
                body,
            } => {
                let _ = write!(out, "{}({},", quant_kw(*kind), var.name);
                self.scoped([var.name.clone()], |s| {
                    if let Some(r) = restrictor {
                        s.go(r, out);
                        out.push(',');
                    }
                    s.go(body, out);
                });
                out.push(')');
            }
            Term::Conn(Connective::True, _) => out.push_str("true"),
            Term::Conn(k, args) => {
                out.push_str(k.keyword());
                out.push('(');
                join(out, args, ",", |o, a| self.go(a, o));
                out.push(')');
            }
            Term::Drs(d) => {
                out.push_str("drs([");
                join(out, &d.universe, ",", |o, v| o.push_str(&v.name));
                out.push_str("],[");
                self.scoped(d.universe.iter().map(|v| v.name.clone()), |s| {
                    join(out, &d.conditions, ",", |o, c| s.cond(c, o));
                });
                out.push_str("])");
            }
            Term::Merge(a, b) => {
                out.push_str("merge(");
                self.go(a, out);
                out.push(',');
                self.scoped(exports(a).into_iter().map(|v| v.name), |s| s.go(b, out));
                out.push(')');
            }
        }
    }

    fn cond(&mut self, c: &Condition, out: &mut String) {
        if let Condition::Implies(a, b) = c {
            out.push_str("implies(");
            self.go(a, out);
            out.push(',');
            self.scoped(exports(a).into_iter().map(|v| v.name), |s| s.go(b, out));
            out.push(')');
            return;
        }
        cond_with(c, out, ",", &mut |t, o| self.go(t, o));
    }
}

/// Display-only notation with lambda, merge and intension symbols.
pub fn pretty(t: &Term) -> String {
    let mut out = String::new();
    pp(t, &mut out);
    out
}

fn is_atomic(t: &Term) -> bool {
    matches!(
        t,
        Term::Var(_) | Term::Const(_) | Term::Idx(..) | Term::Drs(_) | Term::App(..)
    ) || matches!(t, Term::Conn(Connective::True, _))
}

fn pp_atomic(t: &Term, out: &mut String) {
    if is_atomic(t) {
        pp(t, out);
    } else {
        out.push('(');
        pp(t, out);
        out.push(')');
    }
}

fn pp(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) | Term::Const(v) => out.push_str(&v.name),
        Term::Idx(i, _) => {
            let _ = write!(out, "idx{i}");
        }
        Term::Lam(x, b) => {
            let _ = write!(out, "λ{}.", x.name);
            pp(b, out);
        }
        Term::App(..) => {
            let mut args = Vec::new();
            let mut head = t;
            while let Term::App(f, a) = head {
                args.push(&**a);
                head = f;
            }
            args.reverse();
            if matches!(head, Term::Var(_) | Term::Const(_)) {
                pp(head, out);
                out.push('(');
                join(out, &args, ",", |o, a| pp(a, o));
                out.push(')');
            } else {
                pp_atomic(head, out);
                for a in args {
                    out.push('(');
                    pp(a, out);
                    out.push(')');
                }
            }
        }
        Term::Up(b) => {
            out.push('^');
            pp_atomic(b, out);
        }
        Term::Down(b) => {
            out.push('ˇ');
            pp_atomic(b, out);
        }
        Term::Quant {
            kind,
            var,
            restrictor,
            body,
        } => {
            out.push(if *kind == QuantKind::Forall { '∀' } else { '∃' });
            out.push_str(&var.name);
            if let Some(r) = restrictor {
                out.push('[');
                pp(r, out);
                out.push(']');
            }
            out.push('.');
            pp(body, out);
        }
        Term::Conn(k, args) => match k {
            Connective::True => out.push('⊤'),
            Connective::Not => {
                out.push('¬');
                pp_atomic(&args[0], out);
            }
            _ => {
                let op = match k {
                    Connective::And => " ∧ ",
                    Connective::Or => " ∨ ",
                    Connective::Implies => " → ",
                    _ => " = ",
                };
                out.push('(');
                join(out, args, op, |o, a| pp(a, o));
                out.push(')');
            }
        },
        Term::Drs(d) => {
            out.push('[');
            join(out, &d.universe, " ", |o, v| o.push_str(&v.name));
            out.push_str(" | ");
            join(out, &d.conditions, ", ", |o, c| pp_cond(c, o));
            out.push(']');
        }
        Term::Merge(a, b) => {
            out.push('(');
            pp(a, out);
            out.push_str(" ⊗ ");
            pp(b, out);
            out.push(')');
        }
    }
}

fn pp_cond(c: &Condition, out: &mut String) {
    match c {
        Condition::Atom { pred, args } => {
            out.push_str(pred);
            if !args.is_empty() {
                out.push('(');
                join(out, args, ",", |o, a| pp(a, o));
                out.push(')');
            }
        }
        Condition::Eq(a, b) => {
            pp(a, out);
            out.push_str(" = ");
            pp(b, out);
        }
        Condition::Not(a) => {
            out.push('¬');
            pp(a, out);
        }
        Condition::Implies(a, b) | Condition::Or(a, b) => {
            pp(a, out);
            out.push_str(if matches!(c, Condition::Or(..)) {
                " ∨ "
            } else {
                " ⇒ "
            });
            pp(b, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, Signature};

    fn t(s: &str) -> Term {
        parse_term(s, &Signature::default()).unwrap()
    }

    #[test]
    fn compact_forms() {
        assert_eq!(compact(&t("app(const(laugh), const(anna))")), "laugh(anna)");
        assert_eq!(
            compact(&t("drs([x],[eq(x, anna), laugh(x)])")),
            "drs([x],[eq(x,anna),laugh(x)])"
        );
        assert_eq!(compact(&t("lam(y, love(var(x), y))")), "lam(y,love(var(x),y))");
        assert_eq!(compact(&t("app(lam(x, x), anna)")), "app(lam(x,x),anna)");
    }

    #[test]
    fn canonical_round_trips() {
        for s in [
            "lam(P:<s,<e,t>>, app(down(P), anna))",
            "merge(drs([x],[man(x)]), drs([],[implies(drs([y],[farmer(y)]), drs([],[sleep(y), rain]))]))",
            "forall(x, man(x), exists(y, and(woman(y), love(x, y))))",
            "app(lam(P:<e,t>, app(P, idx(3))), lam(z, true))",
        ] {
            let term = t(s);
            assert_eq!(t(&canonical(&term)), term, "{s}");
            let ty = crate::term::type_of(&term).unwrap();
            let back = crate::term::parse_term_expecting(&compact(&term), &Signature::default(), &ty);
            assert_eq!(back.unwrap(), term, "{s}");
        }
    }

    #[test]
    fn compact_disambiguates_shadowed_constants() {
        let term = t("lam(x:e, app(const(x:<e,t>), x))");
        assert_eq!(compact(&term), "lam(x,app(const(x),x))");
    }

    #[test]
    fn pretty_notation() {
        assert_eq!(pretty(&t("lam(x, laugh(x))")), "λx.laugh(x)");
        assert_eq!(
            pretty(&t("merge(drs([x],[man(x)]), drs([],[laugh(x)]))")),
            "([x | man(x)] ⊗ [ | laugh(x)])"
        );
        assert_eq!(pretty(&t("down(up(walk))")), "ˇ(^walk)");
    }
}
