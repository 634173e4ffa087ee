//! DRS merge, accessibility and equivalence up to referent renaming and
//! condition order.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::term::{all_names, exports, free_names, fresh_name, rename_spine, stem, Condition, Drs, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DrtError {
    #[error("invalid path {0:?}")]
    InvalidPath(Vec<usize>),
}

/// Unions universes and conditions. Referents of `b` that collide with the
/// universe of `a`, or with a name free in `a`, are renamed first.
pub fn merge(a: &Drs, b: &Drs) -> Drs {
    let left = Term::Drs(a.clone());
    let mut right = Term::Drs(b.clone());
    let mut taken: BTreeSet<String> = a.universe.iter().map(|v| v.name.clone()).collect();
    taken.extend(free_names(&left));
    let mut avoid = all_names(&left);
    avoid.extend(all_names(&right));
    for v in &b.universe {
        if taken.contains(&v.name) {
            let fresh = fresh_name(stem(&v.name), &avoid);
            avoid.insert(fresh.clone());
            right = rename_spine(&right, &v.name, &fresh, false);
        }
    }
    let Term::Drs(b) = right else { unreachable!() };
    let mut universe = a.universe.clone();
    universe.extend(b.universe);
    let mut conditions = a.conditions.clone();
    conditions.extend(b.conditions);
    Drs { universe, conditions }
}

/// Referents accessible at `path` (child indices as in [`Term::children`])
/// inside `d`: the universes of every DRS on the way down, plus antecedent
/// referents when passing into an implication's consequent.
pub fn accessible_referents(d: &Drs, path: &[usize]) -> Result<Vec<Var>, DrtError> {
    let root = Term::Drs(d.clone());
    let mut out: Vec<Var> = Vec::new();
    let push = |out: &mut Vec<Var>, vs: Vec<Var>| {
        for v in vs {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    };
    let mut node = &root;
    for (depth, &i) in path.iter().enumerate() {
        let invalid = || DrtError::InvalidPath(path[..=depth].to_vec());
        match node {
            Term::Drs(d) => {
                push(&mut out, d.universe.clone());
                let mut k = 0;
                for c in &d.conditions {
                    let n = c.operands().len();
                    if i < k + n {
                        if let Condition::Implies(ante, _) = c {
                            if i == k + 1 {
                                push(&mut out, exports(ante));
                            }
                        }
                        break;
                    }
                    k += n;
                }
            }
            Term::Merge(a, _) if i == 1 => push(&mut out, exports(a)),
            _ => {}
        }
        node = node.children().get(i).copied().ok_or_else(invalid)?;
    }
    if let Term::Drs(d) = node {
        push(&mut out, d.universe.clone());
    }
    Ok(out)
}

/// Free referents of a DRS, with the path of the first offending occurrence.
pub fn first_free_referent(d: &Drs) -> Option<(Var, Vec<usize>)> {
    let t = Term::Drs(d.clone());
    let free = crate::term::free_vars(&t);
    let v = free.into_iter().next()?;
    let path = crate::reducer::find_path(&t, &|s| matches!(s, Term::Var(w) if *w == v)).unwrap_or_default();
    Some((v, path))
}

/// Order-insensitive key: equal keys iff the DRSs differ only by renaming
/// of referents and bound variables and by the order of conditions.
pub fn canonical_key(d: &Drs) -> String {
    Keyer { env: Vec::new() }.drs(d, 0)
}

/// Alpha-equivalence after sorting conditions canonically.
pub fn equivalent(a: &Drs, b: &Drs) -> bool {
    a.universe.len() == b.universe.len()
        && a.conditions.len() == b.conditions.len()
        && canonical_key(a) == canonical_key(b)
}

struct Keyer {
    env: Vec<(String, String)>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

impl Keyer {
    fn drs(&mut self, d: &Drs, depth: usize) -> String {
        let mut best: Option<String> = None;
        for perm in permutations(d.universe.len()) {
            let n = self.env.len();
            for (slot, &i) in perm.iter().enumerate() {
                self.env.push((d.universe[i].name.clone(), format!("r{depth}_{slot}")));
            }
            let mut conds: Vec<String> = d.conditions.iter().map(|c| self.cond(c, depth + 1)).collect();
            conds.sort();
            self.env.truncate(n);
            let key = format!("[{}|{}]", d.universe.len(), conds.join(";"));
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        best.unwrap_or_default()
    }

    fn cond(&mut self, c: &Condition, depth: usize) -> String {
        match c {
            Condition::Atom { pred, args } => {
                let args: Vec<String> = args.iter().map(|a| self.term(a, depth)).collect();
                format!("{pred}({})", args.join(","))
            }
            Condition::Eq(a, b) => format!("eq({},{})", self.term(a, depth), self.term(b, depth)),
            Condition::Not(a) => format!("not({})", self.term(a, depth)),
            Condition::Or(a, b) => format!("or({},{})", self.term(a, depth), self.term(b, depth)),
            Condition::Implies(a, b) => {
                let ka = self.term(a, depth);
                let n = self.env.len();
                // The antecedent's referents were named inside its own key;
                // bind them positionally for the consequent.
                for (i, v) in exports(a).into_iter().enumerate() {
                    self.env.push((v.name, format!("a{depth}_{i}")));
                }
                let kb = self.term(b, depth + 1);
                self.env.truncate(n);
                format!("implies({ka},{kb})")
            }
        }
    }

    fn term(&mut self, t: &Term, depth: usize) -> String {
        match t {
            Term::Drs(d) => self.drs(d, depth),
            Term::Var(v) => match self.env.iter().rev().find(|(n, _)| *n == v.name) {
                Some((_, k)) => k.clone(),
                None => format!("var({})", v.name),
            },
            Term::Const(c) => c.name.clone(),
            Term::Lam(x, b) => {
                self.env.push((x.name.clone(), format!("b{depth}")));
                let k = self.term(b, depth + 1);
                self.env.pop();
                format!("lam({k})")
            }
            Term::Quant {
                kind,
                var,
                restrictor,
                body,
            } => {
                self.env.push((var.name.clone(), format!("b{depth}")));
                let r = restrictor.as_ref().map(|r| self.term(r, depth + 1));
                let b = self.term(body, depth + 1);
                self.env.pop();
                format!("{kind:?}({},{b})", r.unwrap_or_default())
            }
            Term::Merge(a, b) => {
                let ka = self.term(a, depth);
                let n = self.env.len();
                for (i, v) in exports(a).into_iter().enumerate() {
                    self.env.push((v.name, format!("m{depth}_{i}")));
                }
                let kb = self.term(b, depth + 1);
                self.env.truncate(n);
                format!("merge({ka},{kb})")
            }
            _ => {
                let head = match t {
                    Term::App(..) => "app".to_string(),
                    Term::Up(_) => "up".to_string(),
                    Term::Down(_) => "down".to_string(),
                    Term::Conn(k, _) => k.keyword().to_string(),
                    Term::Idx(i, _) => format!("idx{i}"),
                    _ => unreachable!(),
                };
                let kids: Vec<String> = t.children().iter().map(|c| self.term(c, depth)).collect();
                format!("{head}({})", kids.join(","))
            }
        }
    }
}

/// Merges a list of DRSs left to right.
pub fn merge_all<'a>(ds: impl IntoIterator<Item = &'a Drs>) -> Drs {
    ds.into_iter().fold(Drs::empty(), |acc, d| merge(&acc, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, Signature};

    fn d(s: &str) -> Drs {
        match parse_term(s, &Signature::default()).unwrap() {
            Term::Drs(d) => d,
            other => panic!("not a DRS: {other}"),
        }
    }

    #[test]
    fn merge_examples() {
        assert_eq!(
            merge(&d("drs([x],[man(x)])"), &d("drs([y],[laugh(y)])")),
            d("drs([x,y],[man(x),laugh(y)])")
        );
        let k = d("drs([x],[man(x), not(drs([y],[love(x,y)]))])");
        assert_eq!(merge(&Drs::empty(), &k), k);
        assert_eq!(
            merge(&d("drs([x],[man(x)])"), &d("drs([x],[woman(x)])")),
            d("drs([x,x1],[man(x),woman(x1)])")
        );
    }

    #[test]
    fn merge_avoids_capturing_free_names_of_the_left_operand() {
        let m = merge(&d("drs([],[man(var(x))])"), &d("drs([x],[woman(x)])"));
        assert_eq!(m, d("drs([x1],[man(var(x)),woman(x1)])"));
    }

    #[test]
    fn accessibility() {
        let donkey = d("drs([],[implies(drs([x],[farmer(x)]), drs([],[sleep(x)]))])");
        assert_eq!(accessible_referents(&donkey, &[1]).unwrap(), [Var::entity("x")]);
        assert_eq!(accessible_referents(&donkey, &[0]).unwrap(), [Var::entity("x")]);
        assert!(accessible_referents(&donkey, &[]).unwrap().is_empty());
        let top = d("drs([x],[man(x)])");
        assert_eq!(accessible_referents(&top, &[]).unwrap(), [Var::entity("x")]);
        let neg = d("drs([x],[man(x), not(drs([y],[love(x,y)]))])");
        assert_eq!(
            accessible_referents(&neg, &[1]).unwrap(),
            [Var::entity("x"), Var::entity("y")]
        );
        assert!(accessible_referents(&neg, &[5]).is_err());
    }

    #[test]
    fn equivalence_ignores_order_and_names() {
        let a = d("drs([x,y],[man(x), woman(y), love(x,y)])");
        let b = d("drs([v,u],[love(u,v), man(u), woman(v)])");
        let c = d("drs([v,u],[love(v,u), man(u), woman(v)])");
        assert!(equivalent(&a, &b));
        assert!(!equivalent(&a, &c));
    }
}
