//! Description strings for terms, trees, traces and whole sessions, ready
//! for the grapher.

use semwork_grapher::{DescItem, DescNode};

use crate::engine::{DerivationSession, DisplayOptions};
use crate::reducer::ReductionTrace;
use crate::storage::StoredTerm;
use crate::syntax::SynTree;
use crate::term::{pretty, Condition, Drs, Term};

/// Anything that can be drawn.
pub trait ToDesc {
    fn to_desc(&self, opts: &DisplayOptions) -> DescNode;
}

pub fn term_to_desc<T: ToDesc + ?Sized>(x: &T, opts: &DisplayOptions) -> DescNode {
    x.to_desc(opts)
}

/// A reduction trace together with the term it starts from.
#[derive(Debug, Clone, Copy)]
pub struct TraceView<'a> {
    pub start: &'a Term,
    pub trace: &'a ReductionTrace,
}

fn text(s: impl Into<String>) -> DescNode {
    DescNode::text(s)
}

fn row(parts: Vec<DescNode>) -> DescNode {
    if parts.len() == 1 {
        return parts.into_iter().next().expect("one part");
    }
    DescNode::hbox(parts)
}

fn has_drs(t: &Term) -> bool {
    let mut found = false;
    t.any(&mut |s| {
        found |= matches!(s, Term::Drs(_));
        found
    });
    found
}

/// Box notation wherever a DRS occurs, linear notation elsewhere.
fn term_desc(t: &Term) -> DescNode {
    if !has_drs(t) {
        return text(pretty(t));
    }
    match t {
        Term::Drs(d) => drs_desc(d),
        Term::Merge(a, b) => row(vec![term_desc(a), text("⊗"), term_desc(b)]),
        Term::Lam(x, b) => row(vec![text(format!("λ{}.", x.name)), term_desc(b)]),
        Term::App(f, a) => row(vec![term_desc(f), text("("), term_desc(a), text(")")]),
        Term::Up(b) => row(vec![text("^"), term_desc(b)]),
        Term::Down(b) => row(vec![text("ˇ"), term_desc(b)]),
        _ => text(pretty(t)),
    }
}

fn args_text(args: &[Term]) -> String {
    args.iter().map(pretty).collect::<Vec<_>>().join(",")
}

fn condition_desc(c: &Condition) -> DescNode {
    match c {
        Condition::Atom { pred, args } => text(format!("{pred}({})", args_text(args))),
        Condition::Eq(a, b) => text(format!("{} = {}", pretty(a), pretty(b))),
        Condition::Not(k) => row(vec![text("¬"), term_desc(k)]),
        Condition::Implies(a, b) => row(vec![term_desc(a), text("⇒"), term_desc(b)]),
        Condition::Or(a, b) => row(vec![term_desc(a), text("∨"), term_desc(b)]),
    }
}

fn drs_desc(d: &Drs) -> DescNode {
    let universe: Vec<&str> = d.universe.iter().map(|v| v.name.as_str()).collect();
    let mut args = vec![DescItem::Node(text(universe.join(" ")))];
    args.extend(d.conditions.iter().map(|c| DescItem::Node(condition_desc(c))));
    DescNode::new("drs", args)
}

fn stored_desc(st: &StoredTerm) -> DescNode {
    let body = term_desc(&st.body);
    if st.store.is_empty() {
        return body;
    }
    let mut rows = vec![body];
    for e in &st.store {
        rows.push(row(vec![text(format!("{}:", e.index)), stored_desc(&e.quantifier)]));
    }
    DescNode::vbox(rows)
}

impl ToDesc for Term {
    fn to_desc(&self, _: &DisplayOptions) -> DescNode {
        term_desc(self)
    }
}

impl ToDesc for Drs {
    fn to_desc(&self, _: &DisplayOptions) -> DescNode {
        drs_desc(self)
    }
}

impl ToDesc for StoredTerm {
    fn to_desc(&self, _: &DisplayOptions) -> DescNode {
        stored_desc(self)
    }
}

impl ToDesc for TraceView<'_> {
    /// Every intermediate term stacked when `stack_reductions` is on,
    /// otherwise just where the trace ends.
    fn to_desc(&self, opts: &DisplayOptions) -> DescNode {
        if opts.stack_reductions {
            let mut rows = vec![term_desc(self.start)];
            rows.extend(self.trace.iter().map(|s| term_desc(&s.term)));
            DescNode::vbox(rows)
        } else {
            term_desc(self.trace.last().map_or(self.start, |s| &s.term))
        }
    }
}

fn tree_label(n: &SynTree) -> String {
    match n.word() {
        Some(w) => format!("{}\n{w}", n.label()),
        None => n.label(),
    }
}

fn tree_desc(n: &SynTree, mother: &dyn Fn(&SynTree) -> DescNode) -> DescNode {
    let m = mother(n);
    if n.is_leaf() {
        return m;
    }
    DescNode::tree(m, n.children.iter().map(|c| tree_desc(c, mother)).collect())
}

impl ToDesc for SynTree {
    fn to_desc(&self, opts: &DisplayOptions) -> DescNode {
        tree_desc(self, &|n| {
            let label = text(tree_label(n));
            if opts.box_nodes.contains(&n.id) {
                DescNode::frame(label)
            } else {
                label
            }
        })
    }
}

/// Action id of a node's region: the resource path a client posts steps to.
/// Sessions without an id get a relative path.
pub fn node_action(session: &str, node: usize) -> String {
    if session.is_empty() {
        return format!("nodes/{node}");
    }
    format!("/sessions/{session}/nodes/{node}")
}

fn node_desc(s: &DerivationSession, n: &SynTree, opts: &DisplayOptions) -> DescNode {
    let st = &s.nodes[n.id];
    let mut rows = vec![text(tree_label(n))];
    if let Some(cur) = &st.current {
        let meaning = match (&st.trace_start, opts.stack_reductions && !st.trace.is_empty()) {
            (Some(start), true) if cur.store.is_empty() => TraceView {
                start,
                trace: &st.trace,
            }
            .to_desc(opts),
            _ => stored_desc(cur),
        };
        rows.push(meaning);
    }
    if st.readings.len() > 1 {
        for (i, r) in st.readings.iter().enumerate() {
            rows.push(row(vec![text(format!("reading {}:", i + 1)), term_desc(r)]));
        }
    }
    if let Some(f) = &st.fol {
        rows.push(text(format!("FOL: {}", pretty(f))));
    }
    let body = if rows.len() == 1 {
        rows.pop().expect("label")
    } else {
        DescNode::vbox(rows)
    };
    let body = if opts.box_nodes.contains(&n.id) {
        DescNode::frame(body)
    } else {
        body
    };
    DescNode::active(node_action(&s.id, n.id), body)
}

impl ToDesc for DerivationSession {
    /// The syntax tree with each node's current meaning below its label.
    /// Every node is an active region named by [`node_action`].
    fn to_desc(&self, opts: &DisplayOptions) -> DescNode {
        tree_desc(&self.tree, &|n| node_desc(self, n, opts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Engine, ParamSet, StepAction};
    use crate::syntax::tokenize;
    use crate::term::{parse_term, Signature};
    use semwork_grapher::{layout, parse_desc, print_desc, BoxKind, Style};

    fn t(src: &str) -> Term {
        parse_term(src, &Signature::new()).unwrap()
    }

    #[test]
    fn anna_laughs_tree_has_the_three_node_shape() {
        let s = Engine::default()
            .open_session(&tokenize("anna laughs"), &ParamSet::default())
            .unwrap();
        let d = s.tree.to_desc(&DisplayOptions::default());
        assert_eq!(
            print_desc(&d),
            "{tree {plain-text \"s\"} {plain-text \"np\nanna\"} {plain-text \"vp\nlaughs\"}}"
        );
        assert_eq!(parse_desc(&print_desc(&d)).unwrap(), d);
    }

    #[test]
    fn drs_counts() {
        let d = t("drs([x], [man(x)])").to_desc(&DisplayOptions::default());
        assert_eq!(d.tag, "drs");
        let boxes = layout(&d, &Style::default());
        let count = |k: BoxKind| boxes.iter().filter(|b| b.kind == k).count();
        assert_eq!(
            (count(BoxKind::Rect), count(BoxKind::Line), count(BoxKind::Text)),
            (1, 1, 2)
        );
    }

    #[test]
    fn stacked_trace_has_one_row_per_term() {
        let start = t("app(lam(x, app(lam(y, laugh(y)), x)), anna)");
        let (_, trace) = crate::reducer::normalize(&start, crate::reducer::ReducerKind::Substitution, 100).unwrap();
        assert_eq!(trace.len(), 2);
        let view = TraceView {
            start: &start,
            trace: &trace,
        };
        let opts = DisplayOptions {
            stack_reductions: true,
            ..DisplayOptions::default()
        };
        let d = view.to_desc(&opts);
        assert_eq!((d.tag.as_str(), d.children().count()), ("vbox", 3));
        assert_eq!(view.to_desc(&DisplayOptions::default()), text("laugh(anna)"));
    }

    #[test]
    fn sessions_mark_nodes_active_and_frame_on_request() {
        let e = Engine::default();
        let mut s = e.open_session(&tokenize("anna laughs"), &ParamSet::default()).unwrap();
        s.id = "k".into();
        s.apply_step(0, StepAction::ProcessFully).unwrap();
        let opts = DisplayOptions {
            box_nodes: vec![0],
            stack_reductions: true,
        };
        let d = s.to_desc(&opts);
        assert_eq!(d.tag, "tree");
        let root = d.children().next().unwrap();
        assert_eq!(root.action(), Some("/sessions/k/nodes/0"));
        assert_eq!(root.children().next().unwrap().tag, "frame");
        let printed = print_desc(&d);
        for n in 0..3 {
            assert!(printed.contains(&format!("\"/sessions/k/nodes/{n}\"")));
        }
        assert!(printed.contains("laugh(anna)"));
    }
}
