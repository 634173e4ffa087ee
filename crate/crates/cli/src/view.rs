//! Wire forms of sessions and step reports. Terms travel as text: `term`
//! fields hold the typed canonical form that parses back exactly, `text`
//! fields the short form the CLI prints.

use serde::{Deserialize, Serialize};

use semwork_core::engine::{DerivationSession, ParamSet, Phase, StepAction, StepReport};
use semwork_core::storage::{print_stored, StoredTerm};
use semwork_core::term::{canonical, compact, Term};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermText {
    pub term: String,
    pub text: String,
}

impl TermText {
    pub fn of(t: &Term) -> Self {
        TermText {
            term: canonical(t),
            text: compact(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeView {
    pub id: usize,
    pub phase: Phase,
    pub category: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    pub span: (usize, usize),
    pub children: Vec<usize>,
    /// Body of the current meaning.
    pub current: Option<TermText>,
    /// The meaning with its store, in `st(...)` notation; only when the
    /// store is not empty.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stored: Option<String>,
    pub applicable: Vec<StepAction>,
    pub trace_length: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub readings: Vec<TermText>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<TermText>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fol: Option<TermText>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub sentence: Vec<String>,
    pub params: ParamSet,
    pub tree: usize,
    pub parse_count: usize,
    pub nodes: Vec<NodeView>,
    /// Final meanings of the sentence, empty until there are any.
    #[serde(rename = "final")]
    pub finals: Vec<TermText>,
    pub complete: bool,
    pub events: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub desc: Option<String>,
}

fn stored_text(st: &StoredTerm) -> Option<String> {
    (!st.store.is_empty()).then(|| print_stored(st))
}

pub fn session_view(s: &DerivationSession) -> SessionView {
    let nodes = s
        .tree
        .nodes()
        .into_iter()
        .map(|n| {
            let st = &s.nodes[n.id];
            NodeView {
                id: n.id,
                phase: st.phase,
                category: n.label(),
                word: n.word().map(str::to_string),
                span: n.span,
                children: n.children.iter().map(|c| c.id).collect(),
                current: st.current.as_ref().map(|c| TermText::of(&c.body)),
                stored: st.current.as_ref().and_then(stored_text),
                applicable: st.applicable.clone(),
                trace_length: st.trace.len(),
                readings: st.readings.iter().map(TermText::of).collect(),
                violations: st.violations.iter().map(TermText::of).collect(),
                fol: st.fol.as_ref().map(TermText::of),
            }
        })
        .collect();
    SessionView {
        id: s.id.clone(),
        sentence: s.sentence.clone(),
        params: s.params.clone(),
        tree: s.tree_index,
        parse_count: s.parse_count,
        nodes,
        finals: s.final_terms().iter().map(TermText::of).collect(),
        complete: s.is_complete(),
        events: s.events.len(),
        desc: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStepView {
    pub rule: String,
    pub path: Vec<usize>,
    pub result: TermText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportView {
    pub node: usize,
    pub action: StepAction,
    pub phase_before: Phase,
    pub phase_after: Phase,
    pub before: Option<TermText>,
    pub after: Option<TermText>,
    pub steps: Vec<TraceStepView>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub readings: Vec<TermText>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fol: Option<TermText>,
}

pub fn report_view(r: &StepReport) -> ReportView {
    ReportView {
        node: r.node,
        action: r.action.clone(),
        phase_before: r.phase_before,
        phase_after: r.phase_after,
        before: r.before.as_ref().map(|c| TermText::of(&c.body)),
        after: r.after.as_ref().map(|c| TermText::of(&c.body)),
        steps: r
            .steps
            .iter()
            .map(|s| TraceStepView {
                rule: s.rule.name().to_string(),
                path: s.path.clone(),
                result: TermText::of(&s.term),
            })
            .collect(),
        readings: r.readings.iter().map(TermText::of).collect(),
        fol: r.fol.as_ref().map(TermText::of),
    }
}
