use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{EngineError, Modules, ParamSet};
use crate::params::{FormalismId, StorageMode};
use crate::reducer::{contract_at, find_path, step, ReductionTrace, Rule, TraceStep, DEFAULT_FUEL};
use crate::semmap::{combine, SemmapError};
use crate::storage::{enumerate_readings, retrieve, store, StoredTerm};
use crate::syntax::SynTree;
use crate::term::{free_vars, type_of, SemType, Term};
use crate::translate::drs_to_fol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// No meaning yet.
    Bare,
    /// A leaf with its lexical meaning, not yet in normal form.
    Annotated,
    /// An inner node with its daughters' meanings put together, not yet in
    /// normal form.
    Combined,
    /// In normal form.
    Final,
}

/// What a user can do at a node. Variants are listed in menu order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepAction {
    Annotate,
    Combine,
    Beta,
    Cancel,
    Merge,
    Store(u32),
    Retrieve(u32),
    ProcessFully,
    TranslateToFol,
}

impl fmt::Display for StepAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepAction::Annotate => f.write_str("annotate"),
            StepAction::Combine => f.write_str("combine"),
            StepAction::Beta => f.write_str("beta"),
            StepAction::Cancel => f.write_str("cancel"),
            StepAction::Merge => f.write_str("merge"),
            StepAction::Store(i) => write!(f, "store({i})"),
            StepAction::Retrieve(i) => write!(f, "retrieve({i})"),
            StepAction::ProcessFully => f.write_str("process-fully"),
            StepAction::TranslateToFol => f.write_str("translate-to-fol"),
        }
    }
}

impl FromStr for StepAction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let indexed = |prefix: &str| -> Option<Result<u32, String>> {
            let rest = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(rest.trim().parse().map_err(|_| format!("bad index in `{s}`")))
        };
        if let Some(i) = indexed("store") {
            return i.map(StepAction::Store);
        }
        if let Some(i) = indexed("retrieve") {
            return i.map(StepAction::Retrieve);
        }
        Ok(match s {
            "annotate" => StepAction::Annotate,
            "combine" => StepAction::Combine,
            "beta" => StepAction::Beta,
            "cancel" => StepAction::Cancel,
            "merge" => StepAction::Merge,
            "process-fully" => StepAction::ProcessFully,
            "translate-to-fol" => StepAction::TranslateToFol,
            _ => return Err(format!("unknown action `{s}`")),
        })
    }
}

impl Serialize for StepAction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StepAction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeState {
    pub phase: Phase,
    /// The node's meaning with its quantifier store; `None` while bare.
    pub current: Option<StoredTerm>,
    /// Term the trace starts from.
    pub trace_start: Option<Term>,
    pub trace: ReductionTrace,
    pub applicable: Vec<StepAction>,
    /// Index under which this node's meaning went into storage.
    pub stored: Option<u32>,
    /// Every scoping found when the store was discharged all at once.
    pub readings: Vec<Term>,
    /// Retrieval results that still contained a store index.
    pub violations: Vec<Term>,
    pub fol: Option<Term>,
}

impl NodeState {
    fn bare() -> Self {
        NodeState {
            phase: Phase::Bare,
            current: None,
            trace_start: None,
            trace: Vec::new(),
            applicable: Vec::new(),
            stored: None,
            readings: Vec::new(),
            violations: Vec::new(),
            fol: None,
        }
    }

    fn body_type(&self) -> Option<SemType> {
        type_of(&self.current.as_ref()?.body).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub node: usize,
    pub action: StepAction,
}

/// Everything needed to rebuild a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionLog {
    #[serde(default)]
    pub id: String,
    pub sentence: Vec<String>,
    pub params: ParamSet,
    #[serde(default)]
    pub tree: usize,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub node: usize,
    pub action: StepAction,
    pub phase_before: Phase,
    pub phase_after: Phase,
    pub before: Option<StoredTerm>,
    pub after: Option<StoredTerm>,
    /// Reduction steps this action performed at the node.
    pub steps: ReductionTrace,
    pub readings: Vec<Term>,
    pub violations: Vec<Term>,
    pub fol: Option<Term>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivationSession {
    pub id: String,
    pub sentence: Vec<String>,
    pub params: ParamSet,
    /// Which parse of the sentence, and how many there are.
    pub tree_index: usize,
    pub parse_count: usize,
    pub tree: SynTree,
    /// Indexed by node id.
    pub nodes: Vec<NodeState>,
    pub events: Vec<Event>,
    next_index: u32,
    #[serde(skip)]
    modules: Option<Modules>,
    #[serde(skip)]
    parents: Vec<Option<usize>>,
}

impl PartialEq for DerivationSession {
    fn eq(&self, other: &Self) -> bool {
        serde_json::to_value(self).ok() == serde_json::to_value(other).ok()
    }
}

fn is_placeholder(t: &Term) -> bool {
    match t {
        Term::Lam(_, b) => match &**b {
            Term::App(_, a) => matches!(**a, Term::Idx(..)),
            _ => false,
        },
        _ => false,
    }
}

fn redex_path(t: &Term, rule: Rule) -> Option<Vec<usize>> {
    find_path(t, &|s| Rule::of_redex(s) == Some(rule))
}

impl DerivationSession {
    pub(super) fn new(
        sentence: Vec<String>,
        modules: Modules,
        tree: SynTree,
        tree_index: usize,
        parse_count: usize,
    ) -> Self {
        let n = tree.size();
        let mut parents = vec![None; n];
        for (c, p) in tree.parents() {
            parents[c] = Some(p);
        }
        let mut s = DerivationSession {
            id: String::new(),
            sentence,
            params: modules.params.clone(),
            tree_index,
            parse_count,
            tree,
            nodes: vec![NodeState::bare(); n],
            events: Vec::new(),
            next_index: 1,
            modules: Some(modules),
            parents,
        };
        s.refresh();
        s
    }

    fn modules(&self) -> &Modules {
        self.modules.as_ref().expect("live session")
    }

    fn formalism(&self) -> FormalismId {
        self.params.formalism
    }

    pub fn log(&self) -> SessionLog {
        SessionLog {
            id: self.id.clone(),
            sentence: self.sentence.clone(),
            params: self.params.clone(),
            tree: self.tree_index,
            events: self.events.clone(),
        }
    }

    pub fn node(&self, id: usize) -> Option<&NodeState> {
        self.nodes.get(id)
    }

    pub fn root(&self) -> &NodeState {
        &self.nodes[0]
    }

    fn syn(&self, id: usize) -> &SynTree {
        self.tree.node(id).expect("node id in range")
    }

    fn children(&self, id: usize) -> Vec<usize> {
        self.syn(id).children.iter().map(|c| c.id).collect()
    }

    fn parent_bare(&self, id: usize) -> bool {
        self.parents[id].is_none_or(|p| self.nodes[p].phase == Phase::Bare)
    }

    fn subtree(&self, id: usize) -> Vec<usize> {
        self.syn(id).nodes().iter().map(|n| n.id).collect()
    }

    /// Final meanings of the sentence: every reading if the store was
    /// discharged all at once, otherwise the root's current meaning once
    /// it is final and its store is empty.
    pub fn final_terms(&self) -> Vec<Term> {
        let root = self.root();
        if !root.readings.is_empty() {
            return root.readings.clone();
        }
        match &root.current {
            Some(c) if root.phase == Phase::Final && c.store.is_empty() => vec![c.body.clone()],
            _ => Vec::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.nodes.iter().all(|n| n.phase == Phase::Final)
            && !self.nodes[0].applicable.contains(&StepAction::ProcessFully)
    }

    fn compute_applicable(&self, id: usize) -> Vec<StepAction> {
        let mut out = BTreeSet::new();
        let st = &self.nodes[id];
        let syn = self.syn(id);
        let storage = self.params.storage != StorageMode::None;
        match st.phase {
            Phase::Bare => {
                if syn.is_leaf() {
                    out.insert(StepAction::Annotate);
                } else if self.children(id).iter().all(|&c| self.nodes[c].phase == Phase::Final)
                    && self.combined(id).is_ok()
                {
                    out.insert(StepAction::Combine);
                }
            }
            Phase::Annotated | Phase::Combined => {
                let body = &st.current.as_ref().expect("annotated node").body;
                for (rule, action) in [
                    (Rule::Beta, StepAction::Beta),
                    (Rule::Cancel, StepAction::Cancel),
                    (Rule::Merge, StepAction::Merge),
                ] {
                    if redex_path(body, rule).is_some() {
                        out.insert(action);
                    }
                }
            }
            Phase::Final => {
                let cur = st.current.as_ref().expect("final node");
                let ty = st.body_type();
                if storage && self.parent_bare(id) {
                    if id != 0
                        && st.stored.is_none()
                        && !is_placeholder(&cur.body)
                        && ty.as_ref().is_some_and(SemType::is_quantifier)
                    {
                        out.insert(StepAction::Store(self.next_index));
                    }
                    if ty == Some(SemType::T) {
                        out.extend(cur.top_indices().into_iter().map(StepAction::Retrieve));
                    }
                }
                if self.formalism() == FormalismId::Ldrt
                    && st.fol.is_none()
                    && cur.store.is_empty()
                    && cur.body.as_drs().is_some()
                    && free_vars(&cur.body).is_empty()
                {
                    out.insert(StepAction::TranslateToFol);
                }
            }
        }
        let unfinished = self.subtree(id).iter().any(|&n| self.nodes[n].phase != Phase::Final);
        let dischargeable = storage
            && self.parent_bare(id)
            && st.phase == Phase::Final
            && st.body_type() == Some(SemType::T)
            && st.current.as_ref().is_some_and(|c| !c.store.is_empty());
        if unfinished || dischargeable {
            out.insert(StepAction::ProcessFully);
        }
        out.into_iter().collect()
    }

    fn refresh(&mut self) {
        for id in 0..self.nodes.len() {
            self.nodes[id].applicable = self.compute_applicable(id);
        }
    }

    fn combined(&self, id: usize) -> Result<StoredTerm, EngineError> {
        let mut bodies = Vec::new();
        let mut stores = Vec::new();
        for c in self.children(id) {
            let cur = self.nodes[c].current.as_ref().ok_or(SemmapError::MissingDaughter(id))?;
            bodies.push(cur.body.clone());
            stores.extend(cur.store.iter().cloned());
        }
        let m = self.modules();
        let body = combine(self.syn(id), &bodies, &m.mapping, self.formalism())?;
        Ok(StoredTerm { body, store: stores })
    }

    /// Sets a new meaning that starts a fresh trace.
    fn restart(&mut self, id: usize, st: StoredTerm, phase: Phase) {
        let n = &mut self.nodes[id];
        n.trace_start = Some(st.body.clone());
        n.trace.clear();
        n.current = Some(st);
        n.phase = phase;
        n.fol = None;
        self.settle(id);
    }

    fn settle(&mut self, id: usize) {
        let n = &mut self.nodes[id];
        if let Some(c) = &n.current {
            if n.phase != Phase::Bare && crate::reducer::next_redex(&c.body).is_none() {
                n.phase = Phase::Final;
            }
        }
    }

    fn reduce(&mut self, id: usize, rule: Rule) -> Result<(), EngineError> {
        let kind = self.params.reducer;
        let n = &mut self.nodes[id];
        let cur = n.current.as_mut().expect("annotated node");
        let path = redex_path(&cur.body, rule).ok_or(crate::reducer::ReduceError::NoRedex)?;
        let term = contract_at(&cur.body, &path, rule, kind);
        type_of(&term)?;
        cur.body = term.clone();
        n.trace.push(TraceStep { rule, path, term });
        self.settle(id);
        Ok(())
    }

    fn normalize_node(&mut self, id: usize) -> Result<(), EngineError> {
        let kind = self.params.reducer;
        let mut fuel = DEFAULT_FUEL;
        loop {
            let n = &mut self.nodes[id];
            let cur = n.current.as_mut().expect("annotated node");
            let Some(s) = step(&cur.body, kind) else { break };
            if fuel == 0 {
                return Err(crate::reducer::ReduceError::FuelExhausted {
                    term: cur.body.clone(),
                    trace: n.trace.clone(),
                }
                .into());
            }
            fuel -= 1;
            type_of(&s.term)?;
            cur.body = s.term.clone();
            n.trace.push(s);
        }
        self.settle(id);
        Ok(())
    }

    fn do_annotate(&mut self, id: usize) -> Result<(), EngineError> {
        let word = self.syn(id).word().expect("leaf").to_string();
        let t = self.modules().lexicon.expand(&word, self.formalism())?;
        self.restart(id, StoredTerm::plain(t), Phase::Annotated);
        Ok(())
    }

    fn do_combine(&mut self, id: usize) -> Result<(), EngineError> {
        let st = self.combined(id)?;
        self.restart(id, st, Phase::Combined);
        Ok(())
    }

    fn do_store(&mut self, id: usize, index: u32) -> Result<(), EngineError> {
        let cur = self.nodes[id].current.clone().expect("final node");
        let st = store(&cur, index, self.params.storage)?;
        self.next_index = self.next_index.max(index + 1);
        self.nodes[id].stored = Some(index);
        self.restart(id, st, Phase::Final);
        Ok(())
    }

    fn do_retrieve(&mut self, id: usize, index: u32) -> Result<(), EngineError> {
        let cur = self.nodes[id].current.clone().expect("final node");
        let st = retrieve(&cur, index, self.formalism())?;
        let phase = if self.syn(id).is_leaf() {
            Phase::Annotated
        } else {
            Phase::Combined
        };
        self.nodes[id].readings.clear();
        self.nodes[id].violations.clear();
        self.restart(id, st, phase);
        Ok(())
    }

    fn do_translate(&mut self, id: usize) -> Result<(), EngineError> {
        let cur = self.nodes[id].current.as_ref().expect("final node");
        let drs = cur.body.as_drs().expect("applicable only on DRSs");
        let f = drs_to_fol(drs)?;
        self.nodes[id].fol = Some(f);
        Ok(())
    }

    /// Finishes everything below and at `id`. With storage, quantified
    /// noun phrases below are stored as soon as they are final and a
    /// sentence-level `id` discharges its whole store, trying every order.
    fn do_process(&mut self, id: usize, top: bool) -> Result<(), EngineError> {
        let storage = self.params.storage != StorageMode::None;
        for c in self.children(id) {
            self.do_process(c, false)?;
            let cn = &self.nodes[c];
            let quantified = cn.body_type().is_some_and(|t| t.is_quantifier());
            let cur = cn.current.as_ref().expect("processed");
            if storage
                && self.nodes[id].phase == Phase::Bare
                && !self.syn(c).is_leaf()
                && cn.stored.is_none()
                && quantified
                && !is_placeholder(&cur.body)
            {
                let index = self.next_index;
                self.do_store(c, index)?;
            }
        }
        match self.nodes[id].phase {
            Phase::Bare if self.syn(id).is_leaf() => self.do_annotate(id)?,
            Phase::Bare => self.do_combine(id)?,
            _ => {}
        }
        self.normalize_node(id)?;
        let n = &self.nodes[id];
        let cur = n.current.as_ref().expect("processed");
        if top && storage && self.parent_bare(id) && n.body_type() == Some(SemType::T) && !cur.store.is_empty() {
            self.discharge(id)?;
        }
        Ok(())
    }

    fn discharge(&mut self, id: usize) -> Result<(), EngineError> {
        let cur = self.nodes[id].current.clone().expect("final node");
        let found = enumerate_readings(&cur, self.formalism(), self.params.reducer)?;
        let bad: Vec<&Vec<u32>> = found.violations.iter().map(|(o, _)| o).collect();
        let order = found
            .orders
            .iter()
            .find(|o| !bad.contains(o))
            .or(found.orders.first())
            .cloned()
            .unwrap_or_default();
        let mut st = cur;
        for i in order {
            st = retrieve(&st, i, self.formalism())?;
        }
        self.restart(id, st, Phase::Combined);
        self.normalize_node(id)?;
        let n = &mut self.nodes[id];
        n.readings = found.readings;
        n.violations = found.violations.into_iter().map(|(_, t)| t).collect();
        if let (Some(first), Some(cur)) = (n.readings.first_mut(), &n.current) {
            // show the reading exactly as derived
            if crate::term::alpha_eq(first, &cur.body) {
                *first = cur.body.clone();
            }
        }
        Ok(())
    }

    /// Applies `action` at node `id` if it is currently applicable.
    pub fn apply_step(&mut self, id: usize, action: StepAction) -> Result<StepReport, EngineError> {
        let node = self.nodes.get(id).ok_or(EngineError::UnknownNode(id))?;
        if !node.applicable.contains(&action) {
            return Err(EngineError::NotApplicable { action, node: id });
        }
        let before = node.clone();
        let mut work = self.clone();
        match &action {
            StepAction::Annotate => work.do_annotate(id)?,
            StepAction::Combine => work.do_combine(id)?,
            StepAction::Beta => work.reduce(id, Rule::Beta)?,
            StepAction::Cancel => work.reduce(id, Rule::Cancel)?,
            StepAction::Merge => work.reduce(id, Rule::Merge)?,
            StepAction::Store(i) => work.do_store(id, *i)?,
            StepAction::Retrieve(i) => work.do_retrieve(id, *i)?,
            StepAction::ProcessFully => work.do_process(id, true)?,
            StepAction::TranslateToFol => work.do_translate(id)?,
        }
        work.events.push(Event {
            node: id,
            action: action.clone(),
        });
        work.refresh();
        *self = work;
        let after = &self.nodes[id];
        let steps = if after.trace_start == before.trace_start && after.trace.starts_with(&before.trace) {
            after.trace[before.trace.len()..].to_vec()
        } else {
            after.trace.clone()
        };
        Ok(StepReport {
            node: id,
            action,
            phase_before: before.phase,
            phase_after: after.phase,
            before: before.current,
            after: after.current.clone(),
            steps,
            readings: after.readings.clone(),
            violations: after.violations.clone(),
            fol: after.fol.clone(),
        })
    }

    /// Byte-exact serialisation of the whole state.
    pub fn state_json(&self) -> String {
        serde_json::to_string(self).expect("session state serialises")
    }
}
