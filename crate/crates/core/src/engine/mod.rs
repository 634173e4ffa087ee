//! Derivation sessions over a parsed sentence, driven one step at a time or
//! all at once, under a parameter set resolved through the registry.

mod registry;
mod session;

use thiserror::Error;

pub use registry::{
    CompatLine, Compatibility, DisplayOptions, Modules, ParamSet, Registry, Verdict, BUNDLED_COMPAT, DIMENSIONS,
};
pub use session::{DerivationSession, Event, NodeState, Phase, SessionLog, StepAction, StepReport};

use crate::reducer::ReduceError;
use crate::semmap::SemmapError;
use crate::storage::StorageError;
use crate::syntax::{parse, SyntaxError};
use crate::term::TermError;
use crate::translate::TranslateError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("empty sentence")]
    EmptySentence,
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("no parse")]
    NoParse,
    #[error("parse {index} requested, sentence has {count}")]
    NoSuchTree { index: usize, count: usize },
    #[error("`{action}` is not applicable at node {node}")]
    NotApplicable { action: StepAction, node: usize },
    #[error("no node {0}")]
    UnknownNode(usize),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error(transparent)]
    Semantics(#[from] SemmapError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Type(#[from] TermError),
}

impl From<SyntaxError> for EngineError {
    fn from(e: SyntaxError) -> Self {
        match e {
            SyntaxError::UnknownWord(w) => EngineError::UnknownWord(w),
            SyntaxError::NoParse => EngineError::NoParse,
            SyntaxError::EmptySentence => EngineError::EmptySentence,
            e @ SyntaxError::Incompatible { .. } => EngineError::InvalidParams(e.to_string()),
        }
    }
}

impl EngineError {
    /// Stable machine-readable name, one per kind of failure.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::InvalidParams(_) => "InvalidParams",
            EngineError::EmptySentence => "EmptySentence",
            EngineError::UnknownWord(_) => "UnknownWord",
            EngineError::NoParse => "NoParse",
            EngineError::NoSuchTree { .. } => "NoSuchTree",
            EngineError::NotApplicable { .. } => "NotApplicable",
            EngineError::UnknownNode(_) => "UnknownNode",
            EngineError::NothingToUndo => "NothingToUndo",
            EngineError::Semantics(e) => match e {
                SemmapError::MissingMacro { .. } => "MissingMacro",
                SemmapError::IllTypedMacro { .. } => "IllTypedMacro",
                SemmapError::NoRecipe(_) => "NoRecipe",
                SemmapError::IllTyped { .. } => "IllTypedCombination",
                SemmapError::MissingDaughter(_) => "MissingDaughter",
            },
            EngineError::Storage(e) => match e {
                StorageError::TypeError(_) => "StoreTypeError",
                StorageError::NotRetrievable(_) => "NotRetrievable",
                StorageError::UnknownIndex(_) => "UnknownIndex",
                StorageError::FreeIndexRemaining { .. } => "FreeIndexRemaining",
                StorageError::Term(_) => "IllTyped",
                StorageError::Reduce(_) => "FuelExhausted",
            },
            EngineError::Reduce(e) => match e {
                ReduceError::NoRedex => "NoRedex",
                ReduceError::FuelExhausted { .. } => "FuelExhausted",
                ReduceError::Term(_) => "IllTyped",
            },
            EngineError::Translate(e) => match e {
                TranslateError::FreeReferent { .. } => "FreeReferent",
                TranslateError::NotReduced(_) => "NotReduced",
                TranslateError::UnknownSymbol(_) => "UnknownSymbol",
                TranslateError::NotFirstOrder(_) => "NotFirstOrder",
                TranslateError::Arity { .. } => "ArityMismatch",
            },
            EngineError::Type(_) => "IllTyped",
        }
    }
}

/// Opens sessions against a registry.
#[derive(Debug, Clone)]
pub struct Engine {
    pub registry: Registry,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            registry: Registry::bundled(),
        }
    }
}

impl Engine {
    pub fn new(registry: Registry) -> Self {
        Engine { registry }
    }

    /// Number of parses of `tokens` under `params`.
    pub fn parse_count(&self, tokens: &[String], params: &ParamSet) -> Result<usize, EngineError> {
        let m = self.registry.resolve(params)?;
        Ok(parse(tokens, &m.grammar, params.parser)?.len())
    }

    /// A session over the first parse of `tokens`.
    pub fn open_session(&self, tokens: &[String], params: &ParamSet) -> Result<DerivationSession, EngineError> {
        self.open_session_tree(tokens, params, 0)
    }

    pub fn open_session_tree(
        &self,
        tokens: &[String],
        params: &ParamSet,
        tree: usize,
    ) -> Result<DerivationSession, EngineError> {
        if tokens.is_empty() {
            return Err(EngineError::EmptySentence);
        }
        let modules = self.registry.resolve(params)?;
        let mut trees = parse(tokens, &modules.grammar, params.parser)?;
        let count = trees.len();
        if tree >= count {
            return Err(EngineError::NoSuchTree { index: tree, count });
        }
        let t = trees.swap_remove(tree);
        Ok(DerivationSession::new(tokens.to_vec(), modules, t, tree, count))
    }

    /// Rebuilds a session by replaying its log.
    pub fn replay(&self, log: &SessionLog) -> Result<DerivationSession, EngineError> {
        let mut s = self.open_session_tree(&log.sentence, &log.params, log.tree)?;
        s.id = log.id.clone();
        for e in &log.events {
            s.apply_step(e.node, e.action.clone())?;
        }
        Ok(s)
    }

    /// The session with its last step taken back.
    pub fn undo(&self, s: &DerivationSession) -> Result<DerivationSession, EngineError> {
        let mut log = s.log();
        if log.events.pop().is_none() {
            return Err(EngineError::NothingToUndo);
        }
        self.replay(&log)
    }

    /// Independent sessions on one sentence, one per parameter set.
    pub fn compare_sessions(
        &self,
        tokens: &[String],
        params: &[ParamSet],
    ) -> Result<Vec<Result<DerivationSession, EngineError>>, EngineError> {
        if tokens.is_empty() {
            return Err(EngineError::EmptySentence);
        }
        Ok(params.iter().map(|p| self.open_session(tokens, p)).collect())
    }
}
