//! Parameter sets, the compatibility table and the registry that turns a
//! parameter set into the concrete grammar, lexicon and mapping a session
//! works with.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::datafile::FileError;
use crate::params::{FormalismId, MappingKind, ParserKind, ReducerKind, StorageMode};
use crate::semmap::{bundled_lexicon, bundled_mapping, Lexicon, MappingStrategy};
use crate::syntax::{bundled_grammars, Grammar};

/// Options that change only how structures are drawn.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct DisplayOptions {
    /// Draw a node's reduction trace as a column of terms.
    pub stack_reductions: bool,
    /// Node ids drawn with a frame around them.
    pub box_nodes: Vec<usize>,
}

impl DisplayOptions {
    /// Sets an option from its textual name and value.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), String> {
        match name {
            "stack-reductions" => {
                self.stack_reductions = value
                    .parse()
                    .map_err(|_| format!("stack-reductions takes true or false, not `{value}`"))?
            }
            "box-nodes" => {
                self.box_nodes = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse().map_err(|_| format!("bad node id `{s}`")))
                    .collect::<Result<_, _>>()?
            }
            _ => return Err(format!("unknown display option `{name}`")),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSet {
    pub formalism: FormalismId,
    pub reducer: ReducerKind,
    pub storage: StorageMode,
    pub grammar: String,
    pub parser: ParserKind,
    pub mapping: MappingKind,
    #[serde(default)]
    pub display: DisplayOptions,
}

impl Default for ParamSet {
    fn default() -> Self {
        ParamSet {
            formalism: FormalismId::Il,
            reducer: ReducerKind::Substitution,
            storage: StorageMode::None,
            grammar: "simple-psg".into(),
            parser: ParserKind::Chart,
            mapping: MappingKind::RuleToRule,
            display: DisplayOptions::default(),
        }
    }
}

/// Names of the core dimensions, in the order used everywhere.
pub const DIMENSIONS: [&str; 6] = ["formalism", "reducer", "storage", "grammar", "parser", "mapping"];

impl ParamSet {
    pub fn value(&self, dim: &str) -> Option<String> {
        Some(match dim {
            "formalism" => self.formalism.to_string(),
            "reducer" => self.reducer.to_string(),
            "storage" => self.storage.to_string(),
            "grammar" => self.grammar.clone(),
            "parser" => self.parser.to_string(),
            "mapping" => self.mapping.to_string(),
            _ => return None,
        })
    }

    /// Sets a core dimension from text.
    pub fn set(&mut self, dim: &str, value: &str) -> Result<(), String> {
        match dim {
            "formalism" => self.formalism = value.parse()?,
            "reducer" => self.reducer = value.parse()?,
            "storage" => self.storage = value.parse()?,
            "grammar" => self.grammar = value.to_string(),
            "parser" => self.parser = value.parse()?,
            "mapping" => self.mapping = value.parse()?,
            _ => return Err(format!("unknown parameter `{dim}`")),
        }
        Ok(())
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = DIMENSIONS
            .iter()
            .map(|d| format!("{d}={}", self.value(d).expect("known dimension")))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Allow,
    Deny,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatLine {
    pub verdict: Verdict,
    pub conditions: Vec<(String, String)>,
}

impl CompatLine {
    fn matches(&self, p: &ParamSet) -> bool {
        self.conditions
            .iter()
            .all(|(d, v)| p.value(d).as_deref() == Some(v.as_str()))
    }

    fn dims(&self) -> Vec<&str> {
        let mut d: Vec<&str> = self.conditions.iter().map(|(d, _)| d.as_str()).collect();
        d.sort_unstable();
        d
    }
}

impl fmt::Display for CompatLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Allow => "allow",
            Verdict::Deny => "deny",
        };
        let conds: Vec<String> = self.conditions.iter().map(|(d, v)| format!("{d}={v}")).collect();
        write!(f, "{verdict} {}", conds.join(" "))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Compatibility {
    pub lines: Vec<CompatLine>,
}

impl Compatibility {
    pub fn parse(src: &str) -> Result<Compatibility, FileError> {
        let mut lines = Vec::new();
        let mut offset = 0;
        for raw in src.split_inclusive('\n') {
            let at = offset;
            offset += raw.len();
            let line = raw.split('%').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let verdict = match words.next() {
                Some("allow") => Verdict::Allow,
                Some("deny") => Verdict::Deny,
                Some(w) => return Err(FileError::at(src, at, format!("expected allow or deny, found `{w}`"))),
                None => unreachable!(),
            };
            let mut conditions: Vec<(String, String)> = Vec::new();
            for w in words {
                let Some((d, v)) = w.split_once('=') else {
                    return Err(FileError::at(src, at, format!("expected dimension=value, found `{w}`")));
                };
                if !DIMENSIONS.contains(&d) {
                    return Err(FileError::at(src, at, format!("unknown dimension `{d}`")));
                }
                if conditions.iter().any(|(e, _)| e == d) {
                    return Err(FileError::at(src, at, format!("`{d}` given twice")));
                }
                conditions.push((d.to_string(), v.to_string()));
            }
            if conditions.is_empty() {
                return Err(FileError::at(src, at, "a line needs at least one condition"));
            }
            lines.push(CompatLine { verdict, conditions });
        }
        Ok(Compatibility { lines })
    }

    pub fn to_text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }

    /// `None` if `p` is allowed, otherwise the reason it is not.
    pub fn check(&self, p: &ParamSet) -> Option<String> {
        let mut groups: BTreeMap<Vec<&str>, Vec<&CompatLine>> = BTreeMap::new();
        for l in &self.lines {
            match l.verdict {
                Verdict::Deny if l.matches(p) => return Some(format!("combination excluded by `{l}`")),
                Verdict::Deny => {}
                Verdict::Allow => groups.entry(l.dims()).or_default().push(l),
            }
        }
        for (dims, group) in groups {
            if !group.iter().any(|l| l.matches(p)) {
                let vals: Vec<String> = dims
                    .iter()
                    .map(|d| format!("{d}={}", p.value(d).unwrap_or_default()))
                    .collect();
                return Some(format!("no `allow` line permits {}", vals.join(" ")));
            }
        }
        None
    }
}

/// The collaborators a session uses, fixed when it is opened.
#[derive(Debug, Clone)]
pub struct Modules {
    pub params: ParamSet,
    pub grammar: Arc<Grammar>,
    pub lexicon: Arc<Lexicon>,
    pub mapping: Arc<MappingStrategy>,
}

/// Registered values for every dimension and the table saying which
/// combinations are valid.
#[derive(Debug, Clone)]
pub struct Registry {
    pub formalisms: Vec<FormalismId>,
    pub reducers: Vec<ReducerKind>,
    pub storage: Vec<StorageMode>,
    pub grammars: Vec<Arc<Grammar>>,
    pub parsers: Vec<ParserKind>,
    pub mappings: Vec<Arc<MappingStrategy>>,
    pub lexicon: Arc<Lexicon>,
    pub compat: Compatibility,
}

pub const BUNDLED_COMPAT: &str = include_str!("../../data/config/compat.cfg");

impl Registry {
    /// Everything shipped with the library.
    pub fn bundled() -> Registry {
        Registry {
            formalisms: FormalismId::ALL.to_vec(),
            reducers: ReducerKind::ALL.to_vec(),
            storage: StorageMode::ALL.to_vec(),
            grammars: bundled_grammars().iter().cloned().map(Arc::new).collect(),
            parsers: ParserKind::ALL.to_vec(),
            mappings: MappingKind::ALL
                .iter()
                .map(|&k| Arc::new(bundled_mapping(k).clone()))
                .collect(),
            lexicon: Arc::new(bundled_lexicon().clone()),
            compat: Compatibility::parse(BUNDLED_COMPAT).expect("bundled compatibility table"),
        }
    }

    pub fn grammar(&self, id: &str) -> Option<&Arc<Grammar>> {
        self.grammars.iter().find(|g| g.id == id)
    }

    pub fn mapping(&self, kind: MappingKind) -> Option<&Arc<MappingStrategy>> {
        self.mappings.iter().find(|m| m.kind == kind)
    }

    /// Checks `p` against the registered values and the compatibility
    /// table.
    pub fn validate(&self, p: &ParamSet) -> Result<(), EngineError> {
        let invalid = |m: String| Err(EngineError::InvalidParams(m));
        if !self.formalisms.contains(&p.formalism) || !self.lexicon.supports(p.formalism) {
            return invalid(format!("formalism `{}` is not available", p.formalism));
        }
        if !self.reducers.contains(&p.reducer) {
            return invalid(format!("reducer `{}` is not available", p.reducer));
        }
        if !self.storage.contains(&p.storage) {
            return invalid(format!("storage `{}` is not available", p.storage));
        }
        if self.grammar(&p.grammar).is_none() {
            return invalid(format!("unknown grammar `{}`", p.grammar));
        }
        if !self.parsers.contains(&p.parser) {
            return invalid(format!("parser `{}` is not available", p.parser));
        }
        if self.mapping(p.mapping).is_none() {
            return invalid(format!("mapping `{}` is not available", p.mapping));
        }
        if let Some(reason) = self.compat.check(p) {
            return invalid(reason);
        }
        Ok(())
    }

    pub fn resolve(&self, p: &ParamSet) -> Result<Modules, EngineError> {
        self.validate(p)?;
        Ok(Modules {
            params: p.clone(),
            grammar: self.grammar(&p.grammar).expect("validated").clone(),
            lexicon: self.lexicon.clone(),
            mapping: self.mapping(p.mapping).expect("validated").clone(),
        })
    }

    /// Size of the full product of registered values.
    pub fn product_size(&self) -> usize {
        self.formalisms.len()
            * self.reducers.len()
            * self.storage.len()
            * self.grammars.len()
            * self.parsers.len()
            * self.mappings.len()
    }

    /// Every valid combination of core dimensions, display options left
    /// at their defaults, in registry order.
    pub fn enumerate_valid_params(&self) -> Vec<ParamSet> {
        let mut out = Vec::new();
        for &formalism in &self.formalisms {
            for &reducer in &self.reducers {
                for &storage in &self.storage {
                    for g in &self.grammars {
                        for &parser in &self.parsers {
                            for m in &self.mappings {
                                let p = ParamSet {
                                    formalism,
                                    reducer,
                                    storage,
                                    grammar: g.id.clone(),
                                    parser,
                                    mapping: m.kind,
                                    display: DisplayOptions::default(),
                                };
                                if self.validate(&p).is_ok() {
                                    out.push(p);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_count() {
        let r = Registry::bundled();
        assert_eq!(r.product_size(), 3 * 2 * 3 * 3 * 2 * 2);
        let valid = r.enumerate_valid_params();
        // grammar/parser/mapping: two phrase structure grammars with the
        // chart parser and either mapping, plus cg/incremental/template
        assert_eq!(valid.len(), 3 * 2 * 3 * (2 * 2 + 1));
        assert!(valid.iter().all(|p| r.validate(p).is_ok()));
    }

    #[test]
    fn no_grammars_no_params() {
        let mut r = Registry::bundled();
        r.grammars.clear();
        assert!(r.enumerate_valid_params().is_empty());
    }

    #[test]
    fn invalid_combinations() {
        let r = Registry::bundled();
        let p = ParamSet {
            parser: ParserKind::Incremental,
            ..ParamSet::default()
        };
        assert!(matches!(r.validate(&p), Err(EngineError::InvalidParams(_))));
        let p = ParamSet {
            grammar: "cg".into(),
            parser: ParserKind::Incremental,
            ..ParamSet::default()
        };
        assert!(matches!(r.validate(&p), Err(EngineError::InvalidParams(m)) if m.contains("deny")));
        let p = ParamSet {
            mapping: MappingKind::Template,
            ..p
        };
        assert!(r.validate(&p).is_ok());
    }

    #[test]
    fn table_round_trip() {
        let c = Compatibility::parse(BUNDLED_COMPAT).unwrap();
        assert_eq!(Compatibility::parse(&c.to_text()).unwrap(), c);
        assert!(Compatibility::parse("allow colour=red\n").is_err());
        assert!(Compatibility::parse("permit parser=chart\n").is_err());
    }
}
