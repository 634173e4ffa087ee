//! Parameter values shared across modules. Only the engine combines them
//! into a parameter set; other modules receive the single value they need.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! param_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                let lower = s.to_ascii_lowercase();
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.name().eq_ignore_ascii_case(&lower))
                    .ok_or_else(|| format!("unknown {} `{s}`", stringify!($name)))
            }
        }
    };
}

param_enum! {
    /// Target semantic formalism.
    FormalismId {
        Il => "il",
        Lgq => "lgq",
        Ldrt => "ldrt",
    }
}

param_enum! {
    /// How a beta redex is contracted: capture-avoiding substitution with
    /// renaming on demand, or copying the abstraction with fresh
    /// metavariables that are bound in an environment and resolved when
    /// the body is read out.
    ReducerKind {
        Substitution => "substitution",
        Metavariable => "metavariable",
    }
}

param_enum! {
    /// Quantifier storage regime.
    StorageMode {
        None => "none",
        Cooper => "cooper",
        Nested => "nested-cooper",
    }
}

param_enum! {
    /// Syntax-semantics mapping strategy.
    MappingKind {
        RuleToRule => "rule-to-rule",
        Template => "template",
    }
}

impl FormalismId {
    /// Intensional Logic wraps scope abstractions in `up`.
    pub fn is_intensional(self) -> bool {
        self == FormalismId::Il
    }
}

param_enum! {
    /// Parsing algorithm.
    ParserKind {
        Chart => "chart",
        Incremental => "incremental",
    }
}
