//! From syntax trees to unreduced meanings: lexical macros give the leaves
//! their meanings, a mapping strategy says how daughters combine.

pub mod lexicon;
pub mod mapping;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

pub use lexicon::{Entry, Lexicon, Macro};
pub use mapping::{Key, MappingStrategy, Pattern, Recipe, RecipeLine};

use crate::params::{FormalismId, MappingKind};
use crate::syntax::SynTree;
use crate::term::{type_of, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemmapError {
    #[error("no {formalism} macro for `{word}`")]
    MissingMacro { word: String, formalism: FormalismId },
    #[error("macro for `{word}` is ill-typed: {reason}")]
    IllTypedMacro {
        word: String,
        path: Vec<usize>,
        reason: String,
    },
    #[error("no recipe for `{0}`")]
    NoRecipe(String),
    #[error("combination at node {node} is ill-typed: {reason}")]
    IllTyped { node: usize, reason: String },
    #[error("node {0} has a daughter without a meaning")]
    MissingDaughter(usize),
}

/// Meanings of every leaf of `tree`, keyed by node id.
pub fn annotate_leaves(
    tree: &SynTree,
    formalism: FormalismId,
    lexicon: &Lexicon,
) -> Result<BTreeMap<usize, Term>, SemmapError> {
    let mut out = BTreeMap::new();
    for n in tree.nodes() {
        if let Some(w) = n.word() {
            out.insert(n.id, lexicon.expand(w, formalism)?);
        }
    }
    Ok(out)
}

/// The unreduced combination of the daughters' meanings at `node`.
pub fn combine(
    node: &SynTree,
    kids: &[Term],
    strategy: &MappingStrategy,
    formalism: FormalismId,
) -> Result<Term, SemmapError> {
    let recipe = strategy.recipe_for(node, formalism)?;
    let ill = |e: crate::term::TermError| SemmapError::IllTyped {
        node: node.id,
        reason: e.to_string(),
    };
    let t = recipe.build(kids).map_err(ill)?;
    type_of(&t).map_err(ill)?;
    Ok(t)
}

/// Meaning of the whole tree without any reduction.
pub fn compose_tree(
    tree: &SynTree,
    formalism: FormalismId,
    lexicon: &Lexicon,
    strategy: &MappingStrategy,
) -> Result<Term, SemmapError> {
    if let Some(w) = tree.word() {
        return lexicon.expand(w, formalism);
    }
    let kids = tree
        .children
        .iter()
        .map(|c| compose_tree(c, formalism, lexicon, strategy))
        .collect::<Result<Vec<_>, _>>()?;
    combine(tree, &kids, strategy, formalism)
}

pub fn bundled_lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| Lexicon::parse(include_str!("../../data/lexicons/fragment.lex")).expect("bundled lexicon"))
}

pub fn bundled_mapping(kind: MappingKind) -> &'static MappingStrategy {
    static R2R: OnceLock<MappingStrategy> = OnceLock::new();
    static TPL: OnceLock<MappingStrategy> = OnceLock::new();
    let (cell, src) = match kind {
        MappingKind::RuleToRule => (&R2R, include_str!("../../data/mappings/rule-to-rule.map")),
        MappingKind::Template => (&TPL, include_str!("../../data/mappings/template.map")),
    };
    cell.get_or_init(|| {
        let m = MappingStrategy::parse(src).expect("bundled mapping");
        assert_eq!(m.kind, kind, "bundled mapping file declares the wrong kind");
        m
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParserKind;
    use crate::reducer::{normalize, ReducerKind, DEFAULT_FUEL};
    use crate::syntax::{bundled_grammar, parse, tokenize};
    use crate::term::{alpha_eq, parse_term, Signature};

    fn term(src: &str) -> Term {
        parse_term(src, &Signature::new()).unwrap()
    }

    #[test]
    fn leaf_examples() {
        let lex = bundled_lexicon();
        let anna = lex.expand("anna", FormalismId::Il).unwrap();
        assert!(alpha_eq(&anna, &term("lam(P:<s,<e,t>>, app(down(P), anna:e))")));
        assert_eq!(type_of(&anna).unwrap().to_string(), "<<s,<e,t>>,t>");
        let anna = lex.expand("anna", FormalismId::Ldrt).unwrap();
        assert!(alpha_eq(
            &anna,
            &term("lam(P:<e,t>, merge(drs([x], [eq(x, anna:e)]), P(x)))")
        ));
        let laughs = lex.expand("laughs", FormalismId::Lgq).unwrap();
        assert!(alpha_eq(&laughs, &term("lam(x:e, laugh:<e,t>(x))")));
        assert_eq!(
            lex.expand("frog", FormalismId::Il),
            Err(SemmapError::MissingMacro {
                word: "frog".into(),
                formalism: FormalismId::Il
            })
        );
    }

    #[test]
    fn lexicon_round_trip() {
        let lex = bundled_lexicon();
        let again = Lexicon::parse(&lex.to_text()).unwrap();
        assert_eq!(&again, lex);
        assert_eq!(lex.formalisms(), FormalismId::ALL.to_vec());
    }

    #[test]
    fn mapping_round_trip() {
        for &k in MappingKind::ALL {
            let m = bundled_mapping(k);
            assert_eq!(&MappingStrategy::parse(&m.to_text()).unwrap(), m);
        }
    }

    #[test]
    fn sentence_rule_directions() {
        let g = bundled_grammar("simple-psg").unwrap();
        let tree = &parse(&tokenize("anna laughs"), g, ParserKind::Chart).unwrap()[0];
        let lex = bundled_lexicon();
        let r2r = bundled_mapping(MappingKind::RuleToRule);
        let kids = |f| {
            tree.children
                .iter()
                .map(|c| lex.expand(c.word().unwrap(), f).unwrap())
                .collect::<Vec<_>>()
        };
        let il = combine(tree, &kids(FormalismId::Il), r2r, FormalismId::Il).unwrap();
        let k = kids(FormalismId::Il);
        assert_eq!(il, Term::app(k[0].clone(), Term::up(k[1].clone())));
        let lgq = combine(tree, &kids(FormalismId::Lgq), r2r, FormalismId::Lgq).unwrap();
        let k = kids(FormalismId::Lgq);
        assert_eq!(lgq, Term::app(k[0].clone(), k[1].clone()));

        let (nf, _) = normalize(&il, ReducerKind::Substitution, DEFAULT_FUEL).unwrap();
        assert!(alpha_eq(&nf, &term("laugh:<e,t>(anna:e)")));
    }

    #[test]
    fn missing_recipe() {
        let g = bundled_grammar("simple-psg").unwrap();
        let tree = &parse(&tokenize("anna laughs"), g, ParserKind::Chart).unwrap()[0];
        let empty = MappingStrategy::parse("mapping rule-to-rule.\n").unwrap();
        let lex = bundled_lexicon();
        let err = compose_tree(tree, FormalismId::Lgq, lex, &empty).unwrap_err();
        assert_eq!(err, SemmapError::NoRecipe("s".into()));
    }

    #[test]
    fn bad_files() {
        assert!(MappingStrategy::parse("mapping template.\ntemplate s --> np vp : app(d1, d1).\n").is_err());
        assert!(
            MappingStrategy::parse("mapping rule-to-rule.\nrecipe s : app(d1, d2).\nrecipe s : app(d2, d1).\n")
                .is_err()
        );
        assert!(Lexicon::parse("lexicon l.\nmacro m(A:e) for lgq : lam(x:e, var(y:e)).\n").is_err());
        assert!(Lexicon::parse("lexicon l.\nentry w : nothing.\n").is_err());
    }
}
