use semwork_core::params::{FormalismId, MappingKind, ParserKind};
use semwork_core::reducer::{normalize, ReducerKind, DEFAULT_FUEL};
use semwork_core::semmap::{bundled_lexicon, bundled_mapping, compose_tree};
use semwork_core::syntax::{bundled_grammar, oracle, parse, SynTree};
use semwork_core::term::{alpha_eq, compact, type_of, SemType, Term};

fn sentences(grammar: &str, max_len: usize) -> Vec<Vec<String>> {
    let g = bundled_grammar(grammar).unwrap();
    let reps: Vec<String> = g.word_classes().into_iter().map(|c| c[0].clone()).collect();
    oracle::language(g, max_len)
        .into_iter()
        .map(|s| s.into_iter().map(|c| reps[c].clone()).collect())
        .collect()
}

fn meaning(tree: &SynTree, f: FormalismId, m: MappingKind) -> Term {
    compose_tree(tree, f, bundled_lexicon(), bundled_mapping(m)).unwrap_or_else(|e| panic!("{f} {m}: {e}"))
}

fn nf(t: &Term) -> Term {
    normalize(t, ReducerKind::Substitution, DEFAULT_FUEL).unwrap().0
}

#[test]
fn every_word_annotates_in_every_formalism() {
    let lex = bundled_lexicon();
    for g in ["simple-psg", "feature-psg", "cg"] {
        for w in bundled_grammar(g).unwrap().words() {
            for &f in FormalismId::ALL {
                let t = lex.expand(w, f).unwrap_or_else(|e| panic!("{w} {f}: {e}"));
                assert!(type_of(&t).is_ok());
            }
        }
    }
}

#[test]
fn mappings_agree_on_phrase_structure_trees() {
    let mut trees = 0;
    for grammar in ["simple-psg", "feature-psg"] {
        let g = bundled_grammar(grammar).unwrap();
        for s in sentences(grammar, 6) {
            for tree in parse(&s, g, ParserKind::Chart).unwrap() {
                trees += 1;
                for &f in FormalismId::ALL {
                    let a = meaning(&tree, f, MappingKind::RuleToRule);
                    let b = meaning(&tree, f, MappingKind::Template);
                    assert!(alpha_eq(&a, &b), "{s:?} {f}: {} vs {}", compact(&a), compact(&b));
                    assert_eq!(type_of(&a).unwrap(), SemType::T);
                }
            }
        }
    }
    assert!(trees >= 65, "{trees}");
}

/// Composition in the categorial grammar is a different bracketing of the
/// same functions, so normal forms match the phrase structure ones.
#[test]
fn categorial_meanings_match_phrase_structure_meanings() {
    let psg = bundled_grammar("feature-psg").unwrap();
    let cg = bundled_grammar("cg").unwrap();
    let mut checked = 0;
    for s in sentences("feature-psg", 6) {
        let p = parse(&s, psg, ParserKind::Chart);
        let c = parse(&s, cg, ParserKind::Incremental);
        let (Ok(p), Ok(c)) = (p, c) else { continue };
        for &f in FormalismId::ALL {
            let mut pn: Vec<Term> = p.iter().map(|t| nf(&meaning(t, f, MappingKind::Template))).collect();
            let cn: Vec<Term> = c.iter().map(|t| nf(&meaning(t, f, MappingKind::Template))).collect();
            for x in &cn {
                let pos = pn.iter().position(|y| alpha_eq(x, y));
                assert!(pos.is_some(), "{s:?} {f}: {}", compact(x));
                pn.remove(pos.unwrap());
            }
            assert!(pn.is_empty(), "{s:?} {f}");
        }
        checked += 1;
    }
    assert!(checked >= 100, "{checked}");
}
