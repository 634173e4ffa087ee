use semwork_core::engine::{Engine, ParamSet, StepAction};
use semwork_core::params::{FormalismId, MappingKind, StorageMode};
use semwork_core::syntax::tokenize;

fn corpus() -> Vec<Vec<String>> {
    include_str!("../data/corpus/sentences.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('%'))
        .map(tokenize)
        .collect()
}

fn all_params() -> Vec<ParamSet> {
    let mut out = Vec::new();
    for &formalism in FormalismId::ALL {
        for &storage in StorageMode::ALL {
            for &mapping in MappingKind::ALL {
                out.push(ParamSet {
                    formalism,
                    storage,
                    mapping,
                    ..ParamSet::default()
                });
            }
        }
    }
    out
}

#[test]
fn corpus_derives_everywhere() {
    let e = Engine::default();
    for toks in corpus() {
        for p in all_params() {
            let n = e.parse_count(&toks, &p).unwrap();
            for tree in 0..n {
                let mut s = e.open_session_tree(&toks, &p, tree).unwrap();
                s.apply_step(0, StepAction::ProcessFully)
                    .unwrap_or_else(|err| panic!("{toks:?} {p}: {err}"));
                assert!(s.is_complete(), "{toks:?} {p}");
                assert!(!s.final_terms().is_empty());
            }
        }
    }
}

/// Nested storage never leaves a store index behind; plain Cooper storage
/// does when a quantifier is stored inside another noun phrase.
#[test]
fn nested_storage_is_safe() {
    let e = Engine::default();
    let mut cooper_violations = 0;
    for toks in corpus() {
        for &f in FormalismId::ALL {
            for mode in [StorageMode::Cooper, StorageMode::Nested] {
                let p = ParamSet {
                    formalism: f,
                    storage: mode,
                    ..ParamSet::default()
                };
                let mut s = e.open_session(&toks, &p).unwrap();
                s.apply_step(0, StepAction::ProcessFully).unwrap();
                let root = s.root();
                assert!(root.readings.iter().all(|r| !r.contains_idx()));
                assert!(s.final_terms().iter().all(|r| !r.contains_idx()));
                match mode {
                    StorageMode::Nested => assert!(root.violations.is_empty(), "{toks:?} {f}"),
                    _ => cooper_violations += root.violations.len(),
                }
            }
        }
    }
    assert!(cooper_violations > 0);
}

#[test]
fn replay_is_exact_on_the_corpus() {
    let e = Engine::default();
    for (k, toks) in corpus().into_iter().enumerate() {
        for p in all_params().into_iter().skip(k % 3).step_by(3) {
            let mut s = e.open_session(&toks, &p).unwrap();
            s.id = format!("c{k}");
            // a few single steps first, so logs are not all one event long
            for _ in 0..5 {
                let next = s.nodes.iter().enumerate().rev().find_map(|(i, n)| {
                    n.applicable
                        .iter()
                        .find(|a| **a != StepAction::ProcessFully)
                        .map(|a| (i, a.clone()))
                });
                if let Some((i, a)) = next {
                    s.apply_step(i, a).unwrap();
                }
            }
            if s.root().applicable.contains(&StepAction::ProcessFully) {
                s.apply_step(0, StepAction::ProcessFully).unwrap();
            }
            if s.root().applicable.contains(&StepAction::TranslateToFol) {
                s.apply_step(0, StepAction::TranslateToFol).unwrap();
            }
            let json = serde_json::to_string(&s.log()).unwrap();
            let r = e.replay(&serde_json::from_str(&json).unwrap()).unwrap();
            assert_eq!(r.state_json(), s.state_json(), "{toks:?} {p}");
        }
    }
}
