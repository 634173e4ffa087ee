use semwork_core::engine::{Engine, EngineError, ParamSet, Phase, StepAction};
use semwork_core::params::{FormalismId, ParserKind, StorageMode};
use semwork_core::reducer::{normalize, replay as replay_trace, ReducerKind, DEFAULT_FUEL};
use semwork_core::semmap::{bundled_lexicon, bundled_mapping, compose_tree};
use semwork_core::syntax::{bundled_grammar, oracle, tokenize};
use semwork_core::term::{alpha_eq, compact, parse_term, type_of, SemType, Signature};

fn params(f: FormalismId, storage: StorageMode) -> ParamSet {
    ParamSet {
        formalism: f,
        storage,
        ..ParamSet::default()
    }
}

fn sentences(max_len: usize) -> Vec<Vec<String>> {
    let g = bundled_grammar("simple-psg").unwrap();
    let reps: Vec<String> = g.word_classes().into_iter().map(|c| c[0].clone()).collect();
    oracle::language(g, max_len)
        .into_iter()
        .map(|s| s.into_iter().map(|c| reps[c].clone()).collect())
        .collect()
}

fn term(src: &str) -> semwork_core::term::Term {
    parse_term(src, &Signature::new()).unwrap()
}

#[test]
fn proper_name_sentence_in_each_formalism() {
    let e = Engine::default();
    let toks = tokenize("Anna laughs.");
    let mut s = e
        .open_session(&toks, &params(FormalismId::Il, StorageMode::None))
        .unwrap();
    assert_eq!(s.root().applicable, vec![StepAction::ProcessFully]);
    s.apply_step(0, StepAction::ProcessFully).unwrap();
    let fin = s.final_terms();
    assert_eq!(fin.len(), 1);
    assert!(alpha_eq(&fin[0], &term("laugh(anna)")), "{}", compact(&fin[0]));

    let mut s = e
        .open_session(&toks, &params(FormalismId::Ldrt, StorageMode::None))
        .unwrap();
    s.apply_step(0, StepAction::ProcessFully).unwrap();
    let fin = s.final_terms();
    assert!(
        alpha_eq(&fin[0], &term("drs([x], [eq(x, anna), laugh(x)])")),
        "{}",
        compact(&fin[0])
    );
    assert!(s.root().applicable.contains(&StepAction::TranslateToFol));
    let r = s.apply_step(0, StepAction::TranslateToFol).unwrap();
    assert!(alpha_eq(
        r.fol.as_ref().unwrap(),
        &term("exists(x, and(eq(x, anna), laugh(x)))")
    ));
}

#[test]
fn rejections() {
    let e = Engine::default();
    let toks = tokenize("anna laughs");
    let mut s = e.open_session(&toks, &ParamSet::default()).unwrap();
    let err = s.apply_step(0, StepAction::Beta).unwrap_err();
    assert_eq!(err.code(), "NotApplicable");
    assert!(matches!(
        s.apply_step(99, StepAction::Annotate),
        Err(EngineError::UnknownNode(99))
    ));

    let p = ParamSet {
        parser: ParserKind::Incremental,
        ..ParamSet::default()
    };
    assert_eq!(e.open_session(&toks, &p).unwrap_err().code(), "InvalidParams");
    assert_eq!(
        e.open_session(&tokenize("colorless ideas"), &ParamSet::default())
            .unwrap_err()
            .code(),
        "UnknownWord"
    );
    assert_eq!(
        e.open_session(&[], &ParamSet::default()).unwrap_err().code(),
        "EmptySentence"
    );
    assert_eq!(
        e.open_session(&tokenize("laughs anna"), &ParamSet::default())
            .unwrap_err()
            .code(),
        "NoParse"
    );
    assert_eq!(
        e.open_session_tree(&toks, &ParamSet::default(), 3).unwrap_err().code(),
        "NoSuchTree"
    );
    assert_eq!(e.undo(&s).unwrap_err().code(), "NothingToUndo");
}

#[test]
fn scope_ambiguity_under_storage() {
    let e = Engine::default();
    let toks = tokenize("every man loves a woman");
    for &f in FormalismId::ALL {
        let mut s = e.open_session(&toks, &params(f, StorageMode::None)).unwrap();
        s.apply_step(0, StepAction::ProcessFully).unwrap();
        assert_eq!(s.final_terms().len(), 1, "{f}");
        for mode in [StorageMode::Cooper, StorageMode::Nested] {
            let mut s = e.open_session(&toks, &params(f, mode)).unwrap();
            s.apply_step(0, StepAction::ProcessFully).unwrap();
            let fin = s.final_terms();
            assert_eq!(fin.len(), 2, "{f} {mode}");
            assert!(fin.iter().all(|t| !t.contains_idx()));
            assert!(alpha_eq(&fin[0], &s.root().current.as_ref().unwrap().body));
        }
    }
}

#[test]
fn manual_storage_steps() {
    let e = Engine::default();
    let toks = tokenize("every man loves a woman");
    let mut s = e
        .open_session(&toks, &params(FormalismId::Lgq, StorageMode::Cooper))
        .unwrap();
    // finish both noun phrases, store them, then finish the rest by hand
    let nps: Vec<usize> = s
        .tree
        .nodes()
        .iter()
        .filter(|n| n.label() == "np")
        .map(|n| n.id)
        .collect();
    assert_eq!(nps.len(), 2);
    for &np in &nps {
        s.apply_step(np, StepAction::ProcessFully).unwrap();
        let next = s
            .node(np)
            .unwrap()
            .applicable
            .iter()
            .find(|a| matches!(a, StepAction::Store(_)))
            .cloned();
        s.apply_step(np, next.unwrap()).unwrap();
    }
    // both indices are taken
    let tops: Vec<StepAction> = s.node(nps[0]).unwrap().applicable.clone();
    assert!(!tops.iter().any(|a| matches!(a, StepAction::Store(_))));
    let manual = |a: &&StepAction| matches!(a, StepAction::Annotate | StepAction::Combine | StepAction::Beta);
    while let Some((id, a)) = s
        .nodes
        .iter()
        .enumerate()
        .rev()
        .find_map(|(i, n)| n.applicable.iter().find(manual).map(|a| (i, a.clone())))
    {
        s.apply_step(id, a).unwrap();
    }
    let root = s.root();
    assert_eq!(root.phase, Phase::Final);
    assert!(root.applicable.contains(&StepAction::Retrieve(1)));
    assert!(root.applicable.contains(&StepAction::Retrieve(2)));
    s.apply_step(0, StepAction::Retrieve(2)).unwrap();
    while s.root().phase != Phase::Final {
        s.apply_step(0, StepAction::Beta).unwrap();
    }
    // process-fully here would discharge what is left in one go
    assert!(s.root().applicable.contains(&StepAction::ProcessFully));
    s.apply_step(0, StepAction::Retrieve(1)).unwrap();
    while s.root().phase != Phase::Final {
        s.apply_step(0, StepAction::Beta).unwrap();
    }
    let fin = s.final_terms();
    assert_eq!(fin.len(), 1);
    // a woman was retrieved first, so every man ends up with wide scope
    assert!(
        alpha_eq(
            &fin[0],
            &term("app(every:<<e,t>,<<e,t>,t>>(man), lam(x, app(a:<<e,t>,<<e,t>,t>>(woman), lam(y, love(x, y)))))")
        ),
        "{}",
        compact(&fin[0])
    );
}

/// Every action the session offers succeeds at every state reached on a
/// walk through the corpus, and nothing else is accepted.
#[test]
fn applicable_sets_are_exact() {
    let e = Engine::default();
    let all = |n: u32| {
        let mut v = vec![
            StepAction::Annotate,
            StepAction::Combine,
            StepAction::Beta,
            StepAction::Cancel,
            StepAction::Merge,
            StepAction::ProcessFully,
            StepAction::TranslateToFol,
        ];
        for i in 1..=n {
            v.push(StepAction::Store(i));
            v.push(StepAction::Retrieve(i));
        }
        v
    };
    let mut states = 0;
    for (k, toks) in sentences(5).into_iter().enumerate() {
        let f = FormalismId::ALL[k % 3];
        let mode = [StorageMode::None, StorageMode::Cooper, StorageMode::Nested][(k / 3) % 3];
        let mut s = e.open_session(&toks, &params(f, mode)).unwrap();
        // walk bottom-up taking the first non-wholesale action each time
        for _ in 0..400 {
            states += 1;
            for id in 0..s.nodes.len() {
                for a in all(4) {
                    let ok = s.clone().apply_step(id, a.clone()).is_ok();
                    let offered = s.nodes[id].applicable.contains(&a);
                    assert_eq!(ok, offered, "{toks:?} {f} {mode} node {id} {a}");
                }
            }
            let next = s.nodes.iter().enumerate().rev().find_map(|(i, n)| {
                n.applicable
                    .iter()
                    .find(|a| **a != StepAction::ProcessFully)
                    .map(|a| (i, a.clone()))
            });
            match next {
                Some((i, a)) => {
                    s.apply_step(i, a).unwrap();
                }
                None if s.root().applicable.contains(&StepAction::ProcessFully) => {
                    s.apply_step(0, StepAction::ProcessFully).unwrap();
                }
                None => break,
            }
        }
        assert!(s.is_complete(), "{toks:?}");
    }
    assert!(states >= 150, "{states}");
}

/// Doing it by hand ends where process-fully ends, without storage.
#[test]
fn single_steps_reach_the_process_fully_result() {
    let e = Engine::default();
    let lex = bundled_lexicon();
    for toks in sentences(5) {
        for &f in FormalismId::ALL {
            let p = params(f, StorageMode::None);
            let mut whole = e.open_session(&toks, &p).unwrap();
            whole.apply_step(0, StepAction::ProcessFully).unwrap();
            let mut manual = e.open_session(&toks, &p).unwrap();
            while let Some((i, a)) = manual.nodes.iter().enumerate().find_map(|(i, n)| {
                n.applicable
                    .iter()
                    .find(|a| !matches!(a, StepAction::ProcessFully | StepAction::TranslateToFol))
                    .map(|a| (i, a.clone()))
            }) {
                manual.apply_step(i, a).unwrap();
            }
            let (a, b) = (&whole.final_terms()[0], &manual.final_terms()[0]);
            assert!(alpha_eq(a, b), "{toks:?} {f}");
            // and both agree with composing the tree in one go
            let direct = compose_tree(&whole.tree, f, lex, bundled_mapping(p.mapping)).unwrap();
            let nf = normalize(&direct, ReducerKind::Substitution, DEFAULT_FUEL).unwrap().0;
            assert!(alpha_eq(a, &nf), "{toks:?} {f}");
            assert_eq!(type_of(a).unwrap(), SemType::T);
            for n in &whole.nodes {
                let start = n.trace_start.as_ref().unwrap();
                assert!(replay_trace(start, &n.trace, p.reducer));
            }
        }
    }
}

#[test]
fn replay_reproduces_state_exactly() {
    let e = Engine::default();
    for (k, toks) in sentences(5).into_iter().enumerate().step_by(4) {
        let p = params(
            FormalismId::ALL[k % 3],
            [StorageMode::Cooper, StorageMode::Nested][k % 2],
        );
        let mut s = e.open_session(&toks, &p).unwrap();
        s.id = format!("s{k}");
        let mut n = 0;
        while let Some((i, a)) = s
            .nodes
            .iter()
            .enumerate()
            .rev()
            .find_map(|(i, n)| n.applicable.first().map(|a| (i, a.clone())))
        {
            s.apply_step(i, a).unwrap();
            n += 1;
            if n > 300 {
                break;
            }
        }
        let log = s.log();
        let json = serde_json::to_string(&log).unwrap();
        let back = serde_json::from_str(&json).unwrap();
        assert_eq!(log, back);
        let r = e.replay(&back).unwrap();
        assert_eq!(r.state_json(), s.state_json());
    }
}

#[test]
fn undo_restores_previous_state() {
    let e = Engine::default();
    let toks = tokenize("every man who loves anna laughs");
    let mut s = e
        .open_session(&toks, &params(FormalismId::Ldrt, StorageMode::Cooper))
        .unwrap();
    let mut history = vec![s.state_json()];
    while let Some((i, a)) = s
        .nodes
        .iter()
        .enumerate()
        .rev()
        .find_map(|(i, n)| n.applicable.first().map(|a| (i, a.clone())))
    {
        s.apply_step(i, a).unwrap();
        history.push(s.state_json());
    }
    history.pop();
    while let Some(prev) = history.pop() {
        s = e.undo(&s).unwrap();
        assert_eq!(s.state_json(), prev);
    }
    assert!(s.events.is_empty());
}

#[test]
fn compare_runs_independent_sessions() {
    let e = Engine::default();
    let toks = tokenize("every man loves a woman");
    let bad = ParamSet {
        grammar: "cg".into(),
        ..ParamSet::default()
    };
    let ps = vec![
        params(FormalismId::Il, StorageMode::Cooper),
        params(FormalismId::Ldrt, StorageMode::None),
        bad,
    ];
    let out = e.compare_sessions(&toks, &ps).unwrap();
    assert_eq!(out.len(), 3);
    let mut a = out[0].clone().unwrap();
    let b = out[1].clone().unwrap();
    a.apply_step(0, StepAction::ProcessFully).unwrap();
    assert_eq!(a.final_terms().len(), 2);
    assert!(b.events.is_empty());
    assert_eq!(out[2].as_ref().unwrap_err().code(), "InvalidParams");
    assert!(e.compare_sessions(&[], &ps).is_err());
}

#[test]
fn actions_print_and_parse() {
    for a in [
        StepAction::Annotate,
        StepAction::Store(3),
        StepAction::Retrieve(12),
        StepAction::ProcessFully,
        StepAction::TranslateToFol,
    ] {
        assert_eq!(a.to_string().parse::<StepAction>().unwrap(), a);
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<StepAction>(&j).unwrap(), a);
    }
    assert!("store(x)".parse::<StepAction>().is_err());
    assert!("fly".parse::<StepAction>().is_err());
}

#[test]
fn one_beta_step_grows_the_trace_by_one() {
    let e = Engine::default();
    let mut s = e.open_session(&tokenize("anna laughs"), &ParamSet::default()).unwrap();
    for id in [1, 2] {
        s.apply_step(id, StepAction::ProcessFully).unwrap();
    }
    s.apply_step(0, StepAction::Combine).unwrap();
    assert_eq!(s.root().phase, Phase::Combined);
    assert!(s.root().trace.is_empty());
    let r = s.apply_step(0, StepAction::Beta).unwrap();
    assert_eq!(r.steps.len(), 1);
    assert_eq!(s.root().trace.len(), 1);
    assert_ne!(r.before, r.after);
}

#[test]
fn compare_across_formalisms_and_repeats() {
    let e = Engine::default();
    let toks = tokenize("anna laughs");
    let ps = vec![
        params(FormalismId::Il, StorageMode::None),
        params(FormalismId::Ldrt, StorageMode::None),
        params(FormalismId::Il, StorageMode::None),
    ];
    let mut finals = Vec::new();
    for s in e.compare_sessions(&toks, &ps).unwrap() {
        let mut s = s.unwrap();
        s.apply_step(0, StepAction::ProcessFully).unwrap();
        finals.push(s.final_terms()[0].clone());
    }
    assert!(alpha_eq(&finals[0], &term("laugh(anna)")));
    assert!(alpha_eq(&finals[1], &term("drs([x], [eq(x, anna), laugh(x)])")));
    assert_eq!(finals[0], finals[2]);
}
