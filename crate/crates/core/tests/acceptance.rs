//! One line per acceptance criterion, each timed against its budget. Runs
//! as a plain binary so the lines show up in `cargo test` output.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use semwork_core::drt::{equivalent, merge};
use semwork_core::engine::{Engine, ParamSet, Registry, StepAction, BUNDLED_COMPAT};
use semwork_core::gen::{DrsGen, TermGen};
use semwork_core::params::{FormalismId, MappingKind, ParserKind, StorageMode};
use semwork_core::reducer::{normalize, ReducerKind, DEFAULT_FUEL};
use semwork_core::syntax::{bundled_grammar, oracle, tokenize, Chart, IncrementalParser};
use semwork_core::term::{alpha_eq, compact, parse_term, type_of, Drs, Signature, Term};
use semwork_core::translate::{drs_to_fol, for_each_structure, CompiledDrs, CompiledFormula, Vocabulary};
use semwork_grapher::{bounds, layout, parse_desc, print_desc, render_svg, BoxKind, LayoutBox, Style};

type Check = Result<String, String>;

/// Name, check, and time budget in seconds.
type Criterion = (&'static str, fn() -> Check, Option<u64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn term(src: &str) -> Term {
    parse_term(src, &Signature::new()).unwrap()
}

fn corpus() -> Vec<Vec<String>> {
    include_str!("../data/corpus/sentences.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('%'))
        .map(tokenize)
        .collect()
}

fn with(formalism: FormalismId, storage: StorageMode) -> ParamSet {
    ParamSet {
        formalism,
        storage,
        ..ParamSet::default()
    }
}

fn finals(e: &Engine, sentence: &str, p: &ParamSet) -> Result<Vec<Term>, String> {
    let mut s = e.open_session(&tokenize(sentence), p).map_err(|x| x.to_string())?;
    s.apply_step(0, StepAction::ProcessFully).map_err(|x| x.to_string())?;
    Ok(s.final_terms())
}

fn anna_laughs() -> Check {
    let e = Engine::default();
    for (f, expect) in [
        (FormalismId::Il, "laugh(anna)"),
        (FormalismId::Ldrt, "drs([x], [eq(x, anna), laugh(x)])"),
    ] {
        let fin = finals(&e, "anna laughs", &with(f, StorageMode::None))?;
        ensure(fin.len() == 1 && alpha_eq(&fin[0], &term(expect)), || {
            format!("{f}: got {:?}", fin.iter().map(compact).collect::<Vec<_>>())
        })?;
    }
    Ok("IL and lambda-DRT finals as expected".into())
}

fn reducer_equivalence() -> Check {
    let n = 120;
    for seed in 0..n {
        let mut g = TermGen::new(seed);
        g.free_rate = 0.1;
        let t = g.any_term(6);
        let (a, _) = normalize(&t, ReducerKind::Substitution, DEFAULT_FUEL).map_err(|e| e.to_string())?;
        let (b, _) = normalize(&t, ReducerKind::Metavariable, DEFAULT_FUEL).map_err(|e| e.to_string())?;
        ensure(alpha_eq(&a, &b), || format!("seed {seed}: {a} vs {b}"))?;
        ensure(type_of(&a).ok() == type_of(&b).ok(), || {
            format!("seed {seed}: types differ")
        })?;
    }
    Ok(format!("{n} terms of depth 6"))
}

fn storage() -> Check {
    let e = Engine::default();
    for mode in [StorageMode::Cooper, StorageMode::Nested] {
        for &f in FormalismId::ALL {
            let fin = finals(&e, "every man loves a woman", &with(f, mode))?;
            ensure(fin.len() == 2, || format!("{f} {mode}: {} readings", fin.len()))?;
        }
    }
    let mut runs = 0;
    for toks in corpus() {
        for &f in FormalismId::ALL {
            let mut s = e
                .open_session(&toks, &with(f, StorageMode::Nested))
                .map_err(|x| x.to_string())?;
            s.apply_step(0, StepAction::ProcessFully).map_err(|x| x.to_string())?;
            let root = s.root();
            ensure(root.violations.is_empty(), || format!("{toks:?} {f}: store index left"))?;
            ensure(s.final_terms().iter().all(|t| !t.contains_idx()), || {
                format!("{toks:?} {f}")
            })?;
            runs += 1;
        }
    }
    Ok(format!(
        "2 readings in cooper and nested; {runs} nested corpus runs safe"
    ))
}

fn drs(src: &str) -> Drs {
    match term(src) {
        Term::Drs(d) => d,
        t => panic!("not a DRS: {t}"),
    }
}

fn all_models_agree(d: &Drs) -> Result<u64, String> {
    let voc = Vocabulary::of_term(&Term::Drs(d.clone())).map_err(|e| e.to_string())?;
    let f = drs_to_fol(d).map_err(|e| e.to_string())?;
    let cd = CompiledDrs::new(d, &voc).map_err(|e| e.to_string())?;
    let cf = CompiledFormula::new(&f, &voc).map_err(|e| e.to_string())?;
    let mut bad = None;
    let mut total = 0;
    for size in 1..=3 {
        total += for_each_structure(&voc, size, |s| {
            if cd.eval(s) != cf.eval(s) {
                bad = Some(s.to_model(&voc).to_string());
                return false;
            }
            true
        });
    }
    match bad {
        Some(m) => Err(format!("{} disagrees on {m}", Term::Drs(d.clone()))),
        None => Ok(total),
    }
}

fn translation() -> Check {
    let mut ds = vec![drs(
        "drs([], [implies(drs([x, y], [farmer(x), donkey(y), owns(x, y)]), drs([], [beats(x, y)]))])",
    )];
    let voc = Vocabulary::new(&[("p", 1), ("q", 1), ("r", 2)], &["c"]);
    ds.extend((0..24u64).map(|seed| DrsGen::new(seed, voc.clone()).drs(2)));
    let mut models = 0;
    for d in &ds {
        models += all_models_agree(d)?;
    }
    ensure(ds.len() >= 20, || "too few DRSs".into())?;
    Ok(format!("{} DRSs incl. donkey, {models} models up to size 3", ds.len()))
}

fn merge_algebra() -> Check {
    let voc = Vocabulary::new(&[("man", 1), ("walk", 1), ("see", 2)], &["anna"]);
    let mut g = DrsGen::new(7, voc);
    let ds: Vec<Drs> = (0..90).map(|i| g.drs(i % 3)).collect();
    let show = |d: &Drs| compact(&Term::Drs(d.clone()));
    let mut cases = 0;
    for (i, a) in ds.iter().enumerate() {
        let b = &ds[(i * 7 + 3) % ds.len()];
        let c = &ds[(i * 13 + 5) % ds.len()];
        for (x, y) in [(a, b), (b, c), (a, c)] {
            let (xy, yx) = (merge(x, y), merge(y, x));
            ensure(equivalent(&xy, &yx), || {
                format!("not commutative: {} vs {}", show(&xy), show(&yx))
            })?;
            ensure(xy.universe.len() == x.universe.len() + y.universe.len(), || {
                format!("universe not additive: {}", show(&xy))
            })?;
            cases += 1;
        }
        let (l, r) = (merge(&merge(a, b), c), merge(a, &merge(b, c)));
        ensure(equivalent(&l, &r), || {
            format!("not associative: {} vs {}", show(&l), show(&r))
        })?;
        ensure(equivalent(&merge(a, &Drs::empty()), a), || {
            format!("right identity: {}", show(a))
        })?;
        ensure(equivalent(&merge(&Drs::empty(), a), a), || {
            format!("left identity: {}", show(a))
        })?;
        cases += 1;
    }
    ensure(cases >= 200, || format!("only {cases} cases"))?;
    Ok(format!("{cases} pairs and triples"))
}

fn subtree(boxes: &[LayoutBox], prefix: &[usize]) -> Option<(f64, f64, f64, f64)> {
    // branch lines belong to the daughter they point at; leave them out
    let own: Vec<LayoutBox> = boxes
        .iter()
        .filter(|b| b.source.starts_with(prefix) && !(b.kind == BoxKind::Line && b.source == prefix))
        .cloned()
        .collect();
    bounds(&own)
}

fn grapher() -> Check {
    let src = r#"{tree {plain-text "S"} {plain-text "NP"} {plain-text "VP"}}"#;
    let d = parse_desc(src).map_err(|e| e.to_string())?;
    ensure(parse_desc(&print_desc(&d)).ok().as_ref() == Some(&d), || {
        "round trip differs".into()
    })?;
    let style = Style::default();
    let boxes = layout(&d, &style);
    let mother = subtree(&boxes, &[0]).ok_or("no mother box")?;
    let np = subtree(&boxes, &[1]).ok_or("no NP box")?;
    let vp = subtree(&boxes, &[2]).ok_or("no VP box")?;
    ensure(np.2 <= vp.0, || format!("daughters overlap: {np:?} {vp:?}"))?;
    let err = ((mother.0 + mother.2) / 2.0 - (np.0 + vp.2) / 2.0).abs();
    ensure(err <= 0.5, || format!("centering error {err}"))?;
    let a = render_svg(&layout(&d, &style), &style);
    let b = render_svg(&layout(&d, &style), &style);
    ensure(a == b, || "SVG differs between runs".into())?;
    Ok(format!("centering error {err:.3}, {} boxes, SVG stable", boxes.len()))
}

/// Reads the table text directly: `allow` lines over the same dimensions
/// form a group that must be matched, any matching `deny` line excludes.
fn excluded_by_table(p: &ParamSet) -> bool {
    let mut groups: std::collections::BTreeMap<Vec<String>, bool> = Default::default();
    for line in BUNDLED_COMPAT.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut words = line.split_whitespace();
        let verdict = words.next().unwrap();
        let conds: Vec<(String, String)> = words
            .map(|w| {
                let (k, v) = w.split_once('=').unwrap();
                (k.to_string(), v.to_string())
            })
            .collect();
        let hit = conds.iter().all(|(k, v)| p.value(k).as_deref() == Some(v.as_str()));
        if verdict == "deny" && hit {
            return true;
        }
        if verdict == "allow" {
            let mut dims: Vec<String> = conds.iter().map(|(k, _)| k.clone()).collect();
            dims.sort();
            *groups.entry(dims).or_default() |= hit;
        }
    }
    groups.values().any(|ok| !ok)
}

fn registry() -> Check {
    let r = Registry::bundled();
    let mut product = 0;
    let mut excluded = 0;
    for &formalism in FormalismId::ALL {
        for &reducer in ReducerKind::ALL {
            for &storage in StorageMode::ALL {
                for grammar in ["simple-psg", "feature-psg", "cg"] {
                    for &parser in ParserKind::ALL {
                        for &mapping in MappingKind::ALL {
                            let p = ParamSet {
                                formalism,
                                reducer,
                                storage,
                                grammar: grammar.into(),
                                parser,
                                mapping,
                                ..ParamSet::default()
                            };
                            product += 1;
                            excluded += usize::from(excluded_by_table(&p));
                        }
                    }
                }
            }
        }
    }
    let valid = r.enumerate_valid_params();
    let distinct: BTreeSet<String> = valid.iter().map(|p| p.to_string()).collect();
    ensure(product == r.product_size(), || {
        format!("product {product} vs {}", r.product_size())
    })?;
    ensure(distinct.len() == valid.len(), || "duplicates in enumeration".into())?;
    ensure(valid.len() == product - excluded, || {
        format!("{} enumerated, {product} - {excluded} expected", valid.len())
    })?;
    ensure(valid.len() >= 72, || format!("only {} valid", valid.len()))?;
    Ok(format!("{} valid of {product} ({excluded} excluded)", valid.len()))
}

fn parser() -> Check {
    let g = bundled_grammar("simple-psg").ok_or("no simple-psg")?;
    let max = 6;
    let lang = oracle::language(g, max);
    let reps: Vec<String> = g.word_classes().into_iter().map(|c| c[0].clone()).collect();
    // every class sequence up to `max`, one chart extended and shrunk word by word
    let mut chart = Chart::new(g);
    let mut stack: Vec<usize> = Vec::new();
    let mut checked = 0usize;
    let mut accepted = 0usize;
    let mut next = 0;
    loop {
        if next < reps.len() && stack.len() < max {
            chart.push(&reps[next]).map_err(|e| e.to_string())?;
            stack.push(next);
            checked += 1;
            let ok = chart.accepts();
            accepted += usize::from(ok);
            ensure(ok == lang.contains(&stack), || {
                format!("chart and recognizer differ on {stack:?}")
            })?;
            next = 0;
        } else {
            let Some(last) = stack.pop() else { break };
            chart.pop();
            next = last + 1;
        }
    }
    let expect: usize = (1..=max as u32).map(|k| reps.len().pow(k)).sum();
    ensure(checked == expect, || format!("checked {checked} of {expect}"))?;

    // categorial parser against the feature grammar chart, all strings up to 4
    let feature = bundled_grammar("feature-psg").ok_or("no feature-psg")?;
    let cg = bundled_grammar("cg").ok_or("no cg")?;
    let freps: Vec<String> = feature.word_classes().into_iter().map(|c| c[0].clone()).collect();
    let mut level: Vec<Vec<String>> = vec![Vec::new()];
    let mut cg_checked = 0;
    for _ in 0..4 {
        level = level
            .into_iter()
            .flat_map(|p| {
                freps.iter().map(move |w| {
                    let mut q = p.clone();
                    q.push(w.clone());
                    q
                })
            })
            .collect();
        for words in &level {
            let mut chart = Chart::new(feature);
            let mut inc = IncrementalParser::new(cg);
            for w in words {
                chart.push(w).map_err(|e| e.to_string())?;
                inc.push(w).map_err(|e| e.to_string())?;
            }
            ensure(inc.accepts() == chart.accepts(), || {
                format!("cg disagrees on {words:?}")
            })?;
            cg_checked += 1;
        }
    }
    for s in corpus() {
        let mut chart = Chart::new(feature);
        let mut inc = IncrementalParser::new(cg);
        for w in &s {
            chart.push(w).map_err(|e| e.to_string())?;
            inc.push(w).map_err(|e| e.to_string())?;
        }
        ensure(inc.accepts() == chart.accepts(), || format!("cg disagrees on {s:?}"))?;
        cg_checked += 1;
    }
    Ok(format!(
        "{checked} sequences ({accepted} accepted) up to length {max}; cg agrees on {cg_checked}"
    ))
}

fn replay() -> Check {
    let e = Engine::default();
    let mut runs = 0;
    for (k, toks) in corpus().into_iter().enumerate() {
        for &formalism in FormalismId::ALL {
            for &storage in StorageMode::ALL {
                let p = with(formalism, storage);
                let mut s = e.open_session(&toks, &p).map_err(|x| x.to_string())?;
                s.id = format!("a{k}");
                // some single steps bottom-up first
                for _ in 0..4 {
                    let next = s.nodes.iter().enumerate().rev().find_map(|(i, n)| {
                        n.applicable
                            .iter()
                            .find(|a| **a != StepAction::ProcessFully)
                            .map(|a| (i, a.clone()))
                    });
                    if let Some((i, a)) = next {
                        s.apply_step(i, a).map_err(|x| x.to_string())?;
                    }
                }
                for a in [StepAction::ProcessFully, StepAction::TranslateToFol] {
                    if s.root().applicable.contains(&a) {
                        s.apply_step(0, a).map_err(|x| x.to_string())?;
                    }
                }
                let json = serde_json::to_string(&s.log()).map_err(|x| x.to_string())?;
                let log = serde_json::from_str(&json).map_err(|x| x.to_string())?;
                let r = e.replay(&log).map_err(|x| x.to_string())?;
                ensure(r.state_json() == s.state_json(), || {
                    format!("{toks:?} {p}: state differs")
                })?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} sessions replayed"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("anna-laughs", anna_laughs, Some(1)),
        ("reducer-equivalence", reducer_equivalence, Some(10)),
        ("storage", storage, Some(5)),
        ("translation-oracle", translation, Some(30)),
        ("merge-algebra", merge_algebra, Some(5)),
        ("grapher", grapher, None),
        ("param-registry", registry, None),
        ("parser-oracle", parser, Some(60)),
        ("replay-determinism", replay, None),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let over = budget.is_some_and(|b| took > Duration::from_secs(b));
        let budget_text = budget.map_or(String::new(), |b| format!(" / {b}s"));
        let (mark, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if mark == "FAIL" {
            failed += 1;
        }
        println!("{mark} {name} [{:.2}s{budget_text}] {detail}", took.as_secs_f64());
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
