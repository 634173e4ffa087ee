//! The batch commands, as functions from arguments to output text.

use std::fmt::Write;

use semwork_core::display::ToDesc;
use semwork_core::engine::{Engine, EngineError, ParamSet, StepAction};
use semwork_core::syntax::tokenize;
use semwork_core::term::{compact, parse_term, Signature, Term};
use semwork_core::translate::{drs_to_fol, eval_drs, eval_fol, FiniteModel};
use semwork_grapher::{layout, parse_desc, print_desc_pretty, render_ascii, render_svg, Style};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ReadingsChoice {
    #[default]
    All,
    First,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum DeriveOut {
    #[default]
    Text,
    Desc,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum RenderOut {
    #[default]
    Svg,
    Text,
}

#[derive(Debug, Clone, Default)]
pub struct DeriveOptions {
    pub params: ParamSet,
    pub readings: ReadingsChoice,
    pub out: DeriveOut,
    pub trace: bool,
    pub tree: usize,
}

/// Exit status for a failed derivation: 2 for a bad parameter set, 1 for
/// everything else.
pub fn exit_code(e: &EngineError) -> u8 {
    match e {
        EngineError::InvalidParams(_) => 2,
        _ => 1,
    }
}

/// Processes the sentence fully and prints its final meanings, one per line.
pub fn derive(engine: &Engine, sentence: &str, opts: &DeriveOptions) -> Result<String, EngineError> {
    let toks = tokenize(sentence);
    let mut s = engine.open_session_tree(&toks, &opts.params, opts.tree)?;
    s.apply_step(0, StepAction::ProcessFully)?;
    // pictures show the first-order translation too
    if opts.out != DeriveOut::Text && s.root().applicable.contains(&StepAction::TranslateToFol) {
        s.apply_step(0, StepAction::TranslateToFol)?;
    }
    let mut finals: Vec<Term> = s.final_terms();
    if opts.readings == ReadingsChoice::First {
        finals.truncate(1);
    }
    let mut out = String::new();
    match opts.out {
        DeriveOut::Text => {
            if opts.trace {
                for n in s.tree.nodes() {
                    let st = &s.nodes[n.id];
                    let Some(start) = &st.trace_start else { continue };
                    let _ = writeln!(out, "% node {} {}: {}", n.id, n.label(), compact(start));
                    for step in &st.trace {
                        let _ = writeln!(
                            out,
                            "%   {} at {:?}: {}",
                            step.rule.name(),
                            step.path,
                            compact(&step.term)
                        );
                    }
                }
            }
            for t in &finals {
                let _ = writeln!(out, "{}", compact(t));
            }
        }
        DeriveOut::Desc | DeriveOut::Svg => {
            let mut display = opts.params.display.clone();
            display.stack_reductions |= opts.trace;
            let d = s.to_desc(&display);
            if opts.out == DeriveOut::Desc {
                out = print_desc_pretty(&d);
                out.push('\n');
            } else {
                let style = Style::default();
                out = render_svg(&layout(&d, &style), &style);
            }
        }
    }
    Ok(out)
}

/// Lays out a description string and renders it.
pub fn render(src: &str, out: RenderOut) -> Result<String, String> {
    let d = parse_desc(src).map_err(|e| e.to_string())?;
    let style = Style::default();
    let boxes = layout(&d, &style);
    Ok(match out {
        RenderOut::Svg => render_svg(&boxes, &style),
        RenderOut::Text => render_ascii(&boxes, &style),
    })
}

/// Translates a DRS given as text. With a model, also prints the truth
/// value of the DRS and of its translation there.
pub fn translate(src: &str, model: Option<&str>) -> Result<String, String> {
    let t = parse_term(src.trim(), &Signature::new()).map_err(|e| e.to_string())?;
    let Term::Drs(d) = &t else {
        return Err(format!("not a DRS: {}", compact(&t)));
    };
    let f = drs_to_fol(d).map_err(|e| e.to_string())?;
    let mut out = format!("{}\n", compact(&f));
    if let Some(m) = model {
        let m = FiniteModel::parse(m).map_err(|e| e.to_string())?;
        let a = eval_drs(d, &m).map_err(|e| e.to_string())?;
        let b = eval_fol(&f, &m).map_err(|e| e.to_string())?;
        let _ = writeln!(out, "% drs: {a}\n% fol: {b}");
    }
    Ok(out)
}

/// Every valid core parameter combination, one per line.
pub fn params_list(engine: &Engine) -> String {
    let mut out = String::new();
    for p in engine.registry.enumerate_valid_params() {
        let _ = writeln!(out, "{p}");
    }
    out
}
