use std::process::{Command, Output};

fn semwork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semwork")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn derive_prints_final_terms() {
    let o = semwork(&["derive", "anna laughs", "--formalism", "il", "--out", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "laugh(anna)\n");

    let o = semwork(&["derive", "Anna laughs.", "--formalism", "ldrt"]);
    assert_eq!(stdout(&o), "drs([x],[eq(x,anna),laugh(x)])\n");

    let o = semwork(&[
        "derive",
        "every man loves a woman",
        "--formalism",
        "lgq",
        "--storage",
        "cooper",
        "--readings",
        "all",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("every(man"), "{lines:?}");
    let o = semwork(&[
        "derive",
        "every man loves a woman",
        "--formalism",
        "lgq",
        "--storage",
        "cooper",
        "--readings",
        "first",
    ]);
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn exit_codes() {
    let o = semwork(&["derive", "anna"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NoParse"));
    assert_eq!(semwork(&["derive", "colorless ideas"]).status.code(), Some(1));
    let o = semwork(&["derive", "anna laughs", "--parser", "incremental"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("InvalidParams"));
    assert_eq!(
        semwork(&["derive", "anna laughs", "--formalism", "montague"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn categorial_grammar_picks_its_parser() {
    let o = semwork(&["derive", "anna laughs", "--grammar", "cg", "--mapping", "template"]);
    assert_eq!(stdout(&o), "laugh(anna)\n");
}

#[test]
fn pictures_and_traces() {
    let o = semwork(&["derive", "anna laughs", "--out", "desc"]);
    let desc = stdout(&o);
    assert!(desc.starts_with("{tree"));
    let svg = stdout(&semwork(&["derive", "anna laughs", "--out", "svg", "--box-nodes", "0"]));
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("<rect"));
    assert_eq!(
        svg,
        stdout(&semwork(&["derive", "anna laughs", "--out", "svg", "--box-nodes", "0"]))
    );
    let t = stdout(&semwork(&["derive", "anna laughs", "--trace"]));
    assert!(t.contains("cancel at"));
    assert!(t.ends_with("laugh(anna)\n"));
}

#[test]
fn render_translate_and_params() {
    let dir = std::env::temp_dir().join(format!("semwork-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let desc = dir.join("t.desc");
    std::fs::write(&desc, r#"{tree {plain-text "S"} {plain-text "NP"} {plain-text "VP"}}"#).unwrap();
    let svg = stdout(&semwork(&["render", desc.to_str().unwrap(), "--out", "svg"]));
    assert_eq!(svg.matches("<text").count(), 3);
    assert_eq!(svg.matches("<line").count(), 2);
    let text = stdout(&semwork(&["render", desc.to_str().unwrap(), "--out", "text"]));
    assert!(text.contains("NP") && text.contains("VP"));
    std::fs::write(&desc, "{tree}").unwrap();
    assert_eq!(semwork(&["render", desc.to_str().unwrap()]).status.code(), Some(1));

    let drs = dir.join("d.term");
    std::fs::write(&drs, "drs([x],[eq(x,anna),laugh(x)])").unwrap();
    let model = dir.join("m.model");
    std::fs::write(&model, "domain a b. pred laugh = {a}. const anna = b.").unwrap();
    let o = semwork(&[
        "translate",
        "--to",
        "fol",
        drs.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
    ]);
    assert_eq!(
        stdout(&o),
        "exists(x,and(eq(x,anna),laugh(x)))\n% drs: false\n% fol: false\n"
    );

    let list = stdout(&semwork(&["params", "list"]));
    assert_eq!(list.lines().count(), 90);
    assert!(list.lines().all(|l| l.starts_with("formalism=")));
    std::fs::remove_dir_all(&dir).ok();
}
