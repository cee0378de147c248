use std::fs;
use std::path::PathBuf;

use approxsmt::{parse_script, print_script};

fn corpus() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "smt2"))
        .collect();
    files.sort();
    files
}

#[test]
fn corpus_has_twenty_files() {
    assert_eq!(corpus().len(), 20);
}

#[test]
fn parse_print_parse_is_identity() {
    for path in corpus() {
        let text = fs::read_to_string(&path).unwrap();
        let first = parse_script(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let logic = first.logic.clone().unwrap_or_else(|| "ALL".into());
        let printed = print_script(&first.formula, &logic);
        let second = parse_script(&printed).unwrap_or_else(|e| panic!("{}: reparse: {e}\n{printed}", path.display()));
        assert_eq!(first.formula, second.formula, "{}", path.display());
        assert_eq!(second.logic.as_deref(), Some(logic.as_str()));
        // printing is a fixed point after one round
        assert_eq!(print_script(&second.formula, &logic), printed, "{}", path.display());
    }
}

#[test]
fn define_fun_becomes_an_equation() {
    let text = fs::read_to_string(corpus().iter().find(|p| p.ends_with("10_define_fun.smt2")).unwrap()).unwrap();
    let script = parse_script(&text).unwrap();
    assert_eq!(script.formula.declarations().len(), 2);
    assert_eq!(script.formula.assertions().len(), 2);
}

#[test]
fn rejected_constructs() {
    for text in [
        "(declare-fun f (Bool) Bool)",
        "(push 1)",
        "(declare-fun x () Float32) (assert (fp.sqrt RNE x))",
        "(declare-fun x () Float32) (assert (fp.lt x x x))",
        "(assert y)",
        "(declare-fun x () Bool) (declare-fun x () Bool)",
        "(assert (fp.lt ((_ to_fp 8 24) RNE 1.0) ((_ to_fp 5 11) RNE 1.0)))",
        "(assert (and true",
    ] {
        assert!(parse_script(text).is_err(), "{text}");
    }
}
