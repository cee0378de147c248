use std::fmt::{self, Write};

use crate::ast::{Ast, Formula, Model, Op};

/// Renders `formula` as an SMT-LIB 2 script. Scripts without assertions
/// contain only `set-logic` and `check-sat`.
pub fn print_script(formula: &Formula, logic: &str) -> String {
    let mut out = String::new();
    writeln!(out, "(set-logic {logic})").unwrap();
    if formula.is_empty() {
        out.push_str("(check-sat)\n");
        return out;
    }
    for d in formula.declarations() {
        writeln!(out, "(declare-fun {} () {})", quote_symbol(&d.name), d.sort).unwrap();
    }
    for a in formula.assertions() {
        out.push_str("(assert ");
        write_term(&mut out, a).unwrap();
        out.push_str(")\n");
    }
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

/// Renders one term.
pub fn print_term(ast: &Ast) -> String {
    let mut out = String::new();
    write_term(&mut out, ast).unwrap();
    out
}

/// Renders the declared variables bound in `model` as `define-fun` lines.
pub fn print_model(formula: &Formula, model: &Model) -> String {
    let mut out = String::from("(\n");
    for d in formula.declarations() {
        if let Some(v) = model.get(&d.label) {
            writeln!(out, "  (define-fun {} () {} {v})", quote_symbol(&d.name), d.sort).unwrap();
        }
    }
    out.push(')');
    out
}

/// Wraps a symbol in `|...|` unless it is a simple symbol.
pub fn quote_symbol(name: &str) -> String {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    let simple = !name.is_empty()
        && !name.as_bytes()[0].is_ascii_digit()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn write_term(out: &mut String, ast: &Ast) -> fmt::Result {
    match ast.op() {
        Op::Var(name) => out.write_str(&quote_symbol(name)),
        Op::Const(v) => write!(out, "{v}"),
        op => {
            write!(out, "({}", op.name())?;
            for child in ast.children() {
                out.write_str(" ")?;
                write_term(out, child)?;
            }
            out.write_str(")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smtlib::parse_script;

    #[test]
    fn round_trip_example() {
        let text = "(declare-fun x () Float32) (declare-fun |a b| () Bool)
            (assert (or |a b| (fp.lt ((_ to_fp 8 24) RTZ (fp.neg x)) ((_ to_fp 8 24) RNE (/ 1 3)))))";
        let first = parse_script(text).unwrap();
        let printed = print_script(&first.formula, "QF_FP");
        let second = parse_script(&printed).unwrap();
        assert_eq!(first.formula, second.formula);
        assert!(printed.contains("(declare-fun |a b| () Bool)"));
    }

    #[test]
    fn empty_script() {
        let printed = print_script(&Formula::default(), "QF_FP");
        assert_eq!(printed, "(set-logic QF_FP)\n(check-sat)\n");
    }
}
