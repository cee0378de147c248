//! Backends by name.

use anyhow::{bail, Result};
use approxsmt::backend::{Backend, Enumeration, ProcessSolver};

/// Default command lines of the known external solvers.
const SOLVERS: &[(&str, &[&str])] = &[
    ("z3", &["z3", "-in", "-smt2"]),
    ("cvc5", &["cvc5", "--lang=smt2", "--produce-models"]),
    ("bitwuzla", &["bitwuzla", "--lang=smt2", "--produce-models"]),
    ("mathsat", &["mathsat", "-input=smt2", "-model_generation=true"]),
];

fn env_key(name: &str) -> String {
    let upper: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' }).collect();
    format!("APPROXSMT_SOLVER_{upper}")
}

/// Command line for `name`: `APPROXSMT_SOLVER_<NAME>` if set, otherwise the
/// built-in default.
pub fn command_line(name: &str) -> Option<Vec<String>> {
    if let Ok(cmd) = std::env::var(env_key(name)) {
        let words: Vec<String> = cmd.split_whitespace().map(String::from).collect();
        if !words.is_empty() {
            return Some(words);
        }
    }
    SOLVERS.iter().find(|(n, _)| *n == name).map(|(_, cmd)| cmd.iter().map(|s| s.to_string()).collect())
}

/// A fresh backend named `name`. `enum` is the built-in enumerator.
pub fn backend(name: &str) -> Result<Box<dyn Backend>> {
    if name == "enum" {
        return Ok(Box::new(Enumeration::default()));
    }
    match command_line(name) {
        Some(cmd) => Ok(Box::new(ProcessSolver::new(name, cmd, Vec::new()))),
        None => bail!("unknown backend `{name}` (set {} to define it)", env_key(name)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(backend("enum").unwrap().name(), "enum");
        assert_eq!(command_line("z3").unwrap(), ["z3", "-in", "-smt2"]);
        assert!(backend("no-such-solver").is_err());
        assert_eq!(env_key("my-solver"), "APPROXSMT_SOLVER_MY_SOLVER");
    }
}
