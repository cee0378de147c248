use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/corpus").join(name)
}

fn approxsmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approxsmt")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solves_the_running_example() {
    let file = corpus("01_running_example.smt2");
    // Float32 is too large to enumerate, so only the approximations that
    // succeed below it can use the built-in backend
    for approx in ["rpfp", "bv"] {
        let out = approxsmt(&["solve", file.to_str().unwrap(), "--approx", approx]);
        assert!(out.status.success(), "{approx}: {}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        assert_eq!(text.lines().next(), Some("sat"), "{approx}");
        assert!(text.contains("(define-fun x () (_ FloatingPoint 8 24)"));
    }
}

#[test]
fn direct_enumeration_of_float32_is_unknown() {
    let out = approxsmt(&["solve", corpus("01_running_example.smt2").to_str().unwrap(), "--approx", "none"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "unknown");
}

#[test]
fn z3_when_installed() {
    if Command::new("z3").arg("-version").output().is_err() {
        eprintln!("z3 not found, skipping");
        return;
    }
    let file = corpus("01_running_example.smt2");
    for approx in ["rpfp", "bv", "ra", "none"] {
        let out = approxsmt(&["solve", file.to_str().unwrap(), "--approx", approx, "--backend", "z3", "--fallback", "z3"]);
        assert_eq!(stdout(&out).lines().next(), Some("sat"), "{approx}");
    }
}

#[test]
fn unsat_file() {
    let out = approxsmt(&["solve", corpus("20_unsat.smt2").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "unsat");
}

#[test]
fn encodes_fixed_point_constants() {
    let file = corpus("01_running_example.smt2");
    let out = approxsmt(&["encode", file.to_str().unwrap(), "--approx", "bv", "--precision", "5,5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("(set-logic QF_BV)"));
    for constant in ["#b0000111000", "#b0001000000", "#b1110000000"] {
        assert!(text.contains(constant), "{constant} missing from\n{text}");
    }
    // top is the original formula
    let top = approxsmt(&["encode", file.to_str().unwrap(), "--approx", "ra", "--precision", "top"]);
    assert!(stdout(&top).starts_with("(set-logic QF_FP)"));
}

#[test]
fn exit_codes() {
    assert_eq!(approxsmt(&["solve"]).status.code(), Some(1));
    assert_eq!(approxsmt(&["solve", "x.smt2", "--approx", "nope"]).status.code(), Some(1));
    assert_eq!(approxsmt(&["--help"]).status.code(), Some(0));
    assert_eq!(approxsmt(&["solve", "/no/such/file.smt2"]).status.code(), Some(2));
    let file = corpus("01_running_example.smt2");
    let bad = approxsmt(&["encode", file.to_str().unwrap(), "--approx", "bv", "--precision", "7"]);
    assert_eq!(bad.status.code(), Some(2));
    let unknown = approxsmt(&["solve", file.to_str().unwrap(), "--backend", "no-such-solver"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn bench_writes_sorted_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let empty = tempfile::tempdir().unwrap();
    let out = approxsmt(&["bench", empty.path().to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("file,verdict,iterations,max_precision_reached,fallback_used,time_total_ms,"));

    let files = tempfile::tempdir().unwrap();
    for name in ["01_running_example.smt2", "20_unsat.smt2"] {
        std::fs::copy(corpus(name), files.path().join(name)).unwrap();
    }
    std::fs::write(files.path().join("broken.smt2"), "(assert").unwrap();
    let out = approxsmt(&["bench", files.path().to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let verdicts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(verdicts, ["sat", "unsat", "error"]);
}

#[test]
fn external_solver_from_environment() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("fake-solver");
    std::fs::write(&script, "#!/bin/sh\ncat >/dev/null\necho unsat\n").unwrap();
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    let file = corpus("01_running_example.smt2");
    let out = Command::new(env!("CARGO_BIN_EXE_approxsmt"))
        .args(["solve", file.to_str().unwrap(), "--approx", "none", "--fallback", "fake"])
        .env("APPROXSMT_SOLVER_FAKE", &script)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).trim(), "unsat");
}
