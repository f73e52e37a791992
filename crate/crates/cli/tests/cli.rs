use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["espec"];
    argv.extend_from_slice(args);
    let code = espectrum_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn check_exit_codes() {
    assert_eq!(run(&["check", "hhb", "--expr", "a", "--expr", "a+a"]).0, 0);
    assert_eq!(run(&["check", "iso", "--expr", "a", "--expr", "a+a"]).0, 1);
    assert_eq!(run(&["check", "HB", "--expr", "a||(a+(a||a))", "--expr", "(a||(a+(a||a)))+(a||a)"]).0, 0);
    assert_eq!(run(&["check", "hhb", "--expr", "a||(a+(a||a))", "--expr", "(a||(a+(a||a)))+(a||a)"]).0, 1);
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(run(&["check", "nope", "--expr", "a", "--expr", "a"]).0, 2);
    assert_eq!(run(&["check", "it", "--expr", "a"]).0, 2);
    assert_eq!(run(&["check", "it", "--expr", "a", "--expr", "(a"]).0, 2);
    let (code, _, err) = run(&["validate", "--expr", "(a+b);c"]);
    assert_eq!(code, 2);
    assert!(err.contains("not prime"), "{err}");
    assert_eq!(run(&["validate", "--file", "/nonexistent/x.es"]).0, 2);
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn matrix_for_sequence_against_parallel() {
    let (code, out, _) = run(&["matrix", "--expr", "a;a", "--expr", "a||a"]);
    assert_eq!(code, 0);
    let yes: Vec<&str> = out.lines().filter(|l| l.ends_with("yes")).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(yes, ["it", "ib"]);
    assert_eq!(out.lines().filter(|l| l.ends_with(" no")).count(), 8);
}

#[test]
fn inputs_keep_command_line_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.es");
    std::fs::write(&path, "es v1\nevent 0 a\nevent 1 b\ncause 0 1\n").unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["check", "it", "--file", p, "--expr", "a||b", "--witness"]);
    assert_eq!(code, 1);
    assert!(out.contains("only the right side"), "{out}");
    let (_, out, _) = run(&["check", "it", "--expr", "a||b", "--file", p, "--witness"]);
    assert!(out.contains("only the left side"), "{out}");
}

#[test]
fn unicode_parallel_is_accepted_and_output_is_ascii() {
    let (code, out, _) = run(&["lts", "--expr", "a\u{2225}b", "--mode", "s"]);
    assert_eq!(code, 0);
    assert!(out.contains("{a,b}"), "{out}");
    assert!(out.is_ascii());
}

#[test]
fn dot_output() {
    let (_, out, _) = run(&["show", "--expr", "a;b", "--dot"]);
    assert_eq!(out.matches("->").count(), 1);
    let (_, out, _) = run(&["lts", "--expr", "(a||b)+(a;b)", "--mode", "i", "--dot"]);
    assert_eq!(out.matches("->").count(), 6);
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with('s') && !l.contains("->")).count(), 6);
}

#[test]
fn fixtures_and_spectrum() {
    let (code, out, _) = run(&["fixtures"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("ok")).count(), 8);
    let args = ["spectrum", "--class", "cs", "--pairs", "40", "--seed", "5", "--max-size", "6", "--table"];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0, "{first}");
    assert!(first.contains("violations: 0"));
    assert_eq!(run(&args).1, first);
}

#[test]
fn search_writes_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("found");
    let (code, out, _) =
        run(&["search", "--coarse", "ib", "--fine", "sb", "--max-n", "4", "--out", target.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("found at 2 events"), "{out}");
    let left = espectrum::io::read_es(target.join("pair-0-left.es")).unwrap();
    let right = espectrum::io::read_es(target.join("pair-0-right.es")).unwrap();
    let a = espectrum::algebra::structure_of("a||a").unwrap();
    let b = espectrum::algebra::structure_of("a;a").unwrap();
    assert!((left.is_isomorphic(&a) && right.is_isomorphic(&b)) || (left.is_isomorphic(&b) && right.is_isomorphic(&a)));
    assert_eq!(run(&["search", "--coarse", "iso", "--fine", "it", "--max-n", "3"]).0, 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_espec");
    let status = |args: &[&str]| Command::new(bin).args(args).status().unwrap().code();
    assert_eq!(status(&["check", "hhb", "--expr", "a", "--expr", "a+a"]), Some(0));
    assert_eq!(status(&["check", "iso", "--expr", "a", "--expr", "a+a"]), Some(1));
    assert_eq!(status(&["check", "iso", "--expr", "a"]), Some(2));
}
