use faithcheck::{run_cli, EXIT_EXHAUSTED, EXIT_INVARIANT, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["faithcheck"];
    argv.extend_from_slice(args);
    run_cli(argv)
}

fn section<'a>(out: &'a str, name: &str) -> Vec<&'a str> {
    out.lines()
        .skip_while(|l| *l != name)
        .skip(1)
        .take_while(|l| !l.starts_with('['))
        .collect()
}

fn tmp(name: &str, body: &str) -> String {
    let path = format!("{}/{name}", env!("CARGO_TARGET_TMPDIR"));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn analyze_pairwise_example() {
    let (code, out, err) = run(&["analyze", "--example", "2"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(
        section(&out, "[extracted]"),
        vec!["X _||_ Y", "X _||_ Z", "Y _||_ Z"]
    );
}

#[test]
fn dsep_collider() {
    let (code, out, _) = run(&["dsep", "--dag", "X->Z;Y->Z", "--query", "X _||_ Y | Z"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "false\n"));
    let (_, out, _) = run(&["dsep", "--dag", "X->Z;Y->Z", "--query", "X _||_ Y"]);
    assert_eq!(out, "true\n");
    let (_, out, _) = run(&[
        "dsep", "--dag", "A->B", "--query", "A _||_ C", "--vars", "A,B,C",
    ]);
    assert_eq!(out, "true\n");
}

#[test]
fn missing_file() {
    let (code, out, err) = run(&["analyze", "--dist", "missing.txt"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("missing.txt"));
}

#[test]
fn examples_verify() {
    let (code, out, _) = run(&["examples", "--verify"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 10);
    assert!(out.lines().all(|l| l.ends_with("PASS")));
}

#[test]
fn usage_errors() {
    let (code, out, err) = run(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("Usage"));
    let (code, out, _) = run(&["analyze"]);
    assert_eq!((code, out.as_str()), (EXIT_USAGE, ""));
    let (code, _, _) = run(&["analyze", "--example", "11"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&["pattern", "I:9"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&["analyze", "--example", "1", "--semantics", "lax"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify-theorem3"));
}

#[test]
fn invariant_violations() {
    let bad_sum = tmp("bad-sum.dist", "vars X Y\np 0 0 1/2\np 1 1 1/3\n");
    let (code, out, err) = run(&["analyze", "--dist", &bad_sum]);
    assert_eq!(code, EXIT_INVARIANT, "{err}");
    assert!(out.is_empty());
    let (code, _, _) = run(&["dsep", "--dag", "X->Y;Y->X", "--query", "X _||_ Z"]);
    assert_eq!(code, EXIT_INVARIANT);
    let syntax = tmp("syntax.dist", "vars X Y\np 0 0 one\n");
    let (code, _, _) = run(&["analyze", "--dist", &syntax]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn dist_files() {
    let path = tmp(
        "chain.dist",
        "# two binary variables\nvars A B\np 0 0 1/2\np 1 1 1/2\n",
    );
    let (code, out, err) = run(&["classify", "--dist", &path]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(section(&out, "[faithful]"), vec!["A->B", "B->A"]);
}

#[test]
fn search_commands() {
    let (code, out, _) = run(&["search", "I:5", "--budget", "1000"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(section(&out, "[realization]")[0], "exact #3");
    let (code, out, err) = run(&["search", "II:1", "--budget", "200"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("superset"), "{out}{err}");
    let (code, out, _) = run(&[
        "search",
        "X _||_ Y,Z",
        "--implies",
        "X _||_ Y",
        "--budget",
        "500",
    ]);
    assert_eq!((code, out.as_str()), (EXIT_EXHAUSTED, ""));
    let (code, out, _) = run(&[
        "search",
        "I:5",
        "--implies",
        "X _||_ Y,Z",
        "--budget",
        "500",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("counterexample"));
    let (code, _, _) = run(&["search", "I:5", "--budget", "0"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn pc_and_markov() {
    let (code, out, _) = run(&["pc", "--example", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(section(&out, "[pattern]"), vec!["Y--Z"]);
    assert_eq!(section(&out, "[verdict]"), vec!["MATCH"]);
    let (code, out, _) = run(&["markov", "--example", "4", "--dag", "Z->X;Z->Y"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        section(&out, "[verdict]"),
        vec![
            "markov-dsep true",
            "markov-factorization true",
            "faithful false"
        ]
    );
}

#[test]
fn patterns_listing() {
    let (_, out, _) = run(&["pattern"]);
    assert_eq!(out.lines().count(), 57);
    assert!(out.starts_with("I:1 X _||_ Y; X _||_ Z\n"));
    let (_, out, _) = run(&["pattern", "IV:2"]);
    assert_eq!(
        section(&out, "[pattern IV:2]"),
        vec!["X _||_ Z", "X _||_ Y | Z", "X _||_ Z | Y", "Y _||_ Z | X"]
    );
}
