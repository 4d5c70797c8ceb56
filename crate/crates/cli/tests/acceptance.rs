//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fail.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use faithcheck_core::catalog::{example, published_listing, ExampleId, PatternId};
use faithcheck_core::ci::{
    check_theorem2, extract_ci_set, intersection_rule, semigraphoid_closure, CISet,
};
use faithcheck_core::dag::{
    enumerate_dags, implied_ci_set, markov_equivalence_classes, parse_dag,
    random_markov_distribution,
};
use faithcheck_core::dist::parse_dist;
use faithcheck_core::faithful::{classify, is_faithful};
use faithcheck_core::pattern::cpdag;
use faithcheck_core::pc::{exact_oracle, pc, pc_diagnose};
use faithcheck_core::search::{MatchKind, SearchConfig};
use faithcheck_core::theorem3::{verify_theorem3, Status};
use faithcheck_core::{JointTable, Rational, Semantics, VarSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

const STRICT: Semantics = Semantics::Strict;

fn ex(k: u32) -> JointTable {
    example(ExampleId::new(k).unwrap())
}

fn check(ok: bool, failures: &mut Vec<String>, what: String) {
    if !ok {
        failures.push(what);
    }
}

fn finish(failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}

fn random_tables(seed: u64, count: usize, min: u64) -> Vec<JointTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let w: Vec<u64> = (0..8).map(|_| rng.random_range(min..=9)).collect();
        if w.iter().any(|&x| x > 0) {
            out.push(JointTable::from_weights(VarSet::xyz(), &w).unwrap());
        }
    }
    out
}

fn catalog_fidelity() -> Outcome {
    let mut failures = Vec::new();
    for id in ExampleId::all() {
        let t = example(id);
        let reparsed = parse_dist(&t.to_dist_text()).map_err(|e| e.to_string())?;
        check(
            reparsed == t,
            &mut failures,
            format!("example {id} does not round-trip"),
        );
        let total: Rational = t.masses().iter().cloned().sum();
        check(
            total == Rational::from_integer(1),
            &mut failures,
            format!("example {id} sums to {total}"),
        );
        let extracted = extract_ci_set(&t, STRICT);
        let listed = published_listing(id);
        check(
            listed.is_subset(&extracted),
            &mut failures,
            format!(
                "example {id} lacks {}",
                listed.difference(&extracted).inline()
            ),
        );
    }
    finish(failures)
}

fn exact_goldens() -> Outcome {
    let vars = VarSet::xyz();
    let cases = [
        (2, "X _||_ Y; X _||_ Z; Y _||_ Z"),
        (4, "X _||_ Y | Z; X _||_ Z | Y"),
        (6, "X _||_ Y | Z; X _||_ Z | Y; Y _||_ Z | X"),
        (
            3,
            "X _||_ Y; X _||_ Z; X _||_ Y,Z; X _||_ Y | Z; X _||_ Z | Y",
        ),
    ];
    let mut failures = Vec::new();
    for (k, expected) in cases {
        let expected = CISet::parse(expected, &vars).unwrap();
        let got = extract_ci_set(&ex(k), STRICT);
        check(
            got == expected,
            &mut failures,
            format!("example {k}: {}", got.inline()),
        );
    }
    finish(failures)
}

fn faithfulness_verdicts() -> Outcome {
    let vars = VarSet::xyz();
    let empty = parse_dag("empty", &vars).unwrap();
    let mut failures = Vec::new();
    check(
        is_faithful(&ex(1), &empty, STRICT).unwrap(),
        &mut failures,
        "example 1 not faithful to empty".into(),
    );
    for k in [2, 3, 5, 7, 9, 10] {
        check(
            !is_faithful(&ex(k), &empty, STRICT).unwrap(),
            &mut failures,
            format!("example {k} faithful to empty"),
        );
    }
    for k in [2, 4, 5, 6, 7, 9, 10] {
        let r = classify(&ex(k), STRICT).unwrap();
        check(
            r.faithful.is_empty(),
            &mut failures,
            format!("example {k} faithful to {}", r.faithful_summary()),
        );
    }
    for (k, spec) in [(3, ["Y->Z", "Z->Y"]), (8, ["X->Y", "Y->X"])] {
        let r = classify(&ex(k), STRICT).unwrap();
        let expected: Vec<_> = spec.iter().map(|s| parse_dag(s, &vars).unwrap()).collect();
        check(
            r.faithful == expected,
            &mut failures,
            format!("example {k} faithful to {}", r.faithful_summary()),
        );
        if k == 8 {
            check(
                !r.notes.is_empty(),
                &mut failures,
                "example 8 remark not flagged".into(),
            );
        }
    }
    finish(failures)
}

fn structure_counts() -> Outcome {
    let dags = enumerate_dags(&VarSet::xyz()).unwrap();
    let classes = markov_equivalence_classes(&dags).unwrap();
    if dags.len() == 25 && classes.len() == 11 {
        Ok(())
    } else {
        Err(format!("{} DAGs, {} classes", dags.len(), classes.len()))
    }
}

fn theorem2_suite() -> Outcome {
    let mut tables = random_tables(2, 200, 1);
    tables.extend((1..=3).map(ex));
    let bad: Vec<String> = tables
        .iter()
        .filter(|t| !check_theorem2(t).unwrap())
        .map(|t| t.compact())
        .collect();
    finish(bad)
}

fn graphoid_suites() -> Outcome {
    let mut failures = Vec::new();
    for t in random_tables(6, 200, 0) {
        let set = extract_ci_set(&t, Semantics::Standard);
        check(
            semigraphoid_closure(&set) == set,
            &mut failures,
            format!("not semigraphoid closed: {}", t.compact()),
        );
    }
    for t in random_tables(7, 200, 1) {
        let set = extract_ci_set(&t, STRICT);
        check(
            intersection_rule(&set, true) == set,
            &mut failures,
            format!("not intersection closed: {}", t.compact()),
        );
    }
    let vars = VarSet::xyz();
    let premises = CISet::parse("X _||_ Y | Z; X _||_ Z | Y", &vars).unwrap();
    let joint = faithcheck_core::ci::parse_statement("X _||_ Y,Z", &vars).unwrap();
    for k in [4, 6] {
        let set = extract_ci_set(&ex(k), STRICT);
        check(
            premises.is_subset(&set) && !set.contains(&joint),
            &mut failures,
            format!("example {k} is not an intersection violation"),
        );
    }
    finish(failures)
}

fn dsep_soundness() -> Outcome {
    let mut failures = Vec::new();
    let mut faithful = 0;
    let mut total = 0;
    for g in enumerate_dags(&VarSet::xyz()).unwrap() {
        let implied = implied_ci_set(&g);
        for seed in 0..20 {
            let p = random_markov_distribution(&g, seed, 97).unwrap();
            let extracted = extract_ci_set(&p, STRICT);
            check(
                implied.is_subset(&extracted),
                &mut failures,
                format!("{g} seed {seed}: I_G not contained"),
            );
            faithful += usize::from(extracted == implied);
            total += 1;
        }
    }
    check(
        faithful * 100 >= total * 95,
        &mut failures,
        format!("faithful in {faithful}/{total}"),
    );
    finish(failures)
}

fn pc_correctness() -> Outcome {
    let mut failures = Vec::new();
    for g in enumerate_dags(&VarSet::xyz()).unwrap() {
        let mut runs = 0;
        for seed in 0..40 {
            let p = random_markov_distribution(&g, seed, 97).unwrap();
            if !is_faithful(&p, &g, STRICT).unwrap() {
                continue;
            }
            let got = pc(&exact_oracle(&p, STRICT), p.vars()).unwrap();
            check(
                got == cpdag(&g),
                &mut failures,
                format!("{g} seed {seed}: got {got}"),
            );
            runs += 1;
            if runs == 5 {
                break;
            }
        }
        check(
            runs == 5,
            &mut failures,
            format!("{g}: only {runs} faithful seeds"),
        );
    }
    let two = ex(2);
    let got = pc(&exact_oracle(&two, STRICT), two.vars()).unwrap();
    check(
        got.to_string() == "empty",
        &mut failures,
        format!("example 2 pattern {got}"),
    );
    let empty = parse_dag("empty", two.vars()).unwrap();
    check(
        !is_faithful(&two, &empty, STRICT).unwrap(),
        &mut failures,
        "empty DAG faithful to example 2".into(),
    );
    let d = pc_diagnose(&two, STRICT).unwrap();
    let names_missing = d
        .comparisons
        .iter()
        .any(|c| c.missing.inline().split("; ").any(|s| s == "X _||_ Y | Z"));
    check(
        d.verdict() == "MISMATCH" && names_missing,
        &mut failures,
        format!("example 2 diagnosis {}", d.verdict()),
    );
    finish(failures)
}

fn theorem3_verification() -> Outcome {
    let report = verify_theorem3(&SearchConfig::default()).map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    for id in ["I:4", "I:5", "I:8"] {
        let row = report.pattern(id.parse::<PatternId>().unwrap());
        let kind = row.realization.as_ref().map(|r| r.kind);
        check(
            kind == Some(MatchKind::Exact),
            &mut failures,
            format!("{id} realized as {kind:?}"),
        );
    }
    // the literal X:1 set is not closed under contraction; its goal set is the closure
    let x1 = report.pattern("X:1".parse().unwrap());
    let x1_goal = x1.realization.as_ref().is_some_and(|r| {
        r.kind != MatchKind::Superset && r.extracted == semigraphoid_closure(&x1.literal)
    });
    check(x1_goal, &mut failures, "X:1 goal set not realized".into());
    let ten = report.conclusion(10).status();
    check(
        ten == Status::Supported,
        &mut failures,
        format!("conclusion 10 {ten}"),
    );
    let conflict = report
        .notes
        .iter()
        .any(|n| n.contains("conclusions 4 and 9") && n.contains("faithful to"));
    let classified = (1..=3).any(|k| {
        report
            .pattern(format!("IV:{k}").parse().unwrap())
            .faithful
            .is_some()
    });
    check(
        conflict && classified,
        &mut failures,
        "4/9 conflict not reported with a classified realization".into(),
    );
    let stale = report.reverify();
    check(
        stale.is_empty(),
        &mut failures,
        format!("witnesses fail: {}", stale.join(", ")),
    );
    finish(failures)
}

fn determinism() -> Outcome {
    let dir = env!("CARGO_TARGET_TMPDIR");
    let dist = format!("{dir}/acceptance-five.dist");
    std::fs::write(&dist, ex(5).to_dist_text()).map_err(|e| e.to_string())?;
    let runs: Vec<Vec<&str>> = vec![
        vec!["analyze", "--example", "3"],
        vec!["analyze", "--dist", &dist, "--semantics", "standard"],
        vec!["classify", "--example", "8"],
        vec!["dsep", "--dag", "X->Z;Y->Z", "--query", "X _||_ Y | Z"],
        vec!["markov", "--example", "4", "--dag", "Z->X;Z->Y"],
        vec!["pc", "--example", "2"],
        vec!["examples"],
        vec!["examples", "--verify"],
        vec!["pattern"],
        vec!["pattern", "IV:2"],
        vec!["search", "I:7", "--seed", "3"],
        vec![
            "search",
            "X _||_ Y | Z; X _||_ Z | Y",
            "--implies",
            "X _||_ Y,Z",
        ],
        vec!["verify-theorem3", "--budget", "20000", "--seed", "5"],
    ];
    let bin = env!("CARGO_BIN_EXE_faithcheck");
    let mut failures = Vec::new();
    for args in &runs {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "1", "4"] {
            let out = Command::new(bin)
                .args(args)
                .env("FAITHCHECK_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            outputs.push((out.status.code(), out.stdout));
        }
        let distinct: BTreeSet<_> = outputs.iter().collect();
        check(
            distinct.len() == 1 && outputs[0].0 == Some(0) && !outputs[0].1.is_empty(),
            &mut failures,
            args.join(" "),
        );
    }
    finish(failures)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("example catalog fidelity", catalog_fidelity),
        ("exact-set goldens", exact_goldens),
        ("faithfulness verdicts", faithfulness_verdicts),
        ("structure counts", structure_counts),
        ("mutual-independence biconditional suite", theorem2_suite),
        ("graphoid suites", graphoid_suites),
        (
            "d-separation soundness and generic faithfulness",
            dsep_soundness,
        ),
        ("PC correctness and failure", pc_correctness),
        ("pattern claim verification", theorem3_verification),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(()) => println!("criterion {:>2} PASS  {name}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
