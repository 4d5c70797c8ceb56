//! Argument handling and dispatch for the `faithcheck` binary.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use faithcheck_core::catalog::{example, published_listing, remarks, ExampleId, PatternId};
use faithcheck_core::ci::{
    extract_ci_set, parse_conclusion, semigraphoid_closure, CISet, Conclusion,
};
use faithcheck_core::dag::{
    d_separated, implied_ci_set, markov_by_dsep, markov_by_factorization, parse_dag,
};
use faithcheck_core::dist::{parse_dist, JointTable, Semantics};
use faithcheck_core::faithful::{classify, is_faithful};
use faithcheck_core::pc::pc_diagnose;
use faithcheck_core::search::{check_implication, search_distribution, SearchConfig, Verdict};
use faithcheck_core::theorem3::verify_theorem3;
use faithcheck_core::{Error, VarSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

pub const THREADS_ENV: &str = "FAITHCHECK_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "faithcheck",
    version,
    about = "Independence structure and DAG faithfulness of small binary distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Source {
    /// Distribution file
    #[arg(long, value_name = "FILE", conflicts_with = "example")]
    dist: Option<String>,
    /// Built-in catalog table, 1 to 10
    #[arg(long, value_name = "K")]
    example: Option<u32>,
}

#[derive(Args, Debug)]
struct SemanticsArg {
    /// strict or standard
    #[arg(long, default_value = "strict")]
    semantics: Semantics,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of candidate tables to examine
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    /// Largest common denominator of the exhaustive grid
    #[arg(long = "denom-bound", default_value_t = 8)]
    denom_bound: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the independence statements of a distribution
    Analyze {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        sem: SemanticsArg,
    },
    /// Compare a distribution against every DAG on its variables
    Classify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        sem: SemanticsArg,
    },
    /// Decide a d-separation query
    Dsep {
        #[arg(long, value_name = "SPEC")]
        dag: String,
        #[arg(long, value_name = "STMT")]
        query: String,
        /// Comma-separated variable names
        #[arg(long, default_value = "X,Y,Z")]
        vars: String,
    },
    /// Check a distribution against a DAG
    Markov {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "SPEC")]
        dag: String,
        #[command(flatten)]
        sem: SemanticsArg,
    },
    /// Run PC on the exact oracle of a distribution
    Pc {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        sem: SemanticsArg,
    },
    /// List the catalog tables
    Examples {
        /// Check each table against its published listing
        #[arg(long)]
        verify: bool,
    },
    /// Print one statement pattern, or all of them
    Pattern { id: Option<String> },
    /// Realize a pattern, or test an implication from it
    Search {
        /// Pattern id such as I:5, or statements separated by `;`
        target: String,
        /// Look for a counterexample to TARGET implying this statement
        #[arg(long, value_name = "STMT")]
        implies: Option<String>,
        #[arg(long, default_value = "X,Y,Z")]
        vars: String,
        #[command(flatten)]
        sem: SemanticsArg,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Evaluate every claim about the statement patterns
    #[command(name = "verify-theorem3")]
    VerifyTheorem3 {
        #[command(flatten)]
        sem: SemanticsArg,
        #[command(flatten)]
        search: SearchArgs,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if e.is_invariant_violation() {
            EXIT_INVARIANT
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<(i32, String), Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn load(source: &Source) -> std::result::Result<JointTable, Failure> {
    match (&source.dist, source.example) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {path}: {e}")))?;
            parse_dist(&text).map_err(|e| {
                let f = Failure::from(e);
                Failure {
                    message: format!("{path}: {}", f.message),
                    ..f
                }
            })
        }
        (None, Some(k)) => Ok(example(ExampleId::new(k)?)),
        _ => Err(usage("exactly one of --dist or --example is required")),
    }
}

fn parse_vars(text: &str) -> std::result::Result<VarSet, Failure> {
    let names: Vec<&str> = text.split(',').map(str::trim).collect();
    Ok(VarSet::new(&names)?)
}

fn header(out: &mut String, table: &JointTable, sem: Semantics) {
    writeln!(out, "[distribution]").unwrap();
    writeln!(out, "vars {}", table.vars()).unwrap();
    if let Some(id) = faithcheck_core::catalog::identify(table) {
        writeln!(out, "example {id}").unwrap();
    }
    writeln!(out, "digest {}", table.digest()).unwrap();
    writeln!(out, "semantics {sem}").unwrap();
}

fn set_lines(out: &mut String, set: &CISet) {
    if set.is_empty() && !set.mutual() {
        out.push_str("none\n");
    } else {
        write!(out, "{set}").unwrap();
    }
}

fn analyze(table: &JointTable, sem: Semantics) -> Outcome {
    let mut out = String::new();
    header(&mut out, table, sem);
    writeln!(out, "[extracted]").unwrap();
    set_lines(&mut out, &extract_ci_set(table, sem));
    writeln!(out, "[properties]").unwrap();
    writeln!(out, "strictly-positive {}", table.is_strictly_positive()).unwrap();
    writeln!(
        out,
        "mutually-independent {}",
        table.is_mutually_independent()
    )
    .unwrap();
    if let Some(id) = faithcheck_core::catalog::identify(table) {
        let notes = remarks(id);
        if !notes.is_empty() {
            writeln!(out, "[notes]").unwrap();
            for n in notes {
                writeln!(out, "{n}").unwrap();
            }
        }
    }
    Ok((EXIT_OK, out))
}

fn dsep(dag: &str, query: &str, vars: &str) -> Outcome {
    let vars = parse_vars(vars)?;
    let g = parse_dag(dag, &vars)?;
    let holds = match parse_conclusion(query, &vars)? {
        Conclusion::Statement(st) => d_separated(&g, st.a(), st.b(), st.given())?,
        Conclusion::Mutual => implied_ci_set(&g).mutual(),
    };
    Ok((EXIT_OK, format!("{holds}\n")))
}

fn markov(table: &JointTable, dag: &str, sem: Semantics) -> Outcome {
    let g = parse_dag(dag, table.vars())?;
    let extracted = extract_ci_set(table, sem);
    let implied = implied_ci_set(&g);
    let mut out = String::new();
    header(&mut out, table, sem);
    writeln!(out, "[dag]").unwrap();
    writeln!(out, "{g}").unwrap();
    writeln!(out, "[verdict]").unwrap();
    writeln!(out, "markov-dsep {}", markov_by_dsep(table, &g, sem)?).unwrap();
    writeln!(
        out,
        "markov-factorization {}",
        markov_by_factorization(table, &g)?
    )
    .unwrap();
    writeln!(out, "faithful {}", is_faithful(table, &g, sem)?).unwrap();
    writeln!(out, "[missing]").unwrap();
    set_lines(&mut out, &implied.difference(&extracted));
    writeln!(out, "[extra]").unwrap();
    set_lines(&mut out, &extracted.difference(&implied));
    Ok((EXIT_OK, out))
}

fn examples(verify: bool) -> Outcome {
    let mut out = String::new();
    let mut all_pass = true;
    for id in ExampleId::all() {
        let table = example(id);
        let extracted = extract_ci_set(&table, Semantics::Strict);
        let listed = published_listing(id);
        if verify {
            let sums = table
                .masses()
                .iter()
                .cloned()
                .sum::<faithcheck_core::Rational>()
                == num_one();
            let contained = listed.is_subset(&extracted);
            let pass = sums && contained;
            all_pass &= pass;
            let mut line = format!("example {id} {}", if pass { "PASS" } else { "FAIL" });
            if !contained {
                write!(line, " missing {}", listed.difference(&extracted).inline()).unwrap();
            }
            writeln!(out, "{line}").unwrap();
        } else {
            writeln!(out, "[example {id}]").unwrap();
            writeln!(out, "masses {}", table.compact()).unwrap();
            writeln!(out, "digest {}", table.digest()).unwrap();
            writeln!(out, "listed {}", listed.inline()).unwrap();
            writeln!(out, "extracted {}", extracted.inline()).unwrap();
            writeln!(
                out,
                "extracted-standard {}",
                extract_ci_set(&table, Semantics::Standard).inline()
            )
            .unwrap();
            for n in remarks(id) {
                writeln!(out, "note {n}").unwrap();
            }
        }
    }
    Ok((if all_pass { EXIT_OK } else { EXIT_INVARIANT }, out))
}

fn num_one() -> faithcheck_core::Rational {
    faithcheck_core::Rational::from_integer(1)
}

fn pattern_cmd(id: Option<&str>) -> Outcome {
    let mut out = String::new();
    match id {
        None => {
            for id in PatternId::all() {
                writeln!(
                    out,
                    "{id} {}",
                    faithcheck_core::catalog::pattern(id).inline()
                )
                .unwrap();
            }
        }
        Some(text) => {
            let id: PatternId = text.parse()?;
            let literal = faithcheck_core::catalog::pattern(id);
            writeln!(out, "[pattern {id}]").unwrap();
            write!(out, "{literal}").unwrap();
            writeln!(out, "[closure]").unwrap();
            write!(out, "{}", semigraphoid_closure(&literal)).unwrap();
        }
    }
    Ok((EXIT_OK, out))
}

fn parse_target(text: &str, vars: &VarSet) -> std::result::Result<CISet, Failure> {
    if let Ok(id) = text.parse::<PatternId>() {
        return Ok(faithcheck_core::catalog::pattern(id));
    }
    Ok(CISet::parse(text, vars)?)
}

fn config(sem: Semantics, s: &SearchArgs) -> SearchConfig {
    SearchConfig {
        seed: s.seed,
        budget: s.budget,
        denom_bound: s.denom_bound,
        semantics: sem,
    }
}

fn search(target: &str, implies: Option<&str>, vars: &str, cfg: SearchConfig) -> Outcome {
    let vars = parse_vars(vars)?;
    let target = parse_target(target, &vars)?;
    let mut out = String::new();
    writeln!(out, "[target]").unwrap();
    writeln!(out, "{}", target.inline()).unwrap();
    if let Some(c) = implies {
        let conclusion = parse_conclusion(c, &vars)?;
        writeln!(out, "[conclusion]").unwrap();
        writeln!(out, "{}", conclusion.format(&vars)).unwrap();
        writeln!(out, "[verdict]").unwrap();
        return Ok(match check_implication(&target, &conclusion, &cfg)? {
            Verdict::Counterexample(t) => {
                writeln!(out, "counterexample").unwrap();
                out.push_str(&t.to_dist_text());
                (EXIT_OK, out)
            }
            Verdict::NoCounterexampleFound { examined } => {
                writeln!(out, "no-counterexample-found {examined}").unwrap();
                (EXIT_EXHAUSTED, out)
            }
        });
    }
    writeln!(out, "[realization]").unwrap();
    Ok(match search_distribution(&target, &cfg)? {
        Some(r) => {
            writeln!(out, "{} #{}", r.kind.label(), r.index).unwrap();
            out.push_str(&r.table.to_dist_text());
            writeln!(out, "[extracted]").unwrap();
            set_lines(&mut out, &r.extracted);
            (EXIT_OK, out)
        }
        None => {
            writeln!(out, "none").unwrap();
            (EXIT_EXHAUSTED, out)
        }
    })
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Analyze { source, sem } => analyze(&load(&source)?, sem.semantics),
        Command::Classify { source, sem } => Ok((
            EXIT_OK,
            classify(&load(&source)?, sem.semantics)?.to_string(),
        )),
        Command::Dsep { dag, query, vars } => dsep(&dag, &query, &vars),
        Command::Markov { source, dag, sem } => markov(&load(&source)?, &dag, sem.semantics),
        Command::Pc { source, sem } => {
            let table = load(&source)?;
            let mut out = String::new();
            header(&mut out, &table, sem.semantics);
            out.push_str(&pc_diagnose(&table, sem.semantics)?.to_string());
            Ok((EXIT_OK, out))
        }
        Command::Examples { verify } => examples(verify),
        Command::Pattern { id } => pattern_cmd(id.as_deref()),
        Command::Search {
            target,
            implies,
            vars,
            sem,
            search: s,
        } => search(
            &target,
            implies.as_deref(),
            &vars,
            config(sem.semantics, &s),
        ),
        Command::VerifyTheorem3 { sem, search: s } => {
            let report = verify_theorem3(&config(sem.semantics, &s))?;
            let failures = report.reverify();
            if !failures.is_empty() {
                return Err(Failure {
                    code: EXIT_INVARIANT,
                    message: format!("witnesses failed to re-verify: {}", failures.join(", ")),
                });
            }
            Ok((EXIT_OK, report.to_string()))
        }
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                usage(format!(
                    "{THREADS_ENV} must be a positive integer, got {value:?}"
                ))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| usage(format!("cannot start worker threads: {e}")))
}

/// Runs one invocation. Returns the exit code, stdout and stderr; stdout is
/// empty whenever the exit code signals an error.
pub fn run_cli<I, S>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                (EXIT_USAGE, String::new(), text)
            } else {
                (EXIT_OK, text, String::new())
            };
        }
    };
    let outcome = thread_pool().and_then(|pool| pool.install(|| dispatch(cli.command)));
    match outcome {
        Ok((EXIT_OK, out)) => (EXIT_OK, out, String::new()),
        // nonzero exits keep stdout empty; the partial report goes to stderr
        Ok((code, out)) => (code, String::new(), out),
        Err(f) => (f.code, String::new(), format!("error: {}\n", f.message)),
    }
}
