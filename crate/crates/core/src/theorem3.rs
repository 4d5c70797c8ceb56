//! Mechanical check of the ten conclusions attached to the 57 statement
//! patterns over a cause `X`, outcome `Y` and third variable `Z`.
//!
//! Readings used throughout:
//! * an implication `p ⇒ mutual` quantifies over every table whose extracted
//!   set contains `p`;
//! * a faithfulness claim about `p` concerns tables whose extracted set is
//!   `p` itself, or its semigraphoid closure when `p` alone is not
//!   realizable; faithfulness depends only on the extracted set, so one
//!   realization settles it;
//! * a pattern equality is checked both as equality of semigraphoid
//!   closures and as equality of the families of tables containing each
//!   side.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::catalog::{full_independence, pattern, Group, PatternId};
use crate::ci::{extract_ci_set, semigraphoid_closure, CISet, Conclusion};
use crate::dag::Dag;
use crate::dist::{JointTable, Semantics};
use crate::error::Result;
use crate::faithful::classify;
use crate::search::{Atlas, MatchKind, Realization, SearchConfig};
use crate::vars::VarSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Supported,
    Contradicted,
    Undecided,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Supported => "supported",
            Status::Contradicted => "contradicted",
            Status::Undecided => "not-decidable-within-budget",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// A set-level argument that needs no table.
    Derivation(String),
    /// A table containing `premises` whose extracted set misses `conclusion`.
    Counterexample {
        table: JointTable,
        premises: CISet,
        conclusion: Conclusion,
    },
    /// A realization of a pattern's goal set and the DAGs it is faithful to.
    Realization {
        pattern: PatternId,
        goal: CISet,
        kind: MatchKind,
        table: JointTable,
        faithful: Vec<Dag>,
    },
    /// The search ran out of candidates.
    Exhausted { examined: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub text: String,
    pub status: Status,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConclusionReport {
    pub number: u8,
    pub claims: Vec<Claim>,
    pub notes: Vec<String>,
}

impl ConclusionReport {
    /// Contradicted if any claim is, else undecided if any claim is.
    pub fn status(&self) -> Status {
        self.claims
            .iter()
            .map(|c| c.status)
            .max()
            .unwrap_or(Status::Supported)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternRow {
    pub id: PatternId,
    pub literal: CISet,
    pub closure: CISet,
    pub realization: Option<Realization>,
    /// DAGs the realization is faithful to, when one was found.
    pub faithful: Option<Vec<Dag>>,
}

impl PatternRow {
    /// The realization, if its extracted set is the pattern or its closure.
    fn goal_realization(&self) -> Option<(&Realization, &[Dag])> {
        match (&self.realization, &self.faithful) {
            (Some(r), Some(f)) if r.kind != MatchKind::Superset => Some((r, f)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem3Report {
    pub config: SearchConfig,
    pub examined: u64,
    pub distinct_sets: usize,
    pub patterns: Vec<PatternRow>,
    pub conclusions: Vec<ConclusionReport>,
    pub notes: Vec<String>,
}

impl Theorem3Report {
    pub fn pattern(&self, id: PatternId) -> &PatternRow {
        self.patterns
            .iter()
            .find(|r| r.id == id)
            .expect("all patterns present")
    }

    pub fn conclusion(&self, number: u8) -> &ConclusionReport {
        &self.conclusions[number as usize - 1]
    }

    /// Re-checks every table-backed witness on the exact path. Returns the
    /// texts of claims whose evidence fails to re-verify.
    pub fn reverify(&self) -> Vec<String> {
        let sem = self.config.semantics;
        let mut failures = Vec::new();
        for c in self.conclusions.iter().flat_map(|c| &c.claims) {
            let ok = match &c.evidence {
                Evidence::Counterexample {
                    table,
                    premises,
                    conclusion,
                } => {
                    let got = extract_ci_set(table, sem);
                    premises.is_subset(&got) && !got.holds(conclusion)
                }
                Evidence::Realization {
                    goal,
                    table,
                    faithful,
                    kind,
                    ..
                } => {
                    let got = extract_ci_set(table, sem);
                    let ok_set = match kind {
                        MatchKind::Superset => goal.is_subset(&got),
                        _ => &got == goal,
                    };
                    ok_set
                        && classify(table, sem)
                            .map(|r| &r.faithful == faithful)
                            .unwrap_or(false)
                }
                Evidence::Derivation(_) | Evidence::Exhausted { .. } => true,
            };
            if !ok {
                failures.push(c.text.clone());
            }
        }
        for row in &self.patterns {
            if let Some(r) = &row.realization {
                if !r.reverify(&row.literal, sem) {
                    failures.push(format!("realization of {}", row.id));
                }
            }
        }
        failures
    }
}

fn pid(group: Group, index: u8) -> PatternId {
    PatternId::new(group, index).expect("valid pattern")
}

fn dag_list(dags: &[Dag]) -> String {
    if dags.is_empty() {
        "none".into()
    } else {
        dags.iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Whether the semigraphoid closure of `premises` yields `c` soundly under
/// `sem`. The closure rules are sound for standard semantics; a strict
/// conclusion additionally needs every conditioning value to carry mass,
/// which strict premises conditioning on a superset guarantee.
fn derives(premises: &CISet, c: &Conclusion, sem: Semantics) -> bool {
    if !semigraphoid_closure(premises).holds(c) {
        return false;
    }
    match c {
        Conclusion::Mutual => true,
        Conclusion::Statement(st) => {
            !sem.is_strict()
                || st.is_unconditional()
                || premises.iter().any(|p| st.given().is_subset_of(p.given()))
        }
    }
}

#[derive(Clone, Copy)]
enum Faith {
    NoDag,
    SomeDag,
    Empty,
    NotEmpty,
}

struct Verifier<'a> {
    atlas: &'a Atlas,
    sem: Semantics,
    rows: BTreeMap<PatternId, PatternRow>,
}

impl Verifier<'_> {
    fn row(&self, id: PatternId) -> &PatternRow {
        &self.rows[&id]
    }

    fn implies_mutual(&self, id: PatternId) -> Claim {
        let text = format!("{id} implies mutual independence");
        let premises = pattern(id);
        if derives(&premises, &Conclusion::Mutual, self.sem) {
            return Claim {
                text,
                status: Status::Supported,
                evidence: Evidence::Derivation(format!(
                    "semigraphoid closure of {id} carries mutual independence"
                )),
            };
        }
        self.refute(text, premises, Conclusion::Mutual)
    }

    /// Looks for a counterexample to `premises ⇒ conclusion` in the atlas.
    fn refute(&self, text: String, premises: CISet, conclusion: Conclusion) -> Claim {
        match self
            .atlas
            .counterexample(&premises, &conclusion)
            .expect("same variables")
        {
            Some(table) => Claim {
                text,
                status: Status::Contradicted,
                evidence: Evidence::Counterexample {
                    table,
                    premises,
                    conclusion,
                },
            },
            None => Claim {
                text,
                status: Status::Undecided,
                evidence: Evidence::Exhausted {
                    examined: self.atlas.examined(),
                },
            },
        }
    }

    fn faithfulness(&self, id: PatternId, what: Faith) -> Claim {
        let text = match what {
            Faith::NoDag => format!("{id} is faithful to no DAG"),
            Faith::SomeDag => format!("{id} is faithful to some DAG"),
            Faith::Empty => format!("{id} is faithful to the empty DAG"),
            Faith::NotEmpty => format!("{id} is not faithful to the empty DAG"),
        };
        let row = self.row(id);
        let Some((r, faithful)) = row.goal_realization() else {
            return Claim {
                text,
                status: Status::Undecided,
                evidence: Evidence::Exhausted {
                    examined: self.atlas.examined(),
                },
            };
        };
        let to_empty = faithful.iter().any(|g| g.edge_count() == 0);
        let holds = match what {
            Faith::NoDag => faithful.is_empty(),
            Faith::SomeDag => !faithful.is_empty(),
            Faith::Empty => to_empty,
            Faith::NotEmpty => !to_empty,
        };
        Claim {
            text,
            status: if holds {
                Status::Supported
            } else {
                Status::Contradicted
            },
            evidence: Evidence::Realization {
                pattern: id,
                goal: r.extracted.clone(),
                kind: r.kind,
                table: r.table.clone(),
                faithful: faithful.to_vec(),
            },
        }
    }

    /// Both readings of `left = right`.
    fn equality(&self, left: (&str, CISet), right: (&str, CISet)) -> Vec<Claim> {
        let (ln, l) = left;
        let (rn, r) = right;
        let (lc, rc) = (semigraphoid_closure(&l), semigraphoid_closure(&r));
        let closure_claim = Claim {
            text: format!("{ln} = {rn} as closures"),
            status: if lc == rc {
                Status::Supported
            } else {
                Status::Contradicted
            },
            evidence: Evidence::Derivation(if lc == rc {
                format!("both close to {}", lc.inline())
            } else {
                format!("closures differ: {} versus {}", lc.inline(), rc.inline())
            }),
        };
        let text = format!("{ln} = {rn} as families of tables");
        let mut undecided = None;
        for (from, to) in [(&l, &r), (&r, &l)] {
            let mut needed: Vec<Conclusion> = to
                .difference(from)
                .iter()
                .map(|st| Conclusion::Statement(*st))
                .collect();
            if to.mutual() && !from.mutual() {
                needed.push(Conclusion::Mutual);
            }
            for c in needed {
                if derives(from, &c, self.sem) {
                    continue;
                }
                let claim = self.refute(text.clone(), from.clone(), c);
                if claim.status == Status::Contradicted {
                    return vec![closure_claim, claim];
                }
                undecided.get_or_insert(claim);
            }
        }
        let family_claim = undecided.unwrap_or(Claim {
            text,
            status: Status::Supported,
            evidence: Evidence::Derivation("each side derives the other".into()),
        });
        vec![closure_claim, family_claim]
    }

    fn pattern_equality(&self, a: PatternId, b: PatternId) -> Vec<Claim> {
        self.equality((&a.to_string(), pattern(a)), (&b.to_string(), pattern(b)))
    }
}

fn realize_all(atlas: &Atlas, sem: Semantics) -> Result<Vec<PatternRow>> {
    PatternId::all()
        .into_par_iter()
        .map(|id| {
            let literal = pattern(id);
            let closure = semigraphoid_closure(&literal);
            let realization = atlas.realize(&literal)?;
            let faithful = match &realization {
                Some(r) => Some(classify(&r.table, sem)?.faithful),
                None => None,
            };
            Ok(PatternRow {
                id,
                literal,
                closure,
                realization,
                faithful,
            })
        })
        .collect()
}

/// Realizes every pattern and evaluates every claim of the ten conclusions.
pub fn verify_theorem3(cfg: &SearchConfig) -> Result<Theorem3Report> {
    let vars = VarSet::xyz();
    let sem = cfg.semantics;
    let atlas = Atlas::build(&vars, cfg)?;
    let rows = realize_all(&atlas, sem)?;
    let v = Verifier {
        atlas: &atlas,
        sem,
        rows: rows.iter().map(|r| (r.id, r.clone())).collect(),
    };
    use Group::*;
    let range = |g: Group| (1..=g.size()).map(move |k| pid(g, k));
    let mut conclusions = Vec::new();

    conclusions.push(ConclusionReport {
        number: 1,
        claims: range(I)
            .map(|id| v.faithfulness(id, Faith::NoDag))
            .collect(),
        notes: vec![
            "the range runs to I:9 but only I:1 to I:8 exist; I:1 to I:8 are checked".into(),
        ],
    });

    let mut claims = vec![v.faithfulness(pid(II, 1), Faith::SomeDag)];
    claims.push(v.faithfulness(pid(II, 9), Faith::SomeDag));
    claims.extend((2..=8).map(|k| v.faithfulness(pid(II, k), Faith::NoDag)));
    conclusions.push(ConclusionReport {
        number: 2,
        claims,
        notes: vec![
            "figure labels are read as \"faithful to some DAG\"; figure structures are not used"
                .into(),
        ],
    });

    let mut claims: Vec<Claim> = range(III).map(|id| v.implies_mutual(id)).collect();
    claims.extend(range(III).map(|id| v.faithfulness(id, Faith::NotEmpty)));
    for k in 1..=9u8 {
        let l = (k - 1) % 3 + 1;
        claims.extend(v.pattern_equality(pid(III, k), pid(VI, k)));
        claims.extend(v.pattern_equality(pid(VI, k), pid(VII, l)));
    }
    conclusions.push(ConclusionReport {
        number: 3,
        claims,
        notes: Vec::new(),
    });

    let mut claims = Vec::new();
    for id in range(IV) {
        claims.extend(v.pattern_equality(id, pid(X, 1)));
    }
    claims.extend(range(IV).map(|id| v.faithfulness(id, Faith::Empty)));
    conclusions.push(ConclusionReport {
        number: 4,
        claims,
        notes: Vec::new(),
    });

    let mut claims: Vec<Claim> = range(V).map(|id| v.implies_mutual(id)).collect();
    claims.extend(range(V).map(|id| v.faithfulness(id, Faith::NotEmpty)));
    for (a, b) in [(1, 1), (2, 2), (5, 2), (6, 3), (7, 1), (9, 3)] {
        claims.extend(v.pattern_equality(pid(V, a), pid(VIII, b)));
    }
    conclusions.push(ConclusionReport {
        number: 5,
        claims,
        notes: vec![
            "V:2 and V:5 are both paired with VIII:2; each pairing is checked as written".into(),
        ],
    });

    let mut claims: Vec<Claim> = range(VI).map(|id| v.implies_mutual(id)).collect();
    claims.extend(range(VI).map(|id| v.faithfulness(id, Faith::NotEmpty)));
    for k in 1..=9u8 {
        claims.extend(v.pattern_equality(pid(VI, k), pid(IX, (k - 1) % 3 + 1)));
    }
    conclusions.push(ConclusionReport {
        number: 6,
        claims,
        notes: Vec::new(),
    });

    let mut claims = Vec::new();
    for id in range(VII) {
        claims.extend(v.pattern_equality(id, pid(X, 1)));
    }
    claims.extend(range(VII).map(|id| v.faithfulness(id, Faith::Empty)));
    conclusions.push(ConclusionReport {
        number: 7,
        claims,
        notes: Vec::new(),
    });

    let mut claims: Vec<Claim> = range(VIII).map(|id| v.implies_mutual(id)).collect();
    claims.extend(range(VIII).map(|id| v.faithfulness(id, Faith::NotEmpty)));
    conclusions.push(ConclusionReport {
        number: 8,
        claims,
        notes: Vec::new(),
    });

    let mut claims: Vec<Claim> = range(IV).map(|id| v.implies_mutual(id)).collect();
    claims.extend(range(IV).map(|id| v.faithfulness(id, Faith::NotEmpty)));
    conclusions.push(ConclusionReport {
        number: 9,
        claims,
        notes: vec!["IV:1 to IV:3 are also the subject of conclusion 4, which asserts the opposite faithfulness verdict".into()],
    });

    let x1 = pid(X, 1);
    let mut claims = v.equality(
        (&x1.to_string(), pattern(x1)),
        ("full independence", full_independence()),
    );
    claims.push(v.faithfulness(x1, Faith::Empty));
    claims.push(positive_and_mutual(v.row(x1)));
    conclusions.push(ConclusionReport {
        number: 10,
        claims,
        notes: Vec::new(),
    });

    let notes = vec![conflict_note(&v)];
    Ok(Theorem3Report {
        config: *cfg,
        examined: atlas.examined(),
        distinct_sets: atlas.distinct(),
        patterns: rows,
        conclusions,
        notes,
    })
}

fn positive_and_mutual(row: &PatternRow) -> Claim {
    let text = format!(
        "{} realization is strictly positive and mutually independent",
        row.id
    );
    match row.goal_realization() {
        Some((r, faithful)) => {
            let holds = r.table.is_strictly_positive() && r.table.is_mutually_independent();
            Claim {
                text,
                status: if holds {
                    Status::Supported
                } else {
                    Status::Contradicted
                },
                evidence: Evidence::Realization {
                    pattern: row.id,
                    goal: r.extracted.clone(),
                    kind: r.kind,
                    table: r.table.clone(),
                    faithful: faithful.to_vec(),
                },
            }
        }
        None => Claim {
            text,
            status: Status::Undecided,
            evidence: Evidence::Derivation("no realization found".into()),
        },
    }
}

fn conflict_note(v: &Verifier<'_>) -> String {
    let mut parts = Vec::new();
    for k in 1..=3 {
        let row = v.row(pid(Group::IV, k));
        parts.push(match row.goal_realization() {
            Some((r, faithful)) => format!(
                "{} realized ({}) by {} faithful to {}",
                row.id,
                r.kind.label(),
                r.table.compact(),
                dag_list(faithful)
            ),
            None => format!("{} not realized", row.id),
        });
    }
    format!(
        "conflict: conclusions 4 and 9 call IV:1 to IV:3 faithful and unfaithful to the empty DAG; \
         resolved by classification: {}",
        parts.join("; ")
    )
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Derivation(s) => write!(f, "derivation: {s}"),
            Evidence::Counterexample {
                table, conclusion, ..
            } => write!(
                f,
                "counterexample {} lacks {}",
                table.compact(),
                conclusion.format(table.vars())
            ),
            Evidence::Realization {
                pattern,
                kind,
                table,
                faithful,
                ..
            } => write!(
                f,
                "{pattern} realization ({}) {} faithful to {}",
                kind.label(),
                table.compact(),
                dag_list(faithful)
            ),
            Evidence::Exhausted { examined } => write!(f, "nothing found in {examined} tables"),
        }
    }
}

impl fmt::Display for Theorem3Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[search]")?;
        writeln!(f, "seed {}", self.config.seed)?;
        writeln!(f, "budget {}", self.config.budget)?;
        writeln!(f, "denom-bound {}", self.config.denom_bound)?;
        writeln!(f, "semantics {}", self.config.semantics)?;
        writeln!(f, "examined {}", self.examined)?;
        writeln!(f, "distinct-sets {}", self.distinct_sets)?;
        for row in &self.patterns {
            writeln!(f, "[pattern {}]", row.id)?;
            writeln!(f, "literal {}", row.literal.inline())?;
            writeln!(f, "closure {}", row.closure.inline())?;
            match &row.realization {
                Some(r) => {
                    writeln!(
                        f,
                        "realization {} #{} {}",
                        r.kind.label(),
                        r.index,
                        r.table.compact()
                    )?;
                    writeln!(f, "extracted {}", r.extracted.inline())?;
                }
                None => writeln!(f, "realization none")?,
            }
            if let Some(faithful) = &row.faithful {
                writeln!(f, "faithful {}", dag_list(faithful))?;
            }
        }
        for c in &self.conclusions {
            writeln!(f, "[conclusion {}]", c.number)?;
            writeln!(f, "status {}", c.status())?;
            for claim in &c.claims {
                writeln!(f, "claim {}: {}", claim.text, claim.status)?;
                writeln!(f, "  {}", claim.evidence)?;
            }
            for n in &c.notes {
                writeln!(f, "note {n}")?;
            }
        }
        writeln!(f, "[notes]")?;
        for n in &self.notes {
            writeln!(f, "{n}")?;
        }
        Ok(())
    }
}
