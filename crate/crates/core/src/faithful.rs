//! Faithfulness verdicts and classification against every DAG on the
//! distribution's variables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::catalog::{identify, remarks, ExampleId};
use crate::ci::{extract_ci_set, CISet};
use crate::dag::{enumerate_dags, implied_ci_set, Dag, MAX_ENUM_VARS};
use crate::dist::{JointTable, Semantics};
use crate::error::{Error, Result};
use crate::vars::VarSet;

/// Whether the distribution's independencies are exactly those of `g`.
pub fn is_faithful(p: &JointTable, g: &Dag, sem: Semantics) -> Result<bool> {
    if p.vars() != g.vars() {
        return Err(Error::VarMismatch);
    }
    Ok(extract_ci_set(p, sem) == implied_ci_set(g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DagVerdict {
    Faithful,
    MarkovOnly,
    NotMarkov,
}

impl DagVerdict {
    pub fn label(self) -> &'static str {
        match self {
            DagVerdict::Faithful => "faithful",
            DagVerdict::MarkovOnly => "markov-only",
            DagVerdict::NotMarkov => "not-markov",
        }
    }

    fn of(extracted: &CISet, implied: &CISet) -> DagVerdict {
        if extracted == implied {
            DagVerdict::Faithful
        } else if implied.is_subset(extracted) {
            DagVerdict::MarkovOnly
        } else {
            DagVerdict::NotMarkov
        }
    }
}

impl fmt::Display for DagVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// All DAGs on a variable set with their implied sets and equivalence
/// classes. Built once per variable set and shared.
pub struct DagIndex {
    dags: Vec<Dag>,
    implied: Vec<CISet>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl DagIndex {
    pub fn get(vars: &VarSet) -> Result<Arc<DagIndex>> {
        static CACHE: OnceLock<Mutex<HashMap<VarSet, Arc<DagIndex>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(index) = cache.lock().unwrap().get(vars) {
            return Ok(index.clone());
        }
        let index = Arc::new(DagIndex::build(vars)?);
        cache.lock().unwrap().insert(vars.clone(), index.clone());
        Ok(index)
    }

    fn build(vars: &VarSet) -> Result<DagIndex> {
        let dags = enumerate_dags(vars)?;
        let implied: Vec<CISet> = dags.par_iter().map(implied_ci_set).collect();
        let mut class_of = Vec::with_capacity(dags.len());
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut by_set: HashMap<&CISet, usize> = HashMap::new();
        for (i, set) in implied.iter().enumerate() {
            let c = *by_set.entry(set).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[c].push(i);
            class_of.push(c);
        }
        Ok(DagIndex {
            dags,
            implied,
            class_of,
            classes,
        })
    }

    pub fn dags(&self) -> &[Dag] {
        &self.dags
    }

    pub fn implied(&self, i: usize) -> &CISet {
        &self.implied[i]
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Classes as lists of DAG positions, ordered by first member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSummary {
    pub members: Vec<Dag>,
    pub verdict: DagVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaithReport {
    pub table: JointTable,
    pub example: Option<ExampleId>,
    pub semantics: Semantics,
    pub extracted: CISet,
    /// Every enumerated DAG in enumeration order.
    pub verdicts: Vec<(Dag, DagVerdict)>,
    pub faithful: Vec<Dag>,
    pub classes: Vec<ClassSummary>,
    pub notes: Vec<String>,
}

/// Classifies `p` against every DAG on its variables.
pub fn classify(p: &JointTable, sem: Semantics) -> Result<FaithReport> {
    if p.n() > MAX_ENUM_VARS {
        return Err(Error::VariableCount(
            p.n(),
            "classification supports at most 5 variables",
        ));
    }
    let index = DagIndex::get(p.vars())?;
    let extracted = extract_ci_set(p, sem);
    let per_class: Vec<DagVerdict> = index
        .classes()
        .iter()
        .map(|members| DagVerdict::of(&extracted, index.implied(members[0])))
        .collect();
    let verdicts: Vec<(Dag, DagVerdict)> = index
        .dags()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), per_class[index.class_of(i)]))
        .collect();
    let faithful = verdicts
        .iter()
        .filter(|(_, v)| *v == DagVerdict::Faithful)
        .map(|(g, _)| g.clone())
        .collect();
    let classes = index
        .classes()
        .iter()
        .zip(&per_class)
        .map(|(members, &verdict)| ClassSummary {
            members: members.iter().map(|&i| index.dags()[i].clone()).collect(),
            verdict,
        })
        .collect();
    let example = identify(p);
    let notes = example
        .map(|id| remarks(id).iter().map(|r| r.to_string()).collect())
        .unwrap_or_default();
    Ok(FaithReport {
        table: p.clone(),
        example,
        semantics: sem,
        extracted,
        verdicts,
        faithful,
        classes,
        notes,
    })
}

fn dag_list(dags: &[Dag]) -> String {
    if dags.is_empty() {
        "none".to_string()
    } else {
        dags.iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl FaithReport {
    pub fn faithful_summary(&self) -> String {
        dag_list(&self.faithful)
    }
}

impl fmt::Display for FaithReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[distribution]")?;
        writeln!(f, "vars {}", self.table.vars())?;
        if let Some(id) = self.example {
            writeln!(f, "example {id}")?;
        }
        writeln!(f, "digest {}", self.table.digest())?;
        writeln!(f, "semantics {}", self.semantics)?;
        writeln!(f, "[extracted]")?;
        if self.extracted.is_empty() && !self.extracted.mutual() {
            writeln!(f, "none")?;
        } else {
            write!(f, "{}", self.extracted)?;
        }
        writeln!(f, "[faithful]")?;
        if self.faithful.is_empty() {
            writeln!(f, "none")?;
        }
        for g in &self.faithful {
            writeln!(f, "{g}")?;
        }
        writeln!(f, "[markov]")?;
        for (g, v) in &self.verdicts {
            writeln!(f, "{g} {v}")?;
        }
        writeln!(f, "[classes]")?;
        for (k, c) in self.classes.iter().enumerate() {
            writeln!(f, "{} {}: {}", k + 1, c.verdict, dag_list(&c.members))?;
        }
        if !self.notes.is_empty() {
            writeln!(f, "[notes]")?;
            for n in &self.notes {
                writeln!(f, "{n}")?;
            }
        }
        Ok(())
    }
}
