//! The PC algorithm over a pluggable independence oracle.
//!
//! Edge removal follows the order-independent ("stable") variant: at each
//! conditioning size the adjacency sets are frozen before any edge of that
//! round is tested. Edges are visited in `(min, max)` index order and
//! conditioning sets by size, then bitmask.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ci::{extract_ci_set, CISet};
use crate::dag::{implied_ci_set, Dag, MAX_ENUM_VARS};
use crate::dist::{JointTable, Semantics};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::vars::{VarSet, VarSubset};

/// Answers `a ⟂ b | s` for single variables `a`, `b`.
pub trait CiOracle {
    fn independent(&self, a: usize, b: usize, s: VarSubset) -> bool;
}

impl<T: CiOracle + ?Sized> CiOracle for &T {
    fn independent(&self, a: usize, b: usize, s: VarSubset) -> bool {
        (**self).independent(a, b, s)
    }
}

/// Exact answers read off a joint table.
#[derive(Clone, Debug)]
pub struct ExactOracle {
    table: JointTable,
    semantics: Semantics,
}

impl ExactOracle {
    pub fn new(table: JointTable, semantics: Semantics) -> ExactOracle {
        ExactOracle { table, semantics }
    }

    pub fn table(&self) -> &JointTable {
        &self.table
    }
}

impl CiOracle for ExactOracle {
    fn independent(&self, a: usize, b: usize, s: VarSubset) -> bool {
        self.table
            .is_ci(
                VarSubset::single(a),
                VarSubset::single(b),
                s,
                self.semantics,
            )
            .expect("oracle query over the table's variables")
    }
}

pub fn exact_oracle(p: &JointTable, sem: Semantics) -> ExactOracle {
    ExactOracle::new(p.clone(), sem)
}

/// Separating sets recorded when skeleton edges were removed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SepsetMap(BTreeMap<(usize, usize), VarSubset>);

impl SepsetMap {
    pub fn get(&self, a: usize, b: usize) -> Option<VarSubset> {
        self.0.get(&(a.min(b), a.max(b))).copied()
    }

    fn insert(&mut self, a: usize, b: usize, s: VarSubset) {
        self.0.insert((a.min(b), a.max(b)), s);
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), VarSubset)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    vars: VarSet,
    edges: BTreeSet<(usize, usize)>,
}

impl Skeleton {
    pub fn complete(vars: VarSet) -> Skeleton {
        let n = vars.len();
        let edges = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Skeleton { vars, edges }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> VarSubset {
        (0..self.vars.len())
            .filter(|&u| u != v && self.adjacent(u, v))
            .fold(VarSubset::EMPTY, VarSubset::with)
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            Pattern::undirected(self.vars.clone(), self.edges.clone())
        )
    }
}

fn check_size(vars: &VarSet) -> Result<()> {
    if vars.len() > MAX_ENUM_VARS {
        return Err(Error::VariableCount(
            vars.len(),
            "PC supports at most 5 variables",
        ));
    }
    Ok(())
}

/// Removes edges from the complete graph by conditioning sets of growing
/// size drawn from the frozen adjacencies of either endpoint.
pub fn pc_skeleton<O: CiOracle>(oracle: &O, vars: &VarSet) -> Result<(Skeleton, SepsetMap)> {
    check_size(vars)?;
    let mut skeleton = Skeleton::complete(vars.clone());
    let mut sepsets = SepsetMap::default();
    let n = vars.len();
    for k in 0..n.saturating_sub(1) {
        let frozen: Vec<VarSubset> = (0..n).map(|v| skeleton.neighbors(v)).collect();
        let edges: Vec<(usize, usize)> = skeleton.edges.iter().copied().collect();
        let mut testable = false;
        for (a, b) in edges {
            let pools = [frozen[a].without(b), frozen[b].without(a)];
            let found = pools
                .iter()
                .filter(|pool| pool.len() >= k)
                .flat_map(|pool| pool.subsets_of_size(k))
                .inspect(|_| testable = true)
                .find(|&s| oracle.independent(a, b, s));
            if let Some(s) = found {
                skeleton.edges.remove(&(a, b));
                sepsets.insert(a, b, s);
            }
        }
        if !testable {
            break;
        }
    }
    Ok((skeleton, sepsets))
}

/// Orients unshielded colliders whose middle vertex is outside the
/// separating set, then closes under Meek's rules. Conflicting or
/// cycle-closing collider orientations are skipped.
pub fn pc_orient(skeleton: &Skeleton, sepsets: &SepsetMap) -> Pattern {
    let n = skeleton.vars.len();
    let mut pattern = Pattern::undirected(skeleton.vars.clone(), skeleton.edges.clone());
    for a in 0..n {
        for b in a + 1..n {
            if skeleton.adjacent(a, b) {
                continue;
            }
            let sep = sepsets.get(a, b).unwrap_or(VarSubset::EMPTY);
            for c in 0..n {
                if c == a || c == b || sep.contains(c) {
                    continue;
                }
                if skeleton.adjacent(a, c) && skeleton.adjacent(b, c) {
                    pattern.orient(a, c);
                    pattern.orient(b, c);
                }
            }
        }
    }
    pattern.apply_meek_rules();
    pattern
}

pub fn pc<O: CiOracle>(oracle: &O, vars: &VarSet) -> Result<Pattern> {
    let (skeleton, sepsets) = pc_skeleton(oracle, vars)?;
    Ok(pc_orient(&skeleton, &sepsets))
}

/// How one DAG consistent with the PC output compares with the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagComparison {
    pub dag: Dag,
    /// Implied by the DAG but absent from the table.
    pub missing: CISet,
    /// Present in the table but not implied by the DAG.
    pub extra: CISet,
}

impl DagComparison {
    pub fn is_match(&self) -> bool {
        self.missing.is_empty()
            && !self.missing.mutual()
            && self.extra.is_empty()
            && !self.extra.mutual()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcDiagnosis {
    pub pattern: Pattern,
    pub sepsets: SepsetMap,
    pub semantics: Semantics,
    pub extracted: CISet,
    pub comparisons: Vec<DagComparison>,
}

impl PcDiagnosis {
    /// Some DAG in the PC output's class is faithful to the table.
    pub fn is_match(&self) -> bool {
        self.comparisons.iter().any(DagComparison::is_match)
    }

    pub fn verdict(&self) -> &'static str {
        if self.is_match() {
            "MATCH"
        } else {
            "MISMATCH"
        }
    }
}

/// Runs PC on the exact oracle of `p` and compares every DAG consistent
/// with the output against the table's independencies.
pub fn pc_diagnose(p: &JointTable, sem: Semantics) -> Result<PcDiagnosis> {
    let oracle = exact_oracle(p, sem);
    let (skeleton, sepsets) = pc_skeleton(&oracle, p.vars())?;
    let pattern = pc_orient(&skeleton, &sepsets);
    let extracted = extract_ci_set(p, sem);
    let comparisons = pattern
        .consistent_dags()
        .into_iter()
        .map(|dag| {
            let implied = implied_ci_set(&dag);
            DagComparison {
                missing: implied.difference(&extracted),
                extra: extracted.difference(&implied),
                dag,
            }
        })
        .collect();
    Ok(PcDiagnosis {
        pattern,
        sepsets,
        semantics: sem,
        extracted,
        comparisons,
    })
}

impl fmt::Display for PcDiagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.pattern.vars();
        writeln!(f, "[pattern]")?;
        writeln!(f, "{}", self.pattern)?;
        writeln!(f, "[sepsets]")?;
        if self.sepsets.is_empty() {
            writeln!(f, "none")?;
        }
        for ((a, b), s) in self.sepsets.iter() {
            let given = if s.is_empty() {
                "{}".to_string()
            } else {
                vars.format_subset(s)
            };
            writeln!(f, "{} {} : {}", vars.name(a), vars.name(b), given)?;
        }
        writeln!(f, "[verdict]")?;
        writeln!(f, "{}", self.verdict())?;
        for c in &self.comparisons {
            writeln!(f, "[dag {}]", c.dag)?;
            writeln!(f, "missing {}", c.missing.inline())?;
            writeln!(f, "extra {}", c.extra.inline())?;
        }
        Ok(())
    }
}
