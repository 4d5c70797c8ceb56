//! Labeled DAGs over a variable set, d-separation and Markov checks.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ci::{extract_ci_set, statement_universe, CISet, CIStatement};
use crate::dist::{check_statement_sets, factorizes, JointTable, Semantics};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::vars::{VarSet, VarSubset};

pub const MAX_ENUM_VARS: usize = 5;

/// A directed acyclic graph stored as one parent mask per vertex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    vars: VarSet,
    parents: Vec<VarSubset>,
}

impl Dag {
    pub fn empty(vars: VarSet) -> Dag {
        let n = vars.len();
        Dag {
            vars,
            parents: vec![VarSubset::EMPTY; n],
        }
    }

    /// Builds from `(parent, child)` index pairs.
    pub fn new(vars: VarSet, edges: &[(usize, usize)]) -> Result<Dag> {
        let mut dag = Dag::empty(vars);
        for &(p, c) in edges {
            let n = dag.vars.len();
            if p >= n || c >= n {
                return Err(Error::Precondition(format!(
                    "edge ({p}, {c}) outside {n} variables"
                )));
            }
            if p == c {
                return Err(Error::SelfLoop(dag.vars.name(p).to_string()));
            }
            if dag.parents[c].contains(p) || dag.parents[p].contains(c) {
                return Err(Error::DuplicateEdge(format!(
                    "{}->{}",
                    dag.vars.name(p),
                    dag.vars.name(c)
                )));
            }
            dag.parents[c] = dag.parents[c].with(p);
        }
        if let Some(v) = dag.cycle_vertex() {
            return Err(Error::Cycle(dag.vars.name(v).to_string()));
        }
        Ok(dag)
    }

    pub(crate) fn from_parents_unchecked(vars: VarSet, parents: Vec<VarSubset>) -> Dag {
        Dag { vars, parents }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn parents(&self, v: usize) -> VarSubset {
        self.parents[v]
    }

    pub fn parent_sets(&self) -> &[VarSubset] {
        &self.parents
    }

    pub fn children(&self, v: usize) -> VarSubset {
        (0..self.n())
            .filter(|&c| self.parents[c].contains(v))
            .fold(VarSubset::EMPTY, VarSubset::with)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].contains(from)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Edges sorted by (parent, child).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.n())
            .flat_map(|c| self.parents[c].iter().map(move |p| (p, c)))
            .collect();
        out.sort();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    /// Unordered adjacent pairs `(i, j)` with `i < j`.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.edges()
            .into_iter()
            .map(|(p, c)| (p.min(c), p.max(c)))
            .collect()
    }

    /// Unshielded colliders `(a, c, b)` with `a < b`: `a → c ← b`, `a`, `b` nonadjacent.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for c in 0..self.n() {
            let pa = self.parents[c].indices();
            for (i, &a) in pa.iter().enumerate() {
                for &b in &pa[i + 1..] {
                    if !self.adjacent(a, b) {
                        out.insert((a, c, b));
                    }
                }
            }
        }
        out
    }

    /// `seeds` together with all their ancestors.
    pub fn ancestral_closure(&self, seeds: VarSubset) -> VarSubset {
        let mut out = seeds;
        let mut frontier: Vec<usize> = seeds.indices();
        while let Some(v) = frontier.pop() {
            for p in self.parents[v].iter() {
                if !out.contains(p) {
                    out = out.with(p);
                    frontier.push(p);
                }
            }
        }
        out
    }

    pub fn descendants(&self, v: usize) -> VarSubset {
        let mut out = VarSubset::EMPTY;
        let mut frontier = vec![v];
        while let Some(u) = frontier.pop() {
            for c in self.children(u).iter() {
                if !out.contains(c) {
                    out = out.with(c);
                    frontier.push(c);
                }
            }
        }
        out
    }

    fn cycle_vertex(&self) -> Option<usize> {
        // Kahn's algorithm; anything left over sits on or behind a cycle
        let n = self.n();
        let mut indegree: Vec<usize> = self.parents.iter().map(|p| p.len()).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut done = 0;
        while let Some(v) = queue.pop_front() {
            done += 1;
            for c in self.children(v).iter() {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if done == n {
            None
        } else {
            (0..n).find(|&v| indegree[v] > 0 && self.descendants(v).contains(v))
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.cycle_vertex().is_none()
    }
}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        if edges.is_empty() {
            return f.write_str("empty");
        }
        let parts: Vec<String> = edges
            .iter()
            .map(|&(p, c)| format!("{}->{}", self.vars.name(p), self.vars.name(c)))
            .collect();
        f.write_str(&parts.join(";"))
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag({self})")
    }
}

/// Parses `empty` or `A->B;B->C` over the given variables.
pub fn parse_dag(text: &str, vars: &VarSet) -> Result<Dag> {
    let text = text.trim();
    if text == "empty" {
        return Ok(Dag::empty(vars.clone()));
    }
    let mut edges = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (p, c) = part.split_once("->").ok_or_else(|| Error::Syntax {
            line: 1,
            message: format!("expected `A->B`, found `{part}`"),
        })?;
        edges.push((vars.index_of(p.trim())?, vars.index_of(c.trim())?));
    }
    if edges.is_empty() {
        return Err(Error::Syntax {
            line: 1,
            message: "empty DAG spec (use `empty`)".into(),
        });
    }
    Dag::new(vars.clone(), &edges)
}

/// All labeled DAGs on `vars` (at most five variables). Each unordered pair
/// carries a base-3 digit (absent, low→high, high→low); codes are visited in
/// increasing order with the first pair least significant, so the empty graph
/// comes first.
pub fn enumerate_dags(vars: &VarSet) -> Result<Vec<Dag>> {
    let n = vars.len();
    if n > MAX_ENUM_VARS {
        return Err(Error::VariableCount(n, "1..=5 for enumeration"));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut parents = vec![VarSubset::EMPTY; n];
        let mut c = code;
        for &(i, j) in &pairs {
            match c % 3 {
                1 => parents[j] = parents[j].with(i),
                2 => parents[i] = parents[i].with(j),
                _ => {}
            }
            c /= 3;
        }
        let dag = Dag::from_parents_unchecked(vars.clone(), parents);
        if dag.is_acyclic() {
            out.push(dag);
        }
    }
    Ok(out)
}

/// d-separation of `a` and `b` given `s`: `a` and `b` are disconnected in the
/// moral graph of the ancestral set of `a ∪ b ∪ s` once `s` is removed.
pub fn d_separated(g: &Dag, a: VarSubset, b: VarSubset, s: VarSubset) -> Result<bool> {
    check_statement_sets(g.vars(), a, b, s)?;
    Ok(d_separated_unchecked(g, a, b, s))
}

pub(crate) fn d_separated_unchecked(g: &Dag, a: VarSubset, b: VarSubset, s: VarSubset) -> bool {
    let keep = g.ancestral_closure(a.union(b).union(s));
    let n = g.n();
    let mut adj = vec![VarSubset::EMPTY; n];
    for v in keep.iter() {
        let pa = g.parents(v);
        for p in pa.iter() {
            adj[v] = adj[v].with(p);
            adj[p] = adj[p].with(v);
        }
        for p in pa.iter() {
            for q in pa.iter() {
                if p != q {
                    adj[p] = adj[p].with(q);
                }
            }
        }
    }
    let mut seen = a;
    let mut frontier = a.indices();
    while let Some(v) = frontier.pop() {
        for w in adj[v].minus(s).intersection(keep).iter() {
            if b.contains(w) {
                return false;
            }
            if !seen.contains(w) {
                seen = seen.with(w);
                frontier.push(w);
            }
        }
    }
    true
}

/// `I_G`: every statement of the universe that `g` d-separates. The mutual
/// flag is set exactly for the edgeless graph.
pub fn implied_ci_set(g: &Dag) -> CISet {
    let vars = g.vars().clone();
    let statements: Vec<CIStatement> = statement_universe(&vars)
        .into_iter()
        .filter(|st| d_separated_unchecked(g, st.a(), st.b(), st.given()))
        .collect();
    CISet::from_statements(vars, statements, g.edge_count() == 0)
}

fn same_vars(t: &JointTable, g: &Dag) -> Result<()> {
    if t.vars() != g.vars() {
        Err(Error::VarMismatch)
    } else {
        Ok(())
    }
}

/// Global Markov check: `I_G ⊆ I(P)` under `sem`.
pub fn markov_by_dsep(t: &JointTable, g: &Dag, sem: Semantics) -> Result<bool> {
    same_vars(t, g)?;
    Ok(implied_ci_set(g).is_subset(&extract_ci_set(t, sem)))
}

/// Cross-multiplied factorization `P(v)·∏P(pa_i) = ∏P(v_i, pa_i)`.
pub fn markov_by_factorization(t: &JointTable, g: &Dag) -> Result<bool> {
    same_vars(t, g)?;
    Ok(factorizes(t.masses(), g.parent_sets(), &Rational::one()))
}

/// Groups DAGs by equal implied independence sets; classes appear in order
/// of their first member and members keep input order.
pub fn markov_equivalence_classes(dags: &[Dag]) -> Result<Vec<Vec<Dag>>> {
    let Some(first) = dags.first() else {
        return Ok(Vec::new());
    };
    let mut classes: Vec<Vec<Dag>> = Vec::new();
    let mut index: HashMap<CISet, usize> = HashMap::new();
    for g in dags {
        if g.vars() != first.vars() {
            return Err(Error::VarMismatch);
        }
        let key = implied_ci_set(g);
        match index.get(&key) {
            Some(&k) => classes[k].push(g.clone()),
            None => {
                index.insert(key, classes.len());
                classes.push(vec![g.clone()]);
            }
        }
    }
    Ok(classes)
}

/// A strictly positive table built by factorization along `g`, each
/// `P(v_i = 1 | pa)` drawn uniformly from `{1/d, …, (d−1)/d}`. Parameters are
/// drawn per vertex in index order, parent assignments in increasing mask order.
pub fn random_markov_distribution(g: &Dag, seed: u64, denom_bound: u64) -> Result<JointTable> {
    if denom_bound < 2 {
        return Err(Error::Precondition(
            "denominator bound must be at least 2".into(),
        ));
    }
    let weights = markov_weights(g, &mut ChaCha8Rng::seed_from_u64(seed), denom_bound, 1)?;
    JointTable::from_weights(g.vars().clone(), &weights)
}

/// Integer weights of a factorized table with total `d^n`; CPT numerators are
/// drawn from `low..=d-low`.
pub(crate) fn markov_weights<R: Rng>(g: &Dag, rng: &mut R, d: u64, low: u64) -> Result<Vec<u64>> {
    let n = g.n();
    if d.checked_pow(n as u32).is_none() {
        return Err(Error::Precondition(format!("{d}^{n} overflows")));
    }
    // ones[i][pa_assignment] = numerator of P(v_i = 1 | pa)
    let mut ones: Vec<HashMap<u8, u64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut table = HashMap::new();
        for pa in crate::dist::submasks(g.parents(i).bits()) {
            table.insert(pa, rng.random_range(low..=d - low));
        }
        ones.push(table);
    }
    let cells = 1usize << n;
    Ok((0..cells)
        .map(|cell| {
            (0..n).fold(1u64, |acc, i| {
                let pa = (cell as u8) & g.parents(i).bits();
                let k = ones[i][&pa];
                acc * if cell & (1 << i) != 0 { k } else { d - k }
            })
        })
        .collect())
}
