//! Deterministic search over small rational tables: realizing a target
//! independence set, and looking for counterexamples to implications.
//!
//! Candidates come from a fixed stream: the catalog tables (three-variable
//! targets only), then every table whose masses share a denominator
//! `D ≤ denom_bound` (weak compositions of `D` in lexicographic order, `D`
//! increasing, non-reduced ones skipped), then seeded random tables with
//! denominators up to 120. Candidates are evaluated in parallel chunks
//! on exact integer weights and folded in stream order, so results do not
//! depend on the number of worker threads.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{example, ExampleId};
use crate::ci::{
    extract_ci_set, semigraphoid_closure, statement_universe, CISet, CIStatement, Conclusion,
};
use crate::dag::{markov_weights, Dag};
use crate::dist::{ci_holds, mutual_holds, JointTable, Semantics};
use crate::error::{Error, Result};
use crate::vars::{VarSet, VarSubset};

/// Largest variable count the search supports.
pub const MAX_SEARCH_VARS: usize = 4;

const RANDOM_DENOMINATOR: u64 = 120;
const CHUNK: usize = 2048;
const MUTUAL_BIT: u32 = 127;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub seed: u64,
    /// Number of candidate tables examined, catalog and grid included.
    pub budget: u64,
    pub denom_bound: u64,
    pub semantics: Semantics,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            seed: 0,
            budget: 100_000,
            denom_bound: 8,
            semantics: Semantics::Strict,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Counterexample(JointTable),
    NoCounterexampleFound { examined: u64 },
}

/// How a realization relates to the requested set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchKind {
    /// The extracted set is the target itself.
    Exact,
    /// The extracted set is the semigraphoid closure of the target.
    Closure,
    /// Only a proper superset was found; smallest such set, earliest table.
    Superset,
}

impl MatchKind {
    pub fn label(self) -> &'static str {
        match self {
            MatchKind::Exact => "exact",
            MatchKind::Closure => "closure",
            MatchKind::Superset => "superset",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub table: JointTable,
    pub kind: MatchKind,
    pub extracted: CISet,
    /// Position of the table in the candidate stream.
    pub index: u64,
}

impl Realization {
    /// Recomputes the extracted set on the exact rational path.
    pub fn reverify(&self, target: &CISet, sem: Semantics) -> bool {
        let extracted = extract_ci_set(&self.table, sem);
        if extracted != self.extracted || !target.is_subset(&extracted) {
            return false;
        }
        match self.kind {
            MatchKind::Exact => &extracted == target,
            MatchKind::Closure => extracted == semigraphoid_closure(target),
            MatchKind::Superset => true,
        }
    }
}

/// Integer weights proportional to the masses (common denominator scaling).
pub(crate) fn integer_weights(table: &JointTable) -> Option<Vec<u64>> {
    let lcm = table
        .masses()
        .iter()
        .fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
    table
        .masses()
        .iter()
        .map(|m| (m.numer() * (&lcm / m.denom())).to_u64())
        .collect()
}

struct Universe {
    statements: Vec<CIStatement>,
    n: usize,
    strict: bool,
}

impl Universe {
    fn new(vars: &VarSet, sem: Semantics) -> Result<Universe> {
        if vars.len() > MAX_SEARCH_VARS {
            return Err(Error::VariableCount(
                vars.len(),
                "search supports at most 4 variables",
            ));
        }
        Ok(Universe {
            statements: statement_universe(vars),
            n: vars.len(),
            strict: sem.is_strict(),
        })
    }

    fn signature(&self, weights: &[u64]) -> u128 {
        let w: Vec<u128> = weights.iter().map(|&x| x as u128).collect();
        let total: u128 = w.iter().sum();
        let mut sig = 0u128;
        for (bit, st) in self.statements.iter().enumerate() {
            if ci_holds(&w, st.a(), st.b(), st.given(), self.strict) {
                sig |= 1 << bit;
            }
        }
        if mutual_holds(&w, self.n, &total) {
            sig |= 1 << MUTUAL_BIT;
        }
        sig
    }

    fn encode(&self, set: &CISet) -> u128 {
        let mut sig = 0u128;
        for (bit, st) in self.statements.iter().enumerate() {
            if set.contains(st) {
                sig |= 1 << bit;
            }
        }
        if set.mutual() {
            sig |= 1 << MUTUAL_BIT;
        }
        sig
    }

    fn encode_conclusion(&self, c: &Conclusion) -> u128 {
        match c {
            Conclusion::Mutual => 1 << MUTUAL_BIT,
            Conclusion::Statement(st) => {
                let bit = self
                    .statements
                    .iter()
                    .position(|u| u == st)
                    .expect("canonical statement");
                1 << bit
            }
        }
    }
}

/// Lexicographic successor of a weak composition; `false` after the last.
fn next_composition(parts: &mut [u64]) -> bool {
    let c = parts.len();
    let mut suffix = 0u64;
    for k in (0..c - 1).rev() {
        suffix += parts[k + 1];
        if suffix > 0 {
            parts[k] += 1;
            for p in &mut parts[k + 1..] {
                *p = 0;
            }
            parts[c - 1] = suffix - 1;
            return true;
        }
    }
    false
}

fn reduced(parts: &[u64]) -> bool {
    parts.iter().fold(0u64, |g, &p| g.gcd(&p)) == 1
}

/// The candidate stream for `n` variables.
struct Stream {
    n: usize,
    seed: u64,
    denom_bound: u64,
    catalog: Vec<Vec<u64>>,
    stage: Stage,
    random_index: u64,
}

enum Stage {
    Catalog(usize),
    Grid { d: u64, parts: Vec<u64> },
    Random,
}

impl Stream {
    fn new(n: usize, cfg: &SearchConfig) -> Stream {
        let catalog = if n == 3 {
            ExampleId::all()
                .filter_map(|id| integer_weights(&example(id)))
                .collect()
        } else {
            Vec::new()
        };
        Stream {
            n,
            seed: cfg.seed,
            denom_bound: cfg.denom_bound,
            catalog,
            stage: Stage::Catalog(0),
            random_index: 0,
        }
    }

    fn grid_start(&self, d: u64) -> Stage {
        let mut parts = vec![0; 1 << self.n];
        *parts.last_mut().unwrap() = d;
        Stage::Grid { d, parts }
    }

    fn random(&self, index: u64) -> Vec<u64> {
        let cells = 1usize << self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        loop {
            let weights = match index % 3 {
                0 => {
                    let support = rng.random_range(1..=cells);
                    let mut order: Vec<usize> = (0..cells).collect();
                    order.shuffle(&mut rng);
                    let cap = (RANDOM_DENOMINATOR / support as u64).min(30);
                    let mut w = vec![0; cells];
                    for &cell in &order[..support] {
                        w[cell] = rng.random_range(1..=cap);
                    }
                    w
                }
                1 => {
                    let cap = RANDOM_DENOMINATOR / cells as u64;
                    (0..cells).map(|_| rng.random_range(1..=cap)).collect()
                }
                _ => {
                    let g = random_dag(self.n, &mut rng);
                    let d = rng.random_range(2..=4);
                    markov_weights(&g, &mut rng, d, 0).expect("small denominators")
                }
            };
            if weights.iter().any(|&w| w > 0) {
                return weights;
            }
        }
    }
}

fn random_dag<R: Rng>(n: usize, rng: &mut R) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut parents = vec![VarSubset::EMPTY; n];
    for j in 1..n {
        for i in 0..j {
            if rng.random_bool(0.5) {
                parents[order[j]] = parents[order[j]].with(order[i]);
            }
        }
    }
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    Dag::from_parents_unchecked(VarSet::new(&names).expect("names"), parents)
}

impl Iterator for Stream {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        loop {
            match &mut self.stage {
                Stage::Catalog(i) => {
                    if let Some(w) = self.catalog.get(*i) {
                        *i += 1;
                        return Some(w.clone());
                    }
                    self.stage = if self.denom_bound >= 1 {
                        self.grid_start(1)
                    } else {
                        Stage::Random
                    };
                }
                Stage::Grid { d, parts } => {
                    let current = parts.clone();
                    let d_now = *d;
                    if !next_composition(parts) {
                        self.stage = if d_now < self.denom_bound {
                            self.grid_start(d_now + 1)
                        } else {
                            Stage::Random
                        };
                    }
                    if reduced(&current) {
                        return Some(current);
                    }
                }
                Stage::Random => {
                    let w = self.random(self.random_index);
                    self.random_index += 1;
                    return Some(w);
                }
            }
        }
    }
}

/// Scans the stream chunk by chunk; `visit` sees `(index, signature,
/// weights)` in stream order and returns `true` to stop.
fn scan<F>(universe: &Universe, cfg: &SearchConfig, mut visit: F) -> u64
where
    F: FnMut(u64, u128, &[u64]) -> bool,
{
    let mut stream = Stream::new(universe.n, cfg);
    let mut examined = 0u64;
    while examined < cfg.budget {
        let take = (cfg.budget - examined).min(CHUNK as u64) as usize;
        let chunk: Vec<Vec<u64>> = stream.by_ref().take(take).collect();
        let sigs: Vec<u128> = chunk.par_iter().map(|w| universe.signature(w)).collect();
        for (w, sig) in chunk.iter().zip(sigs) {
            let index = examined;
            examined += 1;
            if visit(index, sig, w) {
                return examined;
            }
        }
    }
    examined
}

/// Every distinct extracted set seen in one pass of the stream, keyed to the
/// first table that produced it.
pub struct Atlas {
    vars: VarSet,
    semantics: Semantics,
    universe: Universe,
    first: HashMap<u128, (u64, Vec<u64>)>,
    examined: u64,
}

impl Atlas {
    pub fn build(vars: &VarSet, cfg: &SearchConfig) -> Result<Atlas> {
        if cfg.budget == 0 {
            return Err(Error::ZeroBudget);
        }
        let universe = Universe::new(vars, cfg.semantics)?;
        let mut first: HashMap<u128, (u64, Vec<u64>)> = HashMap::new();
        let examined = scan(&universe, cfg, |index, sig, w| {
            first.entry(sig).or_insert_with(|| (index, w.to_vec()));
            false
        });
        Ok(Atlas {
            vars: vars.clone(),
            semantics: cfg.semantics,
            universe,
            first,
            examined,
        })
    }

    pub fn examined(&self) -> u64 {
        self.examined
    }

    /// Number of distinct extracted sets observed.
    pub fn distinct(&self) -> usize {
        self.first.len()
    }

    fn table(&self, weights: &[u64]) -> JointTable {
        JointTable::from_weights(self.vars.clone(), weights).expect("nonzero weights")
    }

    fn lookup(&self, sig: u128) -> Option<&(u64, Vec<u64>)> {
        self.first.get(&sig)
    }

    pub fn realize(&self, target: &CISet) -> Result<Option<Realization>> {
        if target.vars() != &self.vars {
            return Err(Error::VarMismatch);
        }
        let want = self.universe.encode(target);
        let closure = self.universe.encode(&semigraphoid_closure(target));
        let found = if let Some(hit) = self.lookup(want) {
            Some((MatchKind::Exact, hit))
        } else if let Some(hit) = self.lookup(closure) {
            Some((MatchKind::Closure, hit))
        } else {
            self.first
                .iter()
                .filter(|(sig, _)| **sig & want == want)
                .min_by_key(|(sig, (index, _))| (sig.count_ones(), *index))
                .map(|(_, hit)| (MatchKind::Superset, hit))
        };
        Ok(found.map(|(kind, (index, weights))| {
            let table = self.table(weights);
            let extracted = extract_ci_set(&table, self.semantics);
            Realization {
                table,
                kind,
                extracted,
                index: *index,
            }
        }))
    }

    /// Earliest table satisfying every premise but not the conclusion.
    pub fn counterexample(
        &self,
        premises: &CISet,
        conclusion: &Conclusion,
    ) -> Result<Option<JointTable>> {
        if premises.vars() != &self.vars {
            return Err(Error::VarMismatch);
        }
        let want = self.universe.encode(premises);
        let not = self.universe.encode_conclusion(conclusion);
        let hit = self
            .first
            .iter()
            .filter(|(sig, _)| **sig & want == want && **sig & not == 0)
            .min_by_key(|(_, (index, _))| *index);
        Ok(hit
            .map(|(_, (_, w))| self.table(w))
            .filter(|t| refutes(t, premises, conclusion, self.semantics)))
    }
}

fn refutes(table: &JointTable, premises: &CISet, conclusion: &Conclusion, sem: Semantics) -> bool {
    let extracted = extract_ci_set(table, sem);
    premises.is_subset(&extracted) && !extracted.holds(conclusion)
}

/// Searches for a table whose independencies include `premises` but not
/// `conclusion`. A miss is reported with the number of tables examined.
pub fn check_implication(
    premises: &CISet,
    conclusion: &Conclusion,
    cfg: &SearchConfig,
) -> Result<Verdict> {
    if cfg.budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if let Conclusion::Statement(st) = conclusion {
        crate::ci::check_statement(premises.vars(), st)?;
    }
    let universe = Universe::new(premises.vars(), cfg.semantics)?;
    let want = universe.encode(premises);
    let not = universe.encode_conclusion(conclusion);
    let mut found = None;
    let examined = scan(&universe, cfg, |_, sig, w| {
        if sig & want == want && sig & not == 0 {
            found = Some(w.to_vec());
            return true;
        }
        false
    });
    match found {
        Some(w) => {
            let table = JointTable::from_weights(premises.vars().clone(), &w)?;
            if !refutes(&table, premises, conclusion, cfg.semantics) {
                return Err(Error::Precondition(
                    "counterexample failed exact re-verification".into(),
                ));
            }
            Ok(Verdict::Counterexample(table))
        }
        None => Ok(Verdict::NoCounterexampleFound { examined }),
    }
}

/// Looks for a table realizing `target`: exactly, else its semigraphoid
/// closure, else the smallest superset seen.
pub fn search_distribution(target: &CISet, cfg: &SearchConfig) -> Result<Option<Realization>> {
    let found = Atlas::build(target.vars(), cfg)?.realize(target)?;
    if let Some(r) = &found {
        if !r.reverify(target, cfg.semantics) {
            return Err(Error::Precondition(
                "realization failed exact re-verification".into(),
            ));
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::parse_conclusion;

    fn v() -> VarSet {
        VarSet::xyz()
    }

    fn cfg(budget: u64) -> SearchConfig {
        SearchConfig {
            budget,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn compositions_in_lex_order() {
        let mut parts = vec![0, 0, 2];
        let mut seen = vec![parts.clone()];
        while next_composition(&mut parts) {
            seen.push(parts.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0]
            ]
        );
    }

    #[test]
    fn stream_prefix() {
        let c = cfg(100);
        let s: Vec<Vec<u64>> = Stream::new(3, &c).take(19).collect();
        assert_eq!(s[0], vec![1; 8]);
        // then the eight point masses
        assert_eq!(s[10], vec![0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(s[17], vec![1, 0, 0, 0, 0, 0, 0, 0]);
        // the D = 2 grid skips the non-reduced (0,…,0,2)
        assert_eq!(s[18], vec![0, 0, 0, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn grid_sizes() {
        // reduced weak compositions of D ≤ 2 into 8 parts: 8 + (36 − 8)
        let c = SearchConfig {
            denom_bound: 2,
            budget: 10 + 36,
            ..SearchConfig::default()
        };
        let mut s = Stream::new(3, &c);
        let grid: Vec<Vec<u64>> = s.by_ref().skip(10).take(36).collect();
        assert!(grid.iter().all(|w| w.iter().sum::<u64>() <= 2));
        assert_eq!(
            grid.iter().filter(|w| w.iter().sum::<u64>() == 2).count(),
            28
        );
        // only the non-reduced (2,0,…,0) remains before the random stage
        assert_eq!(s.next().unwrap().len(), 8);
        assert!(matches!(s.stage, Stage::Random));
    }

    #[test]
    fn random_stream_is_seeded() {
        assert_eq!(
            Stream::new(3, &cfg(1)).random(5),
            Stream::new(3, &cfg(1)).random(5)
        );
        let other = SearchConfig { seed: 9, ..cfg(1) };
        let diff =
            (0..30).any(|i| Stream::new(3, &cfg(1)).random(i) != Stream::new(3, &other).random(i));
        assert!(diff);
        for i in 0..300 {
            let w = Stream::new(3, &cfg(1)).random(i);
            assert!(w.iter().sum::<u64>() <= 120, "{w:?}");
        }
    }

    #[test]
    fn signatures_match_exact_extraction() {
        let u = Universe::new(&v(), Semantics::Strict).unwrap();
        for w in Stream::new(3, &cfg(1)).take(400) {
            let table = JointTable::from_weights(v(), &w).unwrap();
            assert_eq!(
                u.signature(&w),
                u.encode(&extract_ci_set(&table, Semantics::Strict)),
                "{w:?}"
            );
        }
    }

    #[test]
    fn intersection_counterexample() {
        let premises = CISet::parse("X _||_ Y | Z; X _||_ Z | Y", &v()).unwrap();
        let c = parse_conclusion("X _||_ Y,Z", &v()).unwrap();
        match check_implication(&premises, &c, &cfg(1000)).unwrap() {
            Verdict::Counterexample(t) => {
                let got = extract_ci_set(&t, Semantics::Strict);
                assert!(premises.is_subset(&got));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sound_implications_survive() {
        let premises = CISet::parse("X _||_ Y,Z", &v()).unwrap();
        let c = parse_conclusion("X _||_ Y", &v()).unwrap();
        assert_eq!(
            check_implication(&premises, &c, &cfg(3000)).unwrap(),
            Verdict::NoCounterexampleFound { examined: 3000 }
        );
        let premises = CISet::parse("X _||_ Y; X _||_ Z; Y _||_ Z; X _||_ Y | Z", &v()).unwrap();
        assert!(matches!(
            check_implication(&premises, &Conclusion::Mutual, &cfg(3000)).unwrap(),
            Verdict::NoCounterexampleFound { .. }
        ));
    }

    #[test]
    fn zero_budget_and_mismatch() {
        let premises = CISet::empty(v());
        assert!(matches!(
            check_implication(&premises, &Conclusion::Mutual, &cfg(0)),
            Err(Error::ZeroBudget)
        ));
        let other = VarSet::new(&["A", "B", "C"]).unwrap();
        let atlas = Atlas::build(&other, &cfg(10)).unwrap();
        assert!(matches!(atlas.realize(&premises), Err(Error::VarMismatch)));
    }

    #[test]
    fn realizations() {
        let target = CISet::parse("X _||_ Y | Z; X _||_ Z | Y", &v()).unwrap();
        let r = search_distribution(&target, &cfg(2000)).unwrap().unwrap();
        assert_eq!(r.kind, MatchKind::Exact);
        assert_eq!(r.extracted, target);
        // the pairwise-only set first appears as the second catalog table
        let target = CISet::parse("X _||_ Y; X _||_ Z; Y _||_ Z", &v()).unwrap();
        let r = search_distribution(&target, &cfg(2000)).unwrap().unwrap();
        assert_eq!((r.kind, r.index), (MatchKind::Exact, 1));
    }

    #[test]
    fn integer_weights_of_catalog() {
        let w = integer_weights(&example(ExampleId::new(3).unwrap())).unwrap();
        assert_eq!(w, vec![30, 15, 10, 5, 32, 16, 8, 4]);
    }
}
