//! Partially directed graphs: CPDAGs and PC output.

use std::collections::BTreeSet;
use std::fmt;

use crate::dag::Dag;
use crate::vars::{VarSet, VarSubset};

/// A skeleton with a subset of its edges oriented.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    vars: VarSet,
    skeleton: BTreeSet<(usize, usize)>,
    directed: BTreeSet<(usize, usize)>,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Pattern {
    /// All skeleton edges undirected.
    pub fn undirected(vars: VarSet, skeleton: BTreeSet<(usize, usize)>) -> Pattern {
        let skeleton = skeleton.into_iter().map(|(a, b)| pair(a, b)).collect();
        Pattern {
            vars,
            skeleton,
            directed: BTreeSet::new(),
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn skeleton(&self) -> &BTreeSet<(usize, usize)> {
        &self.skeleton
    }

    pub fn directed(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.skeleton.contains(&pair(a, b))
    }

    pub fn is_directed(&self, from: usize, to: usize) -> bool {
        self.directed.contains(&(from, to))
    }

    pub fn is_undirected(&self, a: usize, b: usize) -> bool {
        self.adjacent(a, b) && !self.is_directed(a, b) && !self.is_directed(b, a)
    }

    fn n(&self) -> usize {
        self.vars.len()
    }

    /// Whether a directed path `from ⇝ to` exists over oriented edges.
    fn directed_path(&self, from: usize, to: usize) -> bool {
        let mut seen = VarSubset::single(from);
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for &(p, c) in &self.directed {
                if p == v && !seen.contains(c) {
                    seen = seen.with(c);
                    stack.push(c);
                }
            }
        }
        false
    }

    /// Orients an undirected edge `from → to` unless that would close a
    /// directed cycle. Returns whether the orientation was applied.
    pub fn orient(&mut self, from: usize, to: usize) -> bool {
        if !self.is_undirected(from, to) || self.directed_path(to, from) {
            return false;
        }
        self.directed.insert((from, to));
        true
    }

    /// Applies Meek's rules R1–R4 to a fixed point, visiting vertices in
    /// index order.
    pub fn apply_meek_rules(&mut self) {
        let n = self.n();
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if self.is_undirected(a, b) && self.meek_forces(a, b) && self.orient(a, b) {
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn meek_forces(&self, a: usize, b: usize) -> bool {
        let n = self.n();
        // R1: c → a -- b, c and b nonadjacent
        let r1 = (0..n).any(|c| self.is_directed(c, a) && !self.adjacent(c, b) && c != b);
        if r1 {
            return true;
        }
        // R2: a → c → b
        let r2 = (0..n).any(|c| self.is_directed(a, c) && self.is_directed(c, b));
        if r2 {
            return true;
        }
        // R3: a -- c → b, a -- d → b, c and d nonadjacent
        for c in 0..n {
            for d in c + 1..n {
                if self.is_undirected(a, c)
                    && self.is_undirected(a, d)
                    && self.is_directed(c, b)
                    && self.is_directed(d, b)
                    && !self.adjacent(c, d)
                {
                    return true;
                }
            }
        }
        // R4: a -- c → d → b, a adjacent to d, c and b nonadjacent
        for c in 0..n {
            for d in 0..n {
                if c != d
                    && self.is_undirected(a, c)
                    && self.is_directed(c, d)
                    && self.is_directed(d, b)
                    && self.adjacent(a, d)
                    && !self.adjacent(c, b)
                    && c != b
                {
                    return true;
                }
            }
        }
        false
    }

    /// Unshielded colliders `a → c ← b`, as `(a, c, b)` with `a < b`.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for &(a, c) in &self.directed {
            for &(b, c2) in &self.directed {
                if c == c2 && a < b && !self.adjacent(a, b) {
                    out.insert((a, c, b));
                }
            }
        }
        out
    }

    /// DAGs with this skeleton and these v-structures that contain every
    /// oriented edge, ordered by the bitmask of reversed undirected edges.
    pub fn consistent_dags(&self) -> Vec<Dag> {
        let colliders = self.v_structures();
        let free: Vec<(usize, usize)> = self
            .skeleton
            .iter()
            .copied()
            .filter(|&(a, b)| self.is_undirected(a, b))
            .collect();
        let mut out = Vec::new();
        for flips in 0..1usize << free.len() {
            let mut parents = vec![VarSubset::EMPTY; self.n()];
            for &(p, c) in &self.directed {
                parents[c] = parents[c].with(p);
            }
            for (k, &(a, b)) in free.iter().enumerate() {
                let (p, c) = if flips & (1 << k) == 0 {
                    (a, b)
                } else {
                    (b, a)
                };
                parents[c] = parents[c].with(p);
            }
            let dag = Dag::from_parents_unchecked(self.vars.clone(), parents);
            if dag.is_acyclic() && dag.v_structures() == colliders {
                out.push(dag);
            }
        }
        out
    }
}

impl fmt::Display for Pattern {
    /// `A--B` for undirected and `A->B` for oriented edges, sorted by pair,
    /// joined by `;`; `empty` when there are no edges.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.skeleton.is_empty() {
            return f.write_str("empty");
        }
        let parts: Vec<String> = self
            .skeleton
            .iter()
            .map(|&(a, b)| {
                let (na, nb) = (self.vars.name(a), self.vars.name(b));
                if self.is_directed(a, b) {
                    format!("{na}->{nb}")
                } else if self.is_directed(b, a) {
                    format!("{nb}->{na}")
                } else {
                    format!("{na}--{nb}")
                }
            })
            .collect();
        f.write_str(&parts.join(";"))
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({self})")
    }
}

/// The completed pattern of `g`: its skeleton with v-structures oriented and
/// Meek's rules applied.
pub fn cpdag(g: &Dag) -> Pattern {
    let mut p = Pattern::undirected(g.vars().clone(), g.skeleton());
    for (a, c, b) in g.v_structures() {
        p.directed.insert((a, c));
        p.directed.insert((b, c));
    }
    p.apply_meek_rules();
    p
}
