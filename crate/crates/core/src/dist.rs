//! Joint distributions over binary variables and exact independence tests.
//!
//! Every factorization check is cross-multiplied, so conditioning on a
//! zero-mass assignment never divides. The same kernels run over exact
//! rationals and over unnormalized integer weights (the search path); all of
//! them are homogeneous in the masses, so scaling by a common denominator does
//! not change any verdict.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::vars::{VarSet, VarSubset};

/// How a conditional statement treats conditioning assignments of zero mass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Semantics {
    /// Every conditioning assignment must have positive mass.
    #[default]
    Strict,
    /// Zero-mass conditioning assignments are skipped.
    Standard,
}

impl Semantics {
    pub fn is_strict(self) -> bool {
        matches!(self, Semantics::Strict)
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Strict => "strict",
            Semantics::Standard => "standard",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "strict" => Ok(Semantics::Strict),
            "standard" => Ok(Semantics::Standard),
            other => Err(format!(
                "unknown semantics `{other}` (expected strict|standard)"
            )),
        }
    }
}

/// Numeric types the independence kernels run over.
pub(crate) trait Mass:
    Clone + PartialEq + Zero + One + Add<Output = Self> + Mul<Output = Self>
{
}
impl Mass for Rational {}
impl Mass for u128 {}

fn accumulate<T: Mass>(slot: &mut T, value: &T) {
    let cur = std::mem::replace(slot, T::zero());
    *slot = cur + value.clone();
}

/// Marginal over `mask`, indexed by `cell & mask` in a full-length vector.
pub(crate) fn marginal<T: Mass>(weights: &[T], mask: u8) -> Vec<T> {
    let mut out = vec![T::zero(); weights.len()];
    for (cell, w) in weights.iter().enumerate() {
        accumulate(&mut out[cell & mask as usize], w);
    }
    out
}

/// Submasks of `mask`, starting from 0.
pub(crate) fn submasks(mask: u8) -> impl Iterator<Item = u8> {
    let mut next = Some(0u8);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some(cur.wrapping_sub(mask) & mask)
        };
        Some(cur)
    })
}

/// `P(a,b,s)·P(s) = P(a,s)·P(b,s)` at every admitted assignment `s`.
pub(crate) fn ci_holds<T: Mass>(
    weights: &[T],
    a: VarSubset,
    b: VarSubset,
    s: VarSubset,
    strict: bool,
) -> bool {
    let (a, b, s) = (a.bits(), b.bits(), s.bits());
    let joint = marginal(weights, a | b | s);
    let given = marginal(&joint, s);
    let with_a = marginal(&joint, a | s);
    let with_b = marginal(&joint, b | s);
    for sv in submasks(s) {
        let ps = &given[sv as usize];
        if ps.is_zero() {
            if strict {
                return false;
            }
            continue;
        }
        for av in submasks(a) {
            for bv in submasks(b) {
                let lhs = joint[(av | bv | sv) as usize].clone() * ps.clone();
                let rhs = with_a[(av | sv) as usize].clone() * with_b[(bv | sv) as usize].clone();
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// `P(v)·total^(n-1) = ∏ P(v_i)` for every full assignment `v`.
pub(crate) fn mutual_holds<T: Mass>(weights: &[T], n: usize, total: &T) -> bool {
    let singles: Vec<Vec<T>> = (0..n).map(|i| marginal(weights, 1 << i)).collect();
    let mut scale = T::one();
    for _ in 1..n {
        scale = scale * total.clone();
    }
    weights.iter().enumerate().all(|(cell, w)| {
        let rhs = (0..n).fold(T::one(), |acc, i| acc * singles[i][cell & (1 << i)].clone());
        w.clone() * scale.clone() == rhs
    })
}

/// Cross-multiplied Markov factorization against per-variable parent sets.
pub(crate) fn factorizes<T: Mass>(weights: &[T], parents: &[VarSubset], total: &T) -> bool {
    let family: Vec<Vec<T>> = parents
        .iter()
        .enumerate()
        .map(|(i, pa)| marginal(weights, pa.with(i).bits()))
        .collect();
    let parent: Vec<Vec<T>> = parents
        .iter()
        .map(|pa| marginal(weights, pa.bits()))
        .collect();
    weights.iter().enumerate().all(|(cell, w)| {
        let mut lhs = w.clone();
        let mut rhs = total.clone();
        for (i, pa) in parents.iter().enumerate() {
            let fam = pa.with(i).bits() as usize;
            lhs = lhs * parent[i][cell & pa.bits() as usize].clone();
            rhs = rhs * family[i][cell & fam].clone();
        }
        lhs == rhs
    })
}

/// An immutable joint distribution: `2^n` exact masses summing to one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JointTable {
    vars: VarSet,
    mass: Vec<Rational>,
}

impl JointTable {
    pub fn new(vars: VarSet, mass: Vec<Rational>) -> Result<JointTable> {
        if mass.len() != vars.cells() {
            return Err(Error::Precondition(format!(
                "{} masses for {} cells",
                mass.len(),
                vars.cells()
            )));
        }
        let total: Rational = mass.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::MassSum(total.to_string()));
        }
        Ok(JointTable { vars, mass })
    }

    /// Normalizes nonnegative integer weights indexed by cell.
    pub fn from_weights(vars: VarSet, weights: &[u64]) -> Result<JointTable> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(Error::MassSum("0".into()));
        }
        let mass = weights.iter().map(|&w| Rational::new(w, total)).collect();
        JointTable::new(vars, mass)
    }

    pub fn uniform(vars: VarSet) -> JointTable {
        let cells = vars.cells() as u64;
        let mass = vec![Rational::new(1, cells); cells as usize];
        JointTable { vars, mass }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn mass(&self, cell: usize) -> &Rational {
        &self.mass[cell]
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// Mass of every full assignment consistent with the partial assignment
    /// `vars ↦ values`, where bit `i` of `values` is the value of variable `i`.
    pub fn prob_mask(&self, vars: VarSubset, values: u8) -> Rational {
        let values = values & vars.bits();
        self.mass
            .iter()
            .enumerate()
            .filter(|(cell, _)| (*cell as u8) & vars.bits() == values)
            .map(|(_, m)| m.clone())
            .sum()
    }

    pub fn prob<S: AsRef<str>>(&self, assignment: &[(S, u8)]) -> Result<Rational> {
        let mut vars = VarSubset::EMPTY;
        let mut values = 0u8;
        for (name, value) in assignment {
            let idx = self.vars.index_of(name.as_ref())?;
            if *value > 1 {
                return Err(Error::Precondition(format!("value {value} is not binary")));
            }
            if vars.contains(idx) {
                return Err(Error::DuplicateVariable(name.as_ref().to_string()));
            }
            vars = vars.with(idx);
            values |= value << idx;
        }
        Ok(self.prob_mask(vars, values))
    }

    pub fn is_ci(&self, a: VarSubset, b: VarSubset, s: VarSubset, sem: Semantics) -> Result<bool> {
        check_statement_sets(&self.vars, a, b, s)?;
        Ok(ci_holds(&self.mass, a, b, s, sem.is_strict()))
    }

    pub fn is_mutually_independent(&self) -> bool {
        mutual_holds(&self.mass, self.n(), &Rational::one())
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.mass.iter().all(Rational::is_positive)
    }

    /// Reorders variables: variable `i` of the result is variable `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<JointTable> {
        let n = self.n();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&o| o >= n || std::mem::replace(&mut seen[o], true))
        {
            return Err(Error::Precondition("order is not a permutation".into()));
        }
        let names: Vec<&str> = order.iter().map(|&o| self.vars.name(o)).collect();
        let vars = VarSet::new(&names)?;
        let mut mass = vec![Rational::zero(); self.mass.len()];
        for (cell, slot) in mass.iter_mut().enumerate() {
            let mut old = 0usize;
            for (i, &o) in order.iter().enumerate() {
                if cell & (1 << i) != 0 {
                    old |= 1 << o;
                }
            }
            *slot = self.mass[old].clone();
        }
        Ok(JointTable { vars, mass })
    }

    /// Canonical dist-file text: the vars line, then nonzero cells with the
    /// first variable's bit printed first, in lexicographic bit order.
    pub fn to_dist_text(&self) -> String {
        let n = self.n();
        let mut out = format!("vars {}\n", self.vars);
        for cell in lex_cells(n) {
            let m = &self.mass[cell];
            if m.is_zero() {
                continue;
            }
            out.push('p');
            for i in 0..n {
                out.push(' ');
                out.push(if cell & (1 << i) != 0 { '1' } else { '0' });
            }
            out.push_str(&format!(" {m}\n"));
        }
        out
    }

    /// All eight (or `2^n`) masses on one line in lexicographic bit order.
    pub fn compact(&self) -> String {
        lex_cells(self.n())
            .map(|c| self.mass[c].to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_dist_text().as_bytes());
        hex::encode(&hash[..8])
    }
}

impl fmt::Debug for JointTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JointTable[{}]({})", self.vars, self.compact())
    }
}

impl fmt::Display for JointTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dist_text())
    }
}

/// Cell indices ordered so that variable 0 is the most significant printed digit.
pub(crate) fn lex_cells(n: usize) -> impl Iterator<Item = usize> {
    (0..1usize << n).map(move |k| {
        let mut cell = 0;
        for i in 0..n {
            if k & (1 << (n - 1 - i)) != 0 {
                cell |= 1 << i;
            }
        }
        cell
    })
}

pub(crate) fn check_statement_sets(
    vars: &VarSet,
    a: VarSubset,
    b: VarSubset,
    s: VarSubset,
) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySide);
    }
    if !a.is_disjoint(b) || !a.is_disjoint(s) || !b.is_disjoint(s) {
        return Err(Error::Overlap);
    }
    if !a.union(b).union(s).is_subset_of(vars.full()) {
        return Err(Error::Precondition(
            "subset outside the variable set".into(),
        ));
    }
    Ok(())
}

/// Parses the line-oriented dist format.
pub fn parse_dist(text: &str) -> Result<JointTable> {
    let mut vars: Option<VarSet> = None;
    let mut mass: Vec<Option<Rational>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("vars") => {
                if vars.is_some() {
                    return Err(syntax(line, "second vars line"));
                }
                let names: Vec<&str> = tokens.collect();
                let set = VarSet::new(&names)?;
                mass = vec![None; set.cells()];
                vars = Some(set);
            }
            Some("p") => {
                let set = vars.as_ref().ok_or(Error::MissingVars)?;
                let rest: Vec<&str> = tokens.collect();
                let Some((value, bit_tokens)) = rest.split_last() else {
                    return Err(syntax(line, "mass line without a value"));
                };
                let bits = cell_bits(line, bit_tokens)?;
                if bits.len() != set.len() {
                    return Err(Error::CellWidth {
                        line,
                        expected: set.len(),
                        found: bits.len(),
                    });
                }
                let cell = bits
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i));
                let value: Rational = value.parse()?;
                if mass[cell].is_some() {
                    let label = bits
                        .iter()
                        .map(|b| b.to_string())
                        .collect::<Vec<_>>()
                        .join(" ");
                    return Err(Error::DuplicateCell { line, cell: label });
                }
                mass[cell] = Some(value);
            }
            Some(other) => return Err(syntax(line, &format!("unexpected `{other}`"))),
            None => unreachable!(),
        }
    }
    let vars = vars.ok_or(Error::MissingVars)?;
    let mass = mass.into_iter().map(Option::unwrap_or_default).collect();
    JointTable::new(vars, mass)
}

fn syntax(line: usize, message: &str) -> Error {
    Error::Syntax {
        line,
        message: message.to_string(),
    }
}

fn cell_bits(line: usize, tokens: &[&str]) -> Result<Vec<u8>> {
    let joined: Vec<&str> = if tokens.len() == 1 && tokens[0].len() > 1 {
        tokens[0].split("").filter(|s| !s.is_empty()).collect()
    } else {
        tokens.to_vec()
    };
    joined
        .iter()
        .map(|t| match *t {
            "0" => Ok(0u8),
            "1" => Ok(1u8),
            other => Err(syntax(line, &format!("bad bit `{other}`"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz(weights: &[u64]) -> JointTable {
        JointTable::from_weights(VarSet::xyz(), weights).unwrap()
    }

    #[test]
    fn parse_uniform() {
        let mut text = String::from("# uniform\nvars X Y Z\n");
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    text.push_str(&format!("p {i} {j} {k} 1/8\n"));
                }
            }
        }
        let t = parse_dist(&text).unwrap();
        assert_eq!(t, JointTable::uniform(VarSet::xyz()));
    }

    #[test]
    fn parse_point_mass_and_roundtrip() {
        let t = parse_dist("vars X Y Z\np 0 0 0 1\n").unwrap();
        assert_eq!(t.mass(0), &Rational::one());
        assert!(t.masses()[1..].iter().all(Zero::is_zero));
        assert_eq!(parse_dist(&t.to_dist_text()).unwrap(), t);
        assert_eq!(parse_dist("vars X Y Z\np 000 1").unwrap(), t);
    }

    #[test]
    fn parse_errors() {
        let e = parse_dist("vars X Y Z\np 0 0 0 1/4\np 1 1 1 1/4\n").unwrap_err();
        assert_eq!(e, Error::MassSum("1/2".into()));
        assert_eq!(e.to_string(), "mass sum 1/2 ≠ 1");
        assert!(matches!(
            parse_dist("vars X Y Z\np 0 0 0 1/2\np 0 0 0 1/2\n"),
            Err(Error::DuplicateCell { line: 3, .. })
        ));
        assert!(matches!(
            parse_dist("vars X Y Z\np 0 0 1\n"),
            Err(Error::CellWidth {
                expected: 3,
                found: 2,
                ..
            })
        ));
        assert_eq!(parse_dist("p 0 0 0 1\n"), Err(Error::MissingVars));
        assert_eq!(parse_dist("# nothing\n\n"), Err(Error::MissingVars));
        assert!(matches!(
            parse_dist("vars X\np 0 -1\np 1 2\n"),
            Err(Error::NegativeMass(_))
        ));
        assert!(matches!(
            parse_dist("vars X\np 0 1/x\n"),
            Err(Error::BadRational(_))
        ));
        assert!(matches!(
            parse_dist("vars X\np 2 1\n"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_dist("vars X\nq 0 1\n"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn prob_sums_consistent_cells() {
        let t = JointTable::uniform(VarSet::xyz());
        assert_eq!(t.prob(&[("X", 0), ("Y", 1)]).unwrap(), Rational::new(1, 4));
        assert_eq!(t.prob::<&str>(&[]).unwrap(), Rational::one());
        assert!(matches!(
            t.prob(&[("W", 0)]),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn is_ci_argument_errors() {
        let t = JointTable::uniform(VarSet::xyz());
        let x = VarSubset::single(0);
        let y = VarSubset::single(1);
        assert_eq!(
            t.is_ci(x, x, VarSubset::EMPTY, Semantics::Strict),
            Err(Error::Overlap)
        );
        assert_eq!(t.is_ci(x, y, y, Semantics::Strict), Err(Error::Overlap));
        assert_eq!(
            t.is_ci(VarSubset::EMPTY, y, VarSubset::EMPTY, Semantics::Strict),
            Err(Error::EmptySide)
        );
    }

    #[test]
    fn integer_and_rational_kernels_agree() {
        let w = [3u64, 0, 5, 1, 2, 2, 0, 7];
        let t = xyz(&w);
        let wu: Vec<u128> = w.iter().map(|&v| v as u128).collect();
        for a in 1..8u8 {
            for b in 1..8u8 {
                for s in 0..8u8 {
                    if a & b != 0 || a & s != 0 || b & s != 0 {
                        continue;
                    }
                    for strict in [true, false] {
                        let (a, b, s) = (VarSubset(a), VarSubset(b), VarSubset(s));
                        assert_eq!(
                            ci_holds(t.masses(), a, b, s, strict),
                            ci_holds(&wu, a, b, s, strict)
                        );
                    }
                }
            }
        }
        assert_eq!(t.is_mutually_independent(), mutual_holds(&wu, 3, &20u128));
    }

    #[test]
    fn permutation_moves_cells() {
        let t = xyz(&[1, 2, 3, 4, 5, 6, 7, 8]);
        let p = t.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.vars().names(), &["Z", "X", "Y"]);
        // new cell (Z=1, X=0, Y=0) is old cell (X=0, Y=0, Z=1) = index 4
        assert_eq!(p.mass(1), t.mass(4));
        assert!(t.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn lex_cells_put_first_variable_first() {
        let cells: Vec<usize> = lex_cells(3).collect();
        assert_eq!(cells, vec![0, 4, 2, 6, 1, 5, 3, 7]);
    }
}
