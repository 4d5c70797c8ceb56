//! Variable sets and subsets of them.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 6;

/// Ordered, uniquely named binary variables. Index `i` is bit `i` of a cell index.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<VarSet> {
        if names.is_empty() || names.len() > MAX_VARS {
            return Err(Error::VariableCount(names.len(), "1..=6"));
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            if !valid_name(name) {
                return Err(Error::BadName(name.to_string()));
            }
            if out.iter().any(|n| n == name) {
                return Err(Error::DuplicateVariable(name.to_string()));
            }
            out.push(name.to_string());
        }
        Ok(VarSet { names: out })
    }

    /// The `X, Y, Z` triple used throughout the example catalog.
    pub fn xyz() -> VarSet {
        VarSet::new(&["X", "Y", "Z"]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Number of cells of a joint table over these variables.
    pub fn cells(&self) -> usize {
        1 << self.names.len()
    }

    pub fn full(&self) -> VarSubset {
        VarSubset((1u8 << self.names.len()) - 1)
    }

    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<VarSubset> {
        let mut mask = VarSubset::EMPTY;
        for name in names {
            mask = mask.with(self.index_of(name.as_ref())?);
        }
        Ok(mask)
    }

    /// Parses a comma-separated list of names; surrounding whitespace is ignored.
    pub fn parse_subset(&self, text: &str) -> Result<VarSubset> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(VarSubset::EMPTY);
        }
        let mut mask = VarSubset::EMPTY;
        for part in text.split(',') {
            let idx = self.index_of(part.trim())?;
            if mask.contains(idx) {
                return Err(Error::DuplicateVariable(part.trim().to_string()));
            }
            mask = mask.with(idx);
        }
        Ok(mask)
    }

    /// Comma-joined member names in index order.
    pub fn format_subset(&self, subset: VarSubset) -> String {
        subset
            .iter()
            .map(|i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(" "))
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A subset of variable indices stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VarSubset(pub u8);

impl VarSubset {
    pub const EMPTY: VarSubset = VarSubset(0);

    pub fn single(index: usize) -> VarSubset {
        VarSubset(1 << index)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn with(self, index: usize) -> VarSubset {
        VarSubset(self.0 | (1 << index))
    }

    pub fn without(self, index: usize) -> VarSubset {
        VarSubset(self.0 & !(1 << index))
    }

    pub fn union(self, other: VarSubset) -> VarSubset {
        VarSubset(self.0 | other.0)
    }

    pub fn minus(self, other: VarSubset) -> VarSubset {
        VarSubset(self.0 & !other.0)
    }

    pub fn intersection(self, other: VarSubset) -> VarSubset {
        VarSubset(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: VarSubset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: VarSubset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..8).filter(move |&i| self.0 & (1 << i) != 0)
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets (including empty and self), by size then by bitmask.
    pub fn subsets(self) -> Vec<VarSubset> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = 0u8;
        loop {
            out.push(VarSubset(sub));
            if sub == self.0 {
                break;
            }
            sub = (sub.wrapping_sub(self.0)) & self.0;
        }
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }

    /// Subsets of the given size, in increasing bitmask order.
    pub fn subsets_of_size(self, size: usize) -> Vec<VarSubset> {
        self.subsets()
            .into_iter()
            .filter(|s| s.len() == size)
            .collect()
    }
}

impl fmt::Debug for VarSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
