//! Conditional-independence statements, extracted independence sets and
//! closure under the semigraphoid rules.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::dist::{check_statement_sets, ci_holds, JointTable, Semantics};
use crate::error::{Error, Result};
use crate::vars::{VarSet, VarSubset};

/// `A ⟂ B | S` in canonical orientation: the sorted indices of `A` precede
/// those of `B` lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CIStatement {
    a: VarSubset,
    b: VarSubset,
    s: VarSubset,
}

impl CIStatement {
    pub fn new(a: VarSubset, b: VarSubset, s: VarSubset) -> Result<CIStatement> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySide);
        }
        if !a.is_disjoint(b) || !a.is_disjoint(s) || !b.is_disjoint(s) {
            return Err(Error::Overlap);
        }
        Ok(CIStatement::canonical(a, b, s))
    }

    fn canonical(a: VarSubset, b: VarSubset, s: VarSubset) -> CIStatement {
        if a.iter().cmp(b.iter()) == Ordering::Greater {
            CIStatement { a: b, b: a, s }
        } else {
            CIStatement { a, b, s }
        }
    }

    /// Builds from comma-separated name lists, e.g. `("X", "Y,Z", "")`.
    pub fn from_names(vars: &VarSet, a: &str, b: &str, s: &str) -> Result<CIStatement> {
        CIStatement::new(
            vars.parse_subset(a)?,
            vars.parse_subset(b)?,
            vars.parse_subset(s)?,
        )
    }

    pub fn a(&self) -> VarSubset {
        self.a
    }

    pub fn b(&self) -> VarSubset {
        self.b
    }

    pub fn given(&self) -> VarSubset {
        self.s
    }

    pub fn is_unconditional(&self) -> bool {
        self.s.is_empty()
    }

    pub fn holds_in(&self, table: &JointTable, sem: Semantics) -> bool {
        ci_holds(table.masses(), self.a, self.b, self.s, sem.is_strict())
    }

    pub fn display<'a>(&'a self, vars: &'a VarSet) -> impl fmt::Display + 'a {
        StatementDisplay { st: self, vars }
    }

    pub fn format(&self, vars: &VarSet) -> String {
        self.display(vars).to_string()
    }
}

impl Ord for CIStatement {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.a.len() + self.b.len())
            .cmp(&(other.a.len() + other.b.len()))
            .then(self.s.len().cmp(&other.s.len()))
            .then_with(|| self.a.iter().cmp(other.a.iter()))
            .then_with(|| self.b.iter().cmp(other.b.iter()))
            .then_with(|| self.s.iter().cmp(other.s.iter()))
    }
}

impl PartialOrd for CIStatement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct StatementDisplay<'a> {
    st: &'a CIStatement,
    vars: &'a VarSet,
}

impl fmt::Display for StatementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} _||_ {}",
            self.vars.format_subset(self.st.a),
            self.vars.format_subset(self.st.b)
        )?;
        if !self.st.s.is_empty() {
            write!(f, " | {}", self.vars.format_subset(self.st.s))?;
        }
        Ok(())
    }
}

/// The right-hand side of an implication query.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Conclusion {
    Statement(CIStatement),
    /// Mutual independence of all variables.
    Mutual,
}

impl Conclusion {
    pub fn format(&self, vars: &VarSet) -> String {
        match self {
            Conclusion::Statement(st) => st.format(vars),
            Conclusion::Mutual => "mutual".into(),
        }
    }
}

/// Parses `X _||_ Y`, `X _||_ Y | Z`, `X _||_ Y,Z` or `mutual`.
pub fn parse_conclusion(text: &str, vars: &VarSet) -> Result<Conclusion> {
    let text = text.trim();
    if text == "mutual" {
        return Ok(Conclusion::Mutual);
    }
    let bad = |m: &str| Error::Syntax {
        line: 1,
        message: format!("{m} in statement `{text}`"),
    };
    let (left, right) = text
        .split_once("_||_")
        .ok_or_else(|| bad("missing `_||_`"))?;
    let (b, s) = match right.split_once('|') {
        Some((b, s)) => {
            if s.trim().is_empty() {
                return Err(bad("empty conditioning set"));
            }
            (b, s)
        }
        None => (right, ""),
    };
    if left.trim().is_empty() || b.trim().is_empty() {
        return Err(Error::EmptySide);
    }
    Ok(Conclusion::Statement(CIStatement::from_names(
        vars, left, b, s,
    )?))
}

pub fn parse_statement(text: &str, vars: &VarSet) -> Result<CIStatement> {
    match parse_conclusion(text, vars)? {
        Conclusion::Statement(st) => Ok(st),
        Conclusion::Mutual => Err(Error::Syntax {
            line: 1,
            message: "`mutual` is not an A _||_ B | S statement".into(),
        }),
    }
}

/// A canonically ordered set of statements plus the mutual-independence flag.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CISet {
    vars: VarSet,
    statements: BTreeSet<CIStatement>,
    mutual: bool,
}

impl CISet {
    pub fn empty(vars: VarSet) -> CISet {
        CISet {
            vars,
            statements: BTreeSet::new(),
            mutual: false,
        }
    }

    pub fn from_statements<I: IntoIterator<Item = CIStatement>>(
        vars: VarSet,
        statements: I,
        mutual: bool,
    ) -> CISet {
        CISet {
            vars,
            statements: statements.into_iter().collect(),
            mutual,
        }
    }

    /// Parses one statement per line or `;`-separated; `mutual` sets the flag.
    pub fn parse(text: &str, vars: &VarSet) -> Result<CISet> {
        let mut set = CISet::empty(vars.clone());
        for part in text.split(['\n', ';']) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            match parse_conclusion(part, vars)? {
                Conclusion::Statement(st) => {
                    set.statements.insert(st);
                }
                Conclusion::Mutual => set.mutual = true,
            }
        }
        Ok(set)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn mutual(&self) -> bool {
        self.mutual
    }

    pub fn set_mutual(&mut self, mutual: bool) {
        self.mutual = mutual;
    }

    pub fn insert(&mut self, st: CIStatement) -> bool {
        self.statements.insert(st)
    }

    pub fn contains(&self, st: &CIStatement) -> bool {
        self.statements.contains(st)
    }

    pub fn holds(&self, c: &Conclusion) -> bool {
        match c {
            Conclusion::Statement(st) => self.contains(st),
            Conclusion::Mutual => self.mutual,
        }
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty() && !self.mutual
    }

    pub fn iter(&self) -> impl Iterator<Item = &CIStatement> {
        self.statements.iter()
    }

    pub fn statements(&self) -> &BTreeSet<CIStatement> {
        &self.statements
    }

    /// Statement-wise containment; a set with the mutual flag is only
    /// contained in sets that also carry it.
    pub fn is_subset(&self, other: &CISet) -> bool {
        self.statements.is_subset(&other.statements) && (!self.mutual || other.mutual)
    }

    /// Statements (and the flag) present in `self` but absent from `other`.
    pub fn difference(&self, other: &CISet) -> CISet {
        CISet {
            vars: self.vars.clone(),
            statements: self
                .statements
                .difference(&other.statements)
                .copied()
                .collect(),
            mutual: self.mutual && !other.mutual,
        }
    }

    /// The set on one line, statements joined by `; `, or `none`.
    pub fn inline(&self) -> String {
        let mut parts: Vec<String> = self
            .statements
            .iter()
            .map(|s| s.format(&self.vars))
            .collect();
        if self.mutual {
            parts.push("mutual".into());
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("; ")
        }
    }
}

impl fmt::Display for CISet {
    /// One statement per line in canonical order, `mutual` last.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for st in &self.statements {
            writeln!(f, "{}", st.display(&self.vars))?;
        }
        if self.mutual {
            writeln!(f, "mutual")?;
        }
        Ok(())
    }
}

/// Every canonical `A ⟂ B | S` over the variables, in canonical order.
pub fn statement_universe(vars: &VarSet) -> Vec<CIStatement> {
    let n = vars.len();
    let mut out = Vec::new();
    // each variable is unused (0), in A (1), in B (2) or in S (3)
    for code in 0..4usize.pow(n as u32) {
        let (mut a, mut b, mut s) = (VarSubset::EMPTY, VarSubset::EMPTY, VarSubset::EMPTY);
        let mut c = code;
        for i in 0..n {
            match c % 4 {
                1 => a = a.with(i),
                2 => b = b.with(i),
                3 => s = s.with(i),
                _ => {}
            }
            c /= 4;
        }
        if a.is_empty() || b.is_empty() || a.iter().cmp(b.iter()) == Ordering::Greater {
            continue;
        }
        out.push(CIStatement { a, b, s });
    }
    out.sort();
    out
}

/// `I(P)`: every statement of the universe that holds under `sem`, with the
/// mutual flag from the direct product test.
pub fn extract_ci_set(table: &JointTable, sem: Semantics) -> CISet {
    let vars = table.vars().clone();
    let statements: BTreeSet<CIStatement> = statement_universe(&vars)
        .into_iter()
        .filter(|st| st.holds_in(table, sem))
        .collect();
    let mutual = table.is_mutually_independent();
    let set = CISet {
        vars,
        statements,
        mutual,
    };
    debug_assert_eq!(mutual, derived_mutual(&set));
    set
}

/// Mutual independence read off unconditional statements:
/// `X_0 ⟂ (X_1..)`, `X_1 ⟂ (X_2..)`, … all present.
pub fn derived_mutual(set: &CISet) -> bool {
    let n = set.vars.len();
    (0..n.saturating_sub(1)).all(|i| {
        let rest = VarSubset(set.vars.full().bits() & !((1u8 << (i + 1)) - 1));
        set.contains(&CIStatement::canonical(
            VarSubset::single(i),
            rest,
            VarSubset::EMPTY,
        ))
    })
}

fn close(set: &CISet, intersection: bool) -> CISet {
    let vars = set.vars.clone();
    let mut known: HashSet<CIStatement> = set.statements.iter().copied().collect();
    if set.mutual {
        known.extend(statement_universe(&vars));
    }
    let has = |known: &HashSet<CIStatement>, a: VarSubset, b: VarSubset, s: VarSubset| {
        known.contains(&CIStatement::canonical(a, b, s))
    };
    loop {
        let snapshot: Vec<CIStatement> = known.iter().copied().collect();
        let mut added: Vec<CIStatement> = Vec::new();
        for st in &snapshot {
            for (x, y) in [(st.a, st.b), (st.b, st.a)] {
                let k = st.s;
                for part in proper_nonempty_submasks(y) {
                    // decomposition
                    added.push(CIStatement::canonical(x, part, k));
                    // weak union
                    added.push(CIStatement::canonical(x, part, k.union(y.minus(part))));
                }
                for c in nonempty_submasks(k) {
                    let rest = k.minus(c);
                    // contraction: x ⟂ y | rest∪c and x ⟂ c | rest
                    if has(&known, x, c, rest) {
                        added.push(CIStatement::canonical(x, y.union(c), rest));
                    }
                    // intersection: x ⟂ y | rest∪c and x ⟂ c | rest∪y
                    if intersection && has(&known, x, c, rest.union(y)) {
                        added.push(CIStatement::canonical(x, y.union(c), rest));
                    }
                }
            }
        }
        let before = known.len();
        known.extend(added);
        if known.len() == before {
            break;
        }
    }
    let mut out = CISet {
        vars: vars.clone(),
        statements: known.into_iter().collect(),
        mutual: set.mutual,
    };
    if !out.mutual && derived_mutual(&out) {
        out.mutual = true;
        out.statements.extend(statement_universe(&vars));
    }
    out
}

fn nonempty_submasks(mask: VarSubset) -> impl Iterator<Item = VarSubset> {
    crate::dist::submasks(mask.bits()).skip(1).map(VarSubset)
}

fn proper_nonempty_submasks(mask: VarSubset) -> impl Iterator<Item = VarSubset> {
    nonempty_submasks(mask).filter(move |s| *s != mask)
}

/// Least fixed point under symmetry, decomposition, weak union and
/// contraction, applied to set-valued sides. The mutual flag implies every
/// statement, and is set whenever the closed set already implies it.
pub fn semigraphoid_closure(set: &CISet) -> CISet {
    close(set, false)
}

/// With `positive`, additionally closes under
/// `{A ⟂ B | S∪C, A ⟂ C | S∪B} ⇒ A ⟂ B∪C | S`; otherwise this is
/// [`semigraphoid_closure`].
pub fn intersection_rule(set: &CISet, positive: bool) -> CISet {
    close(set, positive)
}

/// Evaluates the biconditional
/// `{X⟂Y, X⟂Z, Y⟂Z, X⟂Y|Z} ⇔ mutual independence` on a three-variable
/// table whose third variable has positive mass at both values. Returns
/// whether the two sides agree; a `false` indicates an arithmetic bug.
pub fn check_theorem2(table: &JointTable) -> Result<bool> {
    if table.n() != 3 {
        return Err(Error::Precondition(format!(
            "{} variables, expected 3",
            table.n()
        )));
    }
    let z = VarSubset::single(2);
    for value in [0u8, 4u8] {
        if !table.prob_mask(z, value).is_positive() {
            return Err(Error::Precondition(format!(
                "P({}={}) = 0",
                table.vars().name(2),
                u8::from(value != 0)
            )));
        }
    }
    let (x, y) = (VarSubset::single(0), VarSubset::single(1));
    let e = VarSubset::EMPTY;
    let sem = Semantics::Strict;
    let premises = table.is_ci(x, y, e, sem)?
        && table.is_ci(x, z, e, sem)?
        && table.is_ci(y, z, e, sem)?
        && table.is_ci(x, y, z, sem)?;
    Ok(premises == table.is_mutually_independent())
}

/// Validates a statement's sets against a variable set.
pub fn check_statement(vars: &VarSet, st: &CIStatement) -> Result<()> {
    check_statement_sets(vars, st.a, st.b, st.s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> VarSet {
        VarSet::xyz()
    }

    fn set(text: &str) -> CISet {
        CISet::parse(text, &v()).unwrap()
    }

    #[test]
    fn universe_sizes_and_order() {
        assert_eq!(statement_universe(&v()).len(), 9);
        let two = VarSet::new(&["X", "Y"]).unwrap();
        let u2 = statement_universe(&two);
        assert_eq!(u2.len(), 1);
        assert_eq!(u2[0].format(&two), "X _||_ Y");
        assert!(statement_universe(&VarSet::new(&["X"]).unwrap()).is_empty());
        let names: Vec<String> = statement_universe(&v())
            .iter()
            .map(|s| s.format(&v()))
            .collect();
        assert_eq!(
            names,
            vec![
                "X _||_ Y",
                "X _||_ Z",
                "Y _||_ Z",
                "X _||_ Y | Z",
                "X _||_ Z | Y",
                "Y _||_ Z | X",
                "X _||_ Y,Z",
                "X,Y _||_ Z",
                "X,Z _||_ Y",
            ]
        );
    }

    #[test]
    fn universe_matches_partition_count() {
        // ordered pairs of disjoint nonempty (A, B) with S from the rest, halved by symmetry
        for n in 1..=6 {
            let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
            let vars = VarSet::new(&names).unwrap();
            let expected =
                (4usize.pow(n as u32) + 2usize.pow(n as u32) - 2 * 3usize.pow(n as u32)) / 2;
            assert_eq!(statement_universe(&vars).len(), expected, "n={n}");
        }
    }

    #[test]
    fn canonical_symmetry() {
        let a = parse_statement("Y,Z _||_ X", &v()).unwrap();
        let b = parse_statement("X _||_ Z,Y", &v()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.format(&v()), "X _||_ Y,Z");
        let c = parse_statement("Z _||_ X | Y", &v()).unwrap();
        assert_eq!(c.format(&v()), "X _||_ Z | Y");
    }

    #[test]
    fn parse_errors() {
        assert!(parse_statement("X _||_ X", &v()).is_err());
        assert!(parse_statement("X _||_ Y | Y", &v()).is_err());
        assert!(parse_statement("X Y", &v()).is_err());
        assert!(parse_statement("X _||_ W", &v()).is_err());
        assert!(parse_statement("X _||_ Y |", &v()).is_err());
        assert!(parse_statement(" _||_ Y", &v()).is_err());
        assert!(parse_statement("mutual", &v()).is_err());
        assert_eq!(
            parse_conclusion("mutual", &v()).unwrap(),
            Conclusion::Mutual
        );
    }

    #[test]
    fn closure_of_joint_independence() {
        let c = semigraphoid_closure(&set("X _||_ Y,Z"));
        assert_eq!(
            c,
            set("X _||_ Y,Z; X _||_ Y; X _||_ Z; X _||_ Y | Z; X _||_ Z | Y")
        );
    }

    #[test]
    fn contraction_then_consequences() {
        let c = semigraphoid_closure(&set("X _||_ Y | Z; X _||_ Z"));
        assert_eq!(
            c,
            set("X _||_ Y,Z; X _||_ Y; X _||_ Z; X _||_ Y | Z; X _||_ Z | Y")
        );
    }

    #[test]
    fn closure_of_empty_is_empty() {
        assert_eq!(semigraphoid_closure(&CISet::empty(v())), CISet::empty(v()));
        assert_eq!(
            intersection_rule(&CISet::empty(v()), true),
            CISet::empty(v())
        );
    }

    #[test]
    fn intersection_needs_positivity_flag() {
        let s = set("X _||_ Y | Z; X _||_ Z | Y");
        assert!(intersection_rule(&s, true).contains(&parse_statement("X _||_ Y,Z", &v()).unwrap()));
        assert_eq!(intersection_rule(&s, false), s);
    }

    #[test]
    fn mutual_flag_closes_to_everything() {
        let c = semigraphoid_closure(&set("X _||_ Y,Z; Y _||_ Z"));
        assert!(c.mutual());
        assert_eq!(c.len(), 9);
        let m = semigraphoid_closure(&set("mutual"));
        assert_eq!(m.len(), 9);
    }

    #[test]
    fn theorem2_precondition() {
        let t = JointTable::from_weights(v(), &[1, 1, 1, 1, 0, 0, 0, 0]).unwrap();
        assert!(matches!(check_theorem2(&t), Err(Error::Precondition(_))));
        let two = JointTable::uniform(VarSet::new(&["A", "B"]).unwrap());
        assert!(check_theorem2(&two).is_err());
    }

    #[test]
    fn display_lines() {
        let s = set("Y _||_ Z; X _||_ Y; mutual");
        assert_eq!(s.to_string(), "X _||_ Y\nY _||_ Z\nmutual\n");
        assert_eq!(s.inline(), "X _||_ Y; Y _||_ Z; mutual");
        assert_eq!(CISet::empty(v()).inline(), "none");
    }
}
