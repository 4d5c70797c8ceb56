//! Built-in tables, their published independence listings, the 57 claim
//! statement patterns, and named three-vertex structures.

use std::fmt;
use std::str::FromStr;

use crate::ci::{CISet, CIStatement};
use crate::dag::{parse_dag, Dag};
use crate::dist::{lex_cells, JointTable};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::vars::VarSet;

/// Identifier of a catalog table, `1..=10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExampleId(u8);

impl ExampleId {
    pub fn new(id: u32) -> Result<ExampleId> {
        if (1..=10).contains(&id) {
            Ok(ExampleId(id as u8))
        } else {
            Err(Error::UnknownExample(id))
        }
    }

    pub fn all() -> impl Iterator<Item = ExampleId> {
        (1..=10).map(ExampleId)
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// masses in lexicographic (X, Y, Z) order: 000 001 010 011 100 101 110 111
const TABLES: [[&str; 8]; 10] = [
    ["1/8", "1/8", "1/8", "1/8", "1/8", "1/8", "1/8", "1/8"],
    [
        "1/16", "3/16", "3/16", "1/16", "3/16", "1/16", "1/16", "3/16",
    ],
    ["1/4", "4/15", "1/12", "1/15", "1/8", "4/30", "1/24", "1/30"],
    ["1/5", "0", "0", "3/10", "3/10", "0", "0", "1/5"],
    ["1/4", "3/10", "1/8", "3/40", "1/12", "1/10", "1/24", "1/40"],
    ["1/4", "0", "0", "0", "0", "0", "0", "3/4"],
    ["1/4", "3/4", "0", "0", "0", "0", "0", "0"],
    ["1/3", "0", "0", "0", "1/3", "0", "1/3", "0"],
    ["0", "0", "0", "0", "1/4", "1/4", "1/4", "1/4"],
    ["1", "0", "0", "0", "0", "0", "0", "0"],
];

const LISTINGS: [&str; 10] = [
    "X _||_ Y; X _||_ Z; Y _||_ Z; X _||_ Y,Z; Y _||_ X,Z; Z _||_ X,Y; \
     X _||_ Y | Z; X _||_ Z | Y; Y _||_ Z | X; mutual",
    "X _||_ Y; Y _||_ Z; X _||_ Z",
    "X _||_ Y; X _||_ Z; X _||_ Y,Z; X _||_ Y | Z",
    "X _||_ Y | Z; X _||_ Z | Y",
    "X _||_ Y; X _||_ Z",
    "X _||_ Y | Z; X _||_ Z | Y; Y _||_ Z | X",
    "X _||_ Y; X _||_ Z; Y _||_ Z; X _||_ Y | Z",
    "Y _||_ Z; X _||_ Z; Y _||_ Z | X; X _||_ Z | Y",
    "X _||_ Y; Y _||_ Z; X _||_ Z; X _||_ Y | Z; X _||_ Z | Y; X _||_ Y,Z",
    "X _||_ Y; Y _||_ Z; X _||_ Z; mutual",
];

/// The exact catalog table for `id`, over `X, Y, Z`.
pub fn example(id: ExampleId) -> JointTable {
    let vars = VarSet::xyz();
    let lex = &TABLES[id.0 as usize - 1];
    let mut mass = vec![Rational::default(); 8];
    for (k, cell) in lex_cells(3).enumerate() {
        mass[cell] = lex[k].parse().expect("catalog rational");
    }
    JointTable::new(vars, mass).expect("catalog table sums to one")
}

/// The independence statements printed alongside the table. These listings
/// are not exhaustive; the extracted set is expected to contain them.
pub fn published_listing(id: ExampleId) -> CISet {
    CISet::parse(LISTINGS[id.0 as usize - 1], &VarSet::xyz()).expect("catalog listing")
}

/// Places where exact arithmetic on the printed table disagrees with the
/// accompanying prose, or where the verdict depends on the semantics.
pub fn remarks(id: ExampleId) -> &'static [&'static str] {
    match id.0 {
        5 => &[
            "source remark: X _||_ Y,Z is said to fail; exact arithmetic shows it holds \
             (each X=1 cell is one third of the matching X=0 cell)",
        ],
        7 => &["semantics: X _||_ Z | Y and Y _||_ Z | X hold only under standard semantics (P(Y=1) = P(X=1) = 0)"],
        8 => &[
            "source remark: Z _||_ X,Y is said to fail; exact arithmetic shows it holds \
             (Z is constantly 0)",
        ],
        9 => &["semantics: Y _||_ Z | X holds only under standard semantics (P(X=0) = 0)"],
        10 => &[
            "semantics: no conditional statement holds under strict semantics; \
             under standard semantics every statement holds",
        ],
        _ => &[],
    }
}

/// Which catalog table, if any, has exactly these masses.
pub fn identify(table: &JointTable) -> Option<ExampleId> {
    if table.vars() != &VarSet::xyz() {
        return None;
    }
    ExampleId::all().find(|&id| &example(id) == table)
}

/// Group label of a claim pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
}

impl Group {
    pub const ALL: [Group; 10] = [
        Group::I,
        Group::II,
        Group::III,
        Group::IV,
        Group::V,
        Group::VI,
        Group::VII,
        Group::VIII,
        Group::IX,
        Group::X,
    ];

    pub fn size(self) -> u8 {
        match self {
            Group::I => 8,
            Group::II | Group::III | Group::V | Group::VI => 9,
            Group::IV | Group::VII | Group::VIII | Group::IX => 3,
            Group::X => 1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Group::I => "I",
            Group::II => "II",
            Group::III => "III",
            Group::IV => "IV",
            Group::V => "V",
            Group::VI => "VI",
            Group::VII => "VII",
            Group::VIII => "VIII",
            Group::IX => "IX",
            Group::X => "X",
        }
    }
}

/// `group:index`, e.g. `II:9`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternId {
    group: Group,
    index: u8,
}

impl PatternId {
    pub fn new(group: Group, index: u8) -> Result<PatternId> {
        if index == 0 || index > group.size() {
            return Err(Error::UnknownPattern(format!("{}:{index}", group.label())));
        }
        Ok(PatternId { group, index })
    }

    pub fn group(self) -> Group {
        self.group
    }

    pub fn index(self) -> u8 {
        self.index
    }

    /// All 57 identifiers in catalog order.
    pub fn all() -> Vec<PatternId> {
        Group::ALL
            .iter()
            .flat_map(|&g| (1..=g.size()).map(move |index| PatternId { group: g, index }))
            .collect()
    }

    fn ordinal(self) -> usize {
        PatternId::all().iter().position(|p| *p == self).unwrap()
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.group.label(), self.index)
    }
}

impl FromStr for PatternId {
    type Err = Error;
    fn from_str(s: &str) -> Result<PatternId> {
        let bad = || Error::UnknownPattern(s.to_string());
        let (g, i) = s.trim().split_once(':').ok_or_else(bad)?;
        let group = Group::ALL
            .iter()
            .copied()
            .find(|gr| gr.label() == g)
            .ok_or_else(bad)?;
        let index: u8 = i.parse().map_err(|_| bad())?;
        PatternId::new(group, index)
    }
}

// short codes: "XY" is X ⟂ Y, "XY|Z" is X ⟂ Y | Z
const PATTERNS: [&[&str]; 57] = [
    // I
    &["XY", "XZ"],
    &["XY", "YZ"],
    &["XZ", "YZ"],
    &["XY", "XZ", "YZ"],
    &["XY|Z", "XZ|Y"],
    &["XY|Z", "YZ|X"],
    &["YZ|X", "XZ|Y"],
    &["XY|Z", "XZ|Y", "YZ|X"],
    // II
    &["XY", "XY|Z"],
    &["XY", "XZ|Y"],
    &["XY", "YZ|X"],
    &["XZ", "XY|Z"],
    &["XZ", "XZ|Y"],
    &["XZ", "YZ|X"],
    &["YZ", "XY|Z"],
    &["YZ", "XZ|Y"],
    &["YZ", "YZ|X"],
    // III
    &["XY", "XY|Z", "XZ|Y"],
    &["XY", "XZ|Y", "YZ|X"],
    &["XY", "YZ|X", "XY|Z"],
    &["XZ", "XY|Z", "XZ|Y"],
    &["XZ", "XZ|Y", "YZ|X"],
    &["XZ", "YZ|X", "XY|Z"],
    &["YZ", "XY|Z", "XZ|Y"],
    &["YZ", "XZ|Y", "YZ|X"],
    &["YZ", "YZ|X", "XY|Z"],
    // IV
    &["XY", "XY|Z", "XZ|Y", "YZ|X"],
    &["XZ", "XY|Z", "XZ|Y", "YZ|X"],
    &["YZ", "XY|Z", "XZ|Y", "YZ|X"],
    // V
    &["XY", "XZ", "XY|Z"],
    &["XY", "XZ", "XZ|Y"],
    &["XY", "XZ", "YZ|X"],
    &["XZ", "YZ", "XY|Z"],
    &["XZ", "YZ", "XZ|Y"],
    &["XZ", "YZ", "YZ|X"],
    &["YZ", "XY", "XY|Z"],
    &["YZ", "XY", "XZ|Y"],
    &["YZ", "XY", "YZ|X"],
    // VI
    &["XY", "XZ", "XY|Z", "XZ|Y"],
    &["XY", "XZ", "XZ|Y", "YZ|X"],
    &["XY", "XZ", "YZ|X", "XY|Z"],
    &["XZ", "YZ", "XY|Z", "XZ|Y"],
    &["XZ", "YZ", "XZ|Y", "YZ|X"],
    &["XZ", "YZ", "YZ|X", "XY|Z"],
    &["YZ", "XY", "XY|Z", "XZ|Y"],
    &["YZ", "XY", "XZ|Y", "YZ|X"],
    &["YZ", "XY", "YZ|X", "XY|Z"],
    // VII
    &["XY", "XZ", "XY|Z", "XZ|Y", "YZ|X"],
    &["XZ", "YZ", "XY|Z", "XZ|Y", "YZ|X"],
    &["YZ", "XY", "XY|Z", "XZ|Y", "YZ|X"],
    // VIII
    &["XY", "XZ", "YZ", "XY|Z"],
    &["XY", "XZ", "YZ", "XZ|Y"],
    &["XY", "XZ", "YZ", "YZ|X"],
    // IX
    &["XY", "XZ", "YZ", "XY|Z", "XZ|Y"],
    &["XY", "XZ", "YZ", "XZ|Y", "YZ|X"],
    &["XY", "XZ", "YZ", "YZ|X", "XY|Z"],
    // X
    &["XY", "XZ", "YZ", "XY|Z", "XZ|Y", "YZ|X"],
];

fn short_statement(vars: &VarSet, code: &str) -> CIStatement {
    let (pair, given) = code.split_once('|').unwrap_or((code, ""));
    let (a, b) = pair.split_at(1);
    CIStatement::from_names(vars, a, b, given).expect("pattern code")
}

/// The literal statement set of a pattern (mutual flag unset).
pub fn pattern(id: PatternId) -> CISet {
    let vars = VarSet::xyz();
    let statements: Vec<CIStatement> = PATTERNS[id.ordinal()]
        .iter()
        .map(|code| short_statement(&vars, code))
        .collect();
    CISet::from_statements(vars, statements, false)
}

/// All nine statements over `X, Y, Z` plus mutual independence.
pub fn full_independence() -> CISet {
    let vars = VarSet::xyz();
    CISet::from_statements(vars.clone(), crate::ci::statement_universe(&vars), true)
}

/// Canonical three-vertex structures by shape, cause `X`, outcome `Y`.
pub fn named_structures() -> Vec<(&'static str, Dag)> {
    const SHAPES: [(&str, &str); 12] = [
        ("empty", "empty"),
        ("cause only", "X->Y"),
        ("unrelated edge", "Y->Z"),
        ("chain through Z", "X->Z;Z->Y"),
        ("chain through Y", "X->Y;Y->Z"),
        ("chain into X", "Z->X;X->Y"),
        ("fork at Z", "Z->X;Z->Y"),
        ("fork at X", "X->Y;X->Z"),
        ("collider at Z", "X->Z;Y->Z"),
        ("collider at Y", "X->Y;Z->Y"),
        ("confounded cause", "X->Y;Z->X;Z->Y"),
        ("mediated cause", "X->Y;X->Z;Z->Y"),
    ];
    let vars = VarSet::xyz();
    SHAPES
        .iter()
        .map(|&(name, spec)| (name, parse_dag(spec, &vars).expect("named structure")))
        .collect()
}

pub fn structure_name(dag: &Dag) -> Option<&'static str> {
    named_structures()
        .into_iter()
        .find(|(_, d)| d == dag)
        .map(|(n, _)| n)
}
