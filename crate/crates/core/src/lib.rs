//! Exact-arithmetic tools for conditional independence, faithfulness and
//! constraint-based structure learning over binary variables.

pub mod catalog;
pub mod ci;
pub mod dag;
pub mod dist;
pub mod error;
pub mod faithful;
pub mod pattern;
pub mod pc;
pub mod rational;
pub mod search;
pub mod theorem3;
pub mod vars;

pub use ci::{CISet, CIStatement, Conclusion};
pub use dag::Dag;
pub use dist::{JointTable, Semantics};
pub use error::{Error, Result};
pub use pattern::Pattern;
pub use rational::Rational;
pub use vars::{VarSet, VarSubset};
