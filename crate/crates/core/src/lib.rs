//! Belief conditioning over hyper-power sets.
//!
//! Elements of `D^Θ` are modelled as upward-closed sets of Venn regions under
//! a free, Shafer or hybrid model ([`algebra`]). On top of that sit basic
//! belief assignments ([`belief`]), the 31 belief conditioning rules
//! ([`conditioning`]) and the reference fusion rules together with Shafer's
//! conditioning rule ([`fusion`]). [`formula`] and [`document`] handle the
//! text formats.
//!
//! ```
//! use bcr_core::{condition, load_bba, parse_formula, RuleSpec};
//!
//! let prior = load_bba(
//!     "frame: A, B, C\nmodel: shafer\nA : 0.2\nB : 0.3\nC : 0.5\n",
//! ).unwrap();
//! let event = parse_formula(prior.space(), "B | C").unwrap();
//! let posterior = condition(&prior, event, RuleSpec::bcr(17).unwrap()).unwrap();
//! let c = parse_formula(prior.space(), "C").unwrap();
//! assert!((posterior.mass_of(&c) - 0.625).abs() < 1e-12);
//! ```

pub mod algebra;
pub mod belief;
pub mod conditioning;
pub mod document;
pub mod formula;
pub mod fusion;

pub use algebra::{AlgebraError, Element, Frame, Model, ModelKind, Region, Space, MAX_ATOMS};
pub use belief::{Bba, BbaError, MASS_SUM_TOLERANCE};
pub use conditioning::{
    condition, decompose, select, ConditionError, Decomposition, Mode, Part, Partition, RuleSpec,
    Selector,
};
pub use document::{dump_bba, format_significant, load_bba, BbaDocument, DocumentError};
pub use formula::{parse_formula, FormulaError};
pub use fusion::{
    conditional_bel_pl, conjunctive, fuse, scr_condition, Conjunctive, Fused, FusionError,
    FusionRule,
};
