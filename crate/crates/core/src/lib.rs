//! Workbench for succinctness questions about first-order logic on finite
//! linear orders and strings.
//!
//! The crate provides formula syntax trees and measures, model checking over
//! linear orders and labeled strings (including monadic second-order set
//! quantifiers), the separator calculus that certifies lower bounds on the size
//! of three-variable formulas, extended syntax trees, the explicit formula
//! families used for the upper and lower bounds, translators into the
//! two-variable fragment, and a brute-force enumerator that serves as an
//! independent oracle.

pub mod corpus;
pub mod enumerator;
pub mod error;
pub mod est;
pub mod evaluator;
pub mod families;
pub mod formula;
pub mod guard;
pub mod report;
pub mod separators;
pub mod structures;

pub use error::{Error, Result};
pub use formula::{parse, print, Formula, Letter, Signature, Term};
pub use guard::Guards;
pub use separators::{Natural, PotentialSeparator, Weight};
pub use structures::{Interpretation, LabeledString, LinearOrder, Point, Structure};

/// Separators with 64-bit entries, the default used throughout the crate.
pub type Separator = PotentialSeparator<u64>;
/// Separators with 32-bit entries.
pub type Separator32 = PotentialSeparator<u32>;
/// Separators with 128-bit entries, for very large gaps.
pub type Separator128 = PotentialSeparator<u128>;
