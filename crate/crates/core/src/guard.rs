//! Scale guards shared by every exhaustive procedure in the crate.
//!
//! Each guard is an explicit upper bound; exceeding it yields
//! [`Error::Guard`](crate::Error::Guard) instead of an unbounded computation.

use serde::Serialize;
use std::fmt;

/// Environment variable holding a multiplier applied to every guard.
pub const GUARD_SCALE_ENV: &str = "FOSUCCINCT_GUARD_SCALE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Guards {
    /// Largest set domain a single set quantifier may range over.
    pub mso_set_domain: usize,
    /// Largest `2^(d+1)` the stabilization analysis will evaluate up to.
    pub stabilization_limit: usize,
    /// Largest number of interpretation pairs a separator query may inspect.
    pub separator_pairs: usize,
    /// Largest interpretation set an extended syntax tree node may carry.
    pub tree_budget: usize,
    /// Largest formula size the enumerator accepts.
    pub enum_max_size: usize,
    /// Largest number of semantic classes the enumerator may hold.
    pub enum_max_classes: usize,
    /// Largest quantifier depth for the type-indistinguishability check.
    pub lemma3_depth: u32,
    /// Largest linear order for the type-indistinguishability check.
    pub lemma3_max_order: usize,
    /// Largest `h` for which tower strings are materialized.
    pub tower_height: u32,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            mso_set_domain: 24,
            stabilization_limit: 4096,
            separator_pairs: 4_000_000,
            tree_budget: 20_000,
            enum_max_size: 9,
            enum_max_classes: 200_000,
            lemma3_depth: 2,
            lemma3_max_order: 6,
            tower_height: 2,
        }
    }
}

impl Guards {
    /// Multiplies the numeric guards by `scale`. Depth-like guards grow additively
    /// by `scale - 1` so a scale of 1 is the identity.
    pub fn scaled(scale: usize) -> Self {
        let base = Guards::default();
        let scale = scale.max(1);
        let bump = (scale - 1) as u32;
        Guards {
            mso_set_domain: base.mso_set_domain * scale,
            stabilization_limit: base.stabilization_limit * scale,
            separator_pairs: base.separator_pairs * scale,
            tree_budget: base.tree_budget * scale,
            enum_max_size: base.enum_max_size + (scale - 1),
            enum_max_classes: base.enum_max_classes * scale,
            lemma3_depth: base.lemma3_depth + bump,
            lemma3_max_order: base.lemma3_max_order + (scale - 1),
            tower_height: base.tower_height,
        }
    }

    /// Reads [`GUARD_SCALE_ENV`]; unset or unparsable values mean scale 1.
    pub fn from_env() -> Self {
        let scale = std::env::var(GUARD_SCALE_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(1);
        Guards::scaled(scale)
    }
}

impl fmt::Display for Guards {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mso_set_domain={} stabilization_limit={} separator_pairs={} tree_budget={} \
             enum_max_size={} enum_max_classes={} lemma3_depth={} lemma3_max_order={} tower_height={}",
            self.mso_set_domain,
            self.stabilization_limit,
            self.separator_pairs,
            self.tree_budget,
            self.enum_max_size,
            self.enum_max_classes,
            self.lemma3_depth,
            self.lemma3_max_order,
            self.tower_height
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_one_is_default() {
        assert_eq!(Guards::scaled(1), Guards::default());
        assert_eq!(Guards::scaled(0), Guards::default());
    }

    #[test]
    fn scaling_grows_guards() {
        let g = Guards::scaled(3);
        assert_eq!(g.mso_set_domain, 72);
        assert_eq!(g.enum_max_size, 11);
        assert_eq!(g.lemma3_depth, 4);
    }
}
