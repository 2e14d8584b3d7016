//! Formula syntax trees for first-order and monadic second-order logic over
//! linear orders and strings, together with size and fragment measures.
//!
//! The size of a formula is the number of vertices of its syntax tree. An atom
//! is a single vertex regardless of its terms, and implication is a vertex of
//! its own.

mod letter;
mod parse;

pub use letter::{dotted_alphabet, tag_alphabet, Letter};
pub use parse::parse;

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Min,
    Max,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        !matches!(self, Term::Var(_))
    }
}

impl From<&str> for Term {
    fn from(s: &str) -> Term {
        match s {
            "min" => Term::Min,
            "max" => Term::Max,
            v => Term::Var(v.to_string()),
        }
    }
}

impl From<&String> for Term {
    fn from(s: &String) -> Term {
        Term::from(s.as_str())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Min => f.write_str("min"),
            Term::Max => f.write_str("max"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Less(Term, Term),
    Equal(Term, Term),
    Succ(Term, Term),
    Letter(Letter, Term),
    /// Set membership `t ∈ X`.
    Member(Term, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

/// Which relation symbols, constants and letters a formula may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub less: bool,
    pub succ: bool,
    pub min: bool,
    pub max: bool,
    pub letters: Vec<Letter>,
    pub mso: bool,
}

impl Signature {
    /// `{<}`.
    pub fn order() -> Self {
        Signature {
            less: true,
            succ: false,
            min: false,
            max: false,
            letters: Vec::new(),
            mso: false,
        }
    }

    /// `{<, succ, min, max}`.
    pub fn full_order() -> Self {
        Signature {
            succ: true,
            min: true,
            max: true,
            ..Signature::order()
        }
    }

    /// The string signature for height `h`: `<` plus one unary predicate per
    /// letter of the dotted alphabet.
    pub fn tau(h: u32) -> Self {
        Signature {
            letters: dotted_alphabet(h),
            ..Signature::order()
        }
    }

    pub fn with_mso(mut self) -> Self {
        self.mso = true;
        self
    }

    fn allows_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::Min => self.min,
            Term::Max => self.max,
        }
    }
}

impl Formula {
    pub fn lt(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Less(a.into(), b.into())
    }

    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Equal(a.into(), b.into())
    }

    pub fn succ(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Succ(a.into(), b.into())
    }

    pub fn letter(l: Letter, t: impl Into<Term>) -> Formula {
        Formula::Letter(l, t.into())
    }

    pub fn member(t: impl Into<Term>, set: impl Into<String>) -> Formula {
        Formula::Member(t.into(), set.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }

    pub fn exists_set(x: impl Into<String>, f: Formula) -> Formula {
        Formula::ExistsSet(x.into(), Box::new(f))
    }

    pub fn forall_set(x: impl Into<String>, f: Formula) -> Formula {
        Formula::ForallSet(x.into(), Box::new(f))
    }

    /// Right-nested conjunction; `None` for an empty iterator.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let mut acc = items.pop()?;
        while let Some(f) = items.pop() {
            acc = Formula::and(f, acc);
        }
        Some(acc)
    }

    /// Right-nested disjunction; `None` for an empty iterator.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let mut acc = items.pop()?;
        while let Some(f) = items.pop() {
            acc = Formula::or(f, acc);
        }
        Some(acc)
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::Less(..)
                | Formula::Equal(..)
                | Formula::Succ(..)
                | Formula::Letter(..)
                | Formula::Member(..)
        )
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Not(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a)
            | Formula::ExistsSet(_, a)
            | Formula::ForallSet(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    /// Number of vertices of the syntax tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Number of distinct first-order variable names occurring, free or bound.
    pub fn variable_width(&self) -> usize {
        self.variables().len()
    }

    /// All first-order variable names occurring in the formula.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        for t in self.terms() {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        }
        if let Formula::Exists(v, _) | Formula::Forall(v, _) = self {
            out.insert(v.clone());
        }
        for c in self.children() {
            c.collect_variables(out);
        }
    }

    /// Terms of an atom; empty for compound formulas.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Formula::Less(a, b) | Formula::Equal(a, b) | Formula::Succ(a, b) => vec![a, b],
            Formula::Letter(_, t) | Formula::Member(t, _) => vec![t],
            _ => Vec::new(),
        }
    }

    /// Maximum nesting of first-order quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::quantifier_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::Exists(..) | Formula::Forall(..) => inner + 1,
            _ => inner,
        }
    }

    /// Maximum nesting of set quantifiers.
    pub fn set_quantifier_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::set_quantifier_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::ExistsSet(..) | Formula::ForallSet(..) => inner + 1,
            _ => inner,
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        match self {
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let mut s = f.free_variables();
                s.remove(v);
                s
            }
            _ if self.is_atom() => self
                .terms()
                .into_iter()
                .filter_map(|t| t.as_var().map(str::to_string))
                .collect(),
            _ => self
                .children()
                .into_iter()
                .flat_map(Formula::free_variables)
                .collect(),
        }
    }

    pub fn free_set_variables(&self) -> BTreeSet<String> {
        match self {
            Formula::Member(_, x) => BTreeSet::from([x.clone()]),
            Formula::ExistsSet(x, f) | Formula::ForallSet(x, f) => {
                let mut s = f.free_set_variables();
                s.remove(x);
                s
            }
            _ => self
                .children()
                .into_iter()
                .flat_map(Formula::free_set_variables)
                .collect(),
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty() && self.free_set_variables().is_empty()
    }

    /// Uses set quantifiers or set membership.
    pub fn is_mso(&self) -> bool {
        match self {
            Formula::Member(..) | Formula::ExistsSet(..) | Formula::ForallSet(..) => true,
            _ => self.children().into_iter().any(Formula::is_mso),
        }
    }

    pub fn uses_letters(&self) -> bool {
        match self {
            Formula::Letter(..) => true,
            _ => self.children().into_iter().any(Formula::uses_letters),
        }
    }

    /// Checks the formula against a signature, reporting the first violation.
    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        let fail = |what: String| Err(Error::Signature(format!("{what} in `{self}`")));
        for t in self.terms() {
            if !sig.allows_term(t) {
                return fail(format!("constant `{t}` not in signature"));
            }
        }
        match self {
            Formula::Less(..) if !sig.less => return fail("`<` not in signature".into()),
            Formula::Succ(..) if !sig.succ => return fail("`succ` not in signature".into()),
            Formula::Letter(l, _) if !sig.letters.contains(l) => {
                return fail(format!("letter `{l}` not in signature"))
            }
            Formula::Member(..) | Formula::ExistsSet(..) | Formula::ForallSet(..) if !sig.mso => {
                return fail("set variables need an MSO signature".into())
            }
            _ => {}
        }
        for c in self.children() {
            c.check_signature(sig)?;
        }
        Ok(())
    }

    /// Errors unless the formula uses at most `k` variable names.
    pub fn check_width(&self, k: usize) -> Result<()> {
        let w = self.variable_width();
        if w > k {
            return Err(Error::Signature(format!(
                "formula uses {w} variables, at most {k} allowed"
            )));
        }
        Ok(())
    }

    /// Replaces every letter atom `σ(t)` by the membership atom `t ∈ P_σ`.
    pub fn letters_to_sets(&self) -> Formula {
        self.map_atoms(&|f| match f {
            Formula::Letter(l, t) => Formula::Member(t.clone(), l.set_name()),
            other => other.clone(),
        })
    }

    /// Rebuilds the formula with `g` applied to every atom.
    pub fn map_atoms(&self, g: &dyn Fn(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Not(a) => Formula::not(a.map_atoms(g)),
            Formula::And(a, b) => Formula::and(a.map_atoms(g), b.map_atoms(g)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(g), b.map_atoms(g)),
            Formula::Imp(a, b) => Formula::imp(a.map_atoms(g), b.map_atoms(g)),
            Formula::Exists(v, a) => Formula::exists(v.clone(), a.map_atoms(g)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.map_atoms(g)),
            Formula::ExistsSet(x, a) => Formula::exists_set(x.clone(), a.map_atoms(g)),
            Formula::ForallSet(x, a) => Formula::forall_set(x.clone(), a.map_atoms(g)),
            atom => g(atom),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Less(a, b) => write!(f, "(< {a} {b})"),
            Formula::Equal(a, b) => write!(f, "(= {a} {b})"),
            Formula::Succ(a, b) => write!(f, "(succ {a} {b})"),
            Formula::Letter(l, t) => write!(f, "(letter {l} {t})"),
            Formula::Member(t, x) => write!(f, "(in {t} {x})"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Imp(a, b) => write!(f, "(imp {a} {b})"),
            Formula::Exists(v, a) => write!(f, "(exists {v} {a})"),
            Formula::Forall(v, a) => write!(f, "(forall {v} {a})"),
            Formula::ExistsSet(x, a) => write!(f, "(existsSet {x} {a})"),
            Formula::ForallSet(x, a) => write!(f, "(forallSet {x} {a})"),
        }
    }
}

/// Canonical text of a formula.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn succ_elim() -> Formula {
        Formula::and(
            Formula::lt("x", "y"),
            Formula::not(Formula::exists(
                "z",
                Formula::and(Formula::lt("x", "z"), Formula::lt("z", "y")),
            )),
        )
    }

    #[test]
    fn sizes() {
        assert_eq!(Formula::lt("x", "y").size(), 1);
        let inner = Formula::not(Formula::exists(
            "z",
            Formula::and(Formula::lt("x", "z"), Formula::lt("z", "y")),
        ));
        assert_eq!(inner.size(), 5);
        assert_eq!(succ_elim().size(), 7);
        assert_eq!(
            Formula::imp(Formula::lt("x", "y"), Formula::eq("x", "y")).size(),
            3
        );
    }

    #[test]
    fn width_and_depth() {
        assert_eq!(Formula::lt("x", "y").variable_width(), 2);
        assert_eq!(succ_elim().variable_width(), 3);
        assert_eq!(Formula::lt("x", "y").quantifier_depth(), 0);
        assert_eq!(succ_elim().quantifier_depth(), 1);
        assert_eq!(Formula::lt("min", "max").variable_width(), 0);
    }

    #[test]
    fn free_variables_respect_binding() {
        let f = succ_elim();
        assert_eq!(
            f.free_variables(),
            BTreeSet::from(["x".to_string(), "y".to_string()])
        );
        assert!(Formula::exists("x", Formula::lt("min", "x")).is_sentence());
        let m = Formula::exists_set("X", Formula::member("min", "X"));
        assert!(m.is_sentence());
        assert!(m.is_mso());
        assert!(!Formula::member("min", "X").is_sentence());
    }

    #[test]
    fn signature_checks() {
        let f = Formula::succ("min", "max");
        assert!(f.check_signature(&Signature::full_order()).is_ok());
        assert!(f.check_signature(&Signature::order()).is_err());
        let l = Formula::letter(Letter::Dot, "x");
        assert!(l.check_signature(&Signature::tau(1)).is_ok());
        assert!(l.check_signature(&Signature::order()).is_err());
        let m = Formula::exists_set("X", Formula::member("x", "X"));
        assert!(m.check_signature(&Signature::order()).is_err());
        assert!(m.check_signature(&Signature::order().with_mso()).is_ok());
    }

    #[test]
    fn letters_to_sets_keeps_size() {
        let f = Formula::exists("x", Formula::letter(Letter::Open(2), "x"));
        let g = f.letters_to_sets();
        assert_eq!(g.size(), f.size());
        assert_eq!(g.to_string(), "(exists x (in x PT2))");
    }

    #[test]
    fn n_ary_helpers() {
        assert!(Formula::conjunction(Vec::new()).is_none());
        let d = Formula::disjunction(vec![
            Formula::lt("x", "y"),
            Formula::lt("y", "x"),
            Formula::eq("x", "y"),
        ])
        .unwrap();
        assert_eq!(d.to_string(), "(or (< x y) (or (< y x) (= x y)))");
    }
}
