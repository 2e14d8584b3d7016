//! A deterministic corpus of three-variable sentences over
//! `{<, succ, min, max}` for experiments: seeded random sentences plus
//! members of the explicit families.

use crate::families::{chi, chi_at_least, eliminate_sugar};
use crate::formula::{Formula, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

const VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub max_size: usize,
    pub max_depth: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0x5eed,
            count: 120,
            max_size: 12,
            max_depth: 3,
        }
    }
}

fn random_term(rng: &mut ChaCha8Rng) -> Term {
    match rng.gen_range(0..5) {
        0 => Term::Min,
        1 => Term::Max,
        k => Term::var(VARS[k - 2]),
    }
}

fn random_atom(rng: &mut ChaCha8Rng) -> Formula {
    let (a, b) = (random_term(rng), random_term(rng));
    match rng.gen_range(0..3) {
        0 => Formula::Less(a, b),
        1 => Formula::Succ(a, b),
        _ => Formula::Equal(a, b),
    }
}

/// A random formula of exactly `size` nodes and depth at most `depth`.
pub fn random_formula(rng: &mut ChaCha8Rng, size: usize, depth: usize) -> Formula {
    if size <= 1 {
        return random_atom(rng);
    }
    let quantify = depth > 0 && rng.gen_bool(0.4);
    if quantify {
        let v = *VARS.choose(rng).expect("nonempty");
        let body = random_formula(rng, size - 1, depth - 1);
        return if rng.gen_bool(0.5) {
            Formula::exists(v, body)
        } else {
            Formula::forall(v, body)
        };
    }
    if size == 2 || rng.gen_bool(0.2) {
        return Formula::not(random_formula(rng, size - 1, depth));
    }
    let left = rng.gen_range(1..size - 1);
    let (a, b) = (
        random_formula(rng, left, depth),
        random_formula(rng, size - 1 - left, depth),
    );
    match rng.gen_range(0..5) {
        0 | 1 => Formula::and(a, b),
        2 | 3 => Formula::or(a, b),
        _ => Formula::imp(a, b),
    }
}

/// Binds the free variables of `f` with random quantifiers.
fn close(rng: &mut ChaCha8Rng, f: Formula) -> Formula {
    f.free_variables().into_iter().fold(f, |g, v| {
        if rng.gen_bool(0.5) {
            Formula::exists(v, g)
        } else {
            Formula::forall(v, g)
        }
    })
}

/// Distinct random sentences within the size and depth bounds, in a fixed
/// order determined by the seed.
pub fn random_sentences(cfg: &CorpusConfig) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < cfg.count && attempts < cfg.count * 200 {
        attempts += 1;
        let size = rng.gen_range(1..=cfg.max_size);
        let body = random_formula(&mut rng, size, cfg.max_depth);
        let f = close(&mut rng, body);
        if f.size() <= cfg.max_size && f.quantifier_depth() <= cfg.max_depth && seen.insert(f.to_string()) {
            out.push(f);
        }
    }
    out
}

/// Small family members that stay inside the three-variable fragment.
pub fn family_sentences() -> Vec<Formula> {
    let mut out = Vec::new();
    for l in 0..=4 {
        out.push(chi_at_least(l));
        out.push(chi(l));
    }
    for text in [
        "(succ min max)",
        "(exists x (and (< min x) (< x max)))",
        "(exists x (exists y (and (succ min x) (and (succ x y) (succ y max)))))",
        "(forall x (imp (< x max) (exists y (succ x y))))",
    ] {
        let f = crate::formula::parse(text).expect("corpus literal parses");
        out.push(eliminate_sugar(&f).expect("three variables suffice"));
        out.push(f);
    }
    out
}

/// The default corpus: family members first, then random sentences.
pub fn fo3_corpus(cfg: &CorpusConfig) -> Vec<Formula> {
    let mut out = family_sentences();
    let known: BTreeSet<String> = out.iter().map(|f| f.to_string()).collect();
    out.extend(random_sentences(cfg).into_iter().filter(|f| !known.contains(&f.to_string())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let cfg = CorpusConfig::default();
        let a = random_sentences(&cfg);
        assert_eq!(a, random_sentences(&cfg));
        assert_eq!(a.len(), cfg.count);
        for f in &a {
            assert!(f.is_sentence());
            assert!(f.size() <= 12 && f.quantifier_depth() <= 3);
            assert!(f.variable_width() <= 3);
        }
        let other = random_sentences(&CorpusConfig { seed: 1, ..cfg });
        assert_ne!(a, other);
    }

    #[test]
    fn families_are_fo3() {
        for f in family_sentences() {
            assert!(f.is_sentence() && f.variable_width() <= 3, "{f}");
        }
    }
}
