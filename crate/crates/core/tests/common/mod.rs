#![allow(dead_code)]

use fosuccinct::formula::dotted_alphabet;
use fosuccinct::{Formula, Letter, Term};
use proptest::prelude::*;
use std::collections::HashMap;

/// A structure for the naive evaluator: `A_n`, optionally labeled.
pub struct Naive<'a> {
    pub n: usize,
    pub letters: Option<&'a [Letter]>,
}

fn term(t: &Term, n: usize, env: &HashMap<String, usize>) -> usize {
    match t {
        Term::Min => 0,
        Term::Max => n,
        Term::Var(v) => env[v],
    }
}

impl Naive<'_> {
    /// Textbook recursive semantics; set quantifiers range over all subsets.
    pub fn eval(&self, f: &Formula, env: &mut HashMap<String, usize>, sets: &mut HashMap<String, Vec<bool>>) -> bool {
        let n = self.n;
        match f {
            Formula::Less(a, b) => term(a, n, env) < term(b, n, env),
            Formula::Equal(a, b) => term(a, n, env) == term(b, n, env),
            Formula::Succ(a, b) => term(a, n, env) + 1 == term(b, n, env),
            Formula::Letter(l, t) => self.letters.is_some_and(|w| w[term(t, n, env)] == *l),
            Formula::Member(t, x) => sets[x][term(t, n, env)],
            Formula::Not(g) => !self.eval(g, env, sets),
            Formula::And(a, b) => self.eval(a, env, sets) && self.eval(b, env, sets),
            Formula::Or(a, b) => self.eval(a, env, sets) || self.eval(b, env, sets),
            Formula::Imp(a, b) => !self.eval(a, env, sets) || self.eval(b, env, sets),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let want = matches!(f, Formula::Exists(..));
                let saved = env.get(v).copied();
                let mut found = !want;
                for a in 0..=n {
                    env.insert(v.clone(), a);
                    if self.eval(g, env, sets) == want {
                        found = want;
                        break;
                    }
                }
                match saved {
                    Some(s) => env.insert(v.clone(), s),
                    None => env.remove(v),
                };
                found
            }
            Formula::ExistsSet(x, g) | Formula::ForallSet(x, g) => {
                let want = matches!(f, Formula::ExistsSet(..));
                let saved = sets.get(x).cloned();
                let mut found = !want;
                for mask in 0u64..(1 << (n + 1)) {
                    sets.insert(x.clone(), (0..=n).map(|p| mask >> p & 1 == 1).collect());
                    if self.eval(g, env, sets) == want {
                        found = want;
                        break;
                    }
                }
                match saved {
                    Some(s) => sets.insert(x.clone(), s),
                    None => sets.remove(x),
                };
                found
            }
        }
    }

    pub fn sentence(&self, f: &Formula) -> bool {
        self.eval(f, &mut HashMap::new(), &mut HashMap::new())
    }
}

pub const VARS: [&str; 3] = ["x", "y", "z"];

pub fn arb_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just(Term::Min),
        Just(Term::Max),
        Just(Term::var("x")),
        Just(Term::var("y")),
        Just(Term::var("z")),
    ]
}

fn arb_var() -> impl Strategy<Value = String> {
    prop::sample::select(VARS.to_vec()).prop_map(str::to_string)
}

/// Atoms over `<, =, succ`, plus letters of height 1 and memberships in
/// `X`, `Y` when asked for.
pub fn arb_atom(letters: bool, sets: bool) -> BoxedStrategy<Formula> {
    let order = (arb_term(), arb_term(), 0..3u8)
        .prop_map(|(a, b, k)| match k {
            0 => Formula::Less(a, b),
            1 => Formula::Equal(a, b),
            _ => Formula::Succ(a, b),
        })
        .boxed();
    let mut out = order;
    if letters {
        let l = (prop::sample::select(dotted_alphabet(1)), arb_term()).prop_map(|(l, t)| Formula::Letter(l, t));
        out = prop_oneof![2 => out, 1 => l].boxed();
    }
    if sets {
        let m = (arb_term(), prop::sample::select(vec!["X", "Y"])).prop_map(|(t, x)| Formula::member(t, x));
        out = prop_oneof![2 => out, 1 => m].boxed();
    }
    out
}

/// Random first-order formulas over `x, y, z`.
pub fn arb_formula(letters: bool, sets: bool) -> BoxedStrategy<Formula> {
    arb_atom(letters, sets)
        .prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
                (arb_var(), inner.clone()).prop_map(|(v, g)| Formula::exists(v, g)),
                (arb_var(), inner).prop_map(|(v, g)| Formula::forall(v, g)),
            ]
        })
        .boxed()
}

/// Binds every free first-order variable existentially.
pub fn close(f: Formula) -> Formula {
    f.free_variables().into_iter().fold(f, |g, v| Formula::exists(v, g))
}

pub fn arb_string(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop::sample::select(dotted_alphabet(1)), 1..=max_len)
}

/// `s < v < t`, or either order when `sym` is set.
pub fn between(s: &str, t: &str, v: &str, sym: bool) -> Formula {
    let one = |a: &str, b: &str| Formula::and(Formula::lt(a, v), Formula::lt(v, b));
    if sym {
        Formula::or(one(s, t), one(t, s))
    } else {
        one(s, t)
    }
}

/// Formulas whose quantifiers are all bounded by other variables and whose
/// atoms mention no constants.
pub fn arb_bounded_formula() -> BoxedStrategy<Formula> {
    let var_term = prop::sample::select(VARS.to_vec()).prop_map(Term::var);
    let atom = (var_term.clone(), var_term, 0..3u8)
        .prop_map(|(a, b, k)| match k {
            0 => Formula::Less(a, b),
            1 => Formula::Equal(a, b),
            _ => Formula::Succ(a, b),
        })
        .boxed();
    atom.prop_recursive(5, 32, 2, |inner| {
        let bound = (0..3usize, 1..3usize, any::<bool>(), any::<bool>(), inner.clone());
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
            bound.prop_map(|(v, k, sym, exists, body)| {
                let (s, t) = (VARS[(v + k) % 3], VARS[(v + 2 * k) % 3]);
                let (v, g) = (VARS[v], between(s, t, VARS[v], sym));
                if exists {
                    Formula::exists(v, Formula::and(g, body))
                } else {
                    Formula::forall(v, Formula::imp(g, body))
                }
            }),
        ]
    })
    .boxed()
}
