//! Sentences over pure linear orders: the counting family `χ`, the
//! doubling family `φ_m`, translators into two-variable logic, and the
//! elimination of `succ`, `min` and `max`.

use crate::error::{Error, Result};
use crate::evaluator::{eval_on_order, stabilization_threshold};
use crate::formula::{Formula, Signature, Term};
use crate::guard::Guards;
use std::collections::BTreeSet;

/// `χ'_{≥ℓ}(v)`: at least `ℓ` elements below `v`, alternating `x` and `y`.
fn chi_prime(l: usize, v: &str) -> Formula {
    if l == 0 {
        return Formula::eq(v, v);
    }
    let w = other(v);
    Formula::exists(w, Formula::and(Formula::lt(w, v), chi_prime(l - 1, w)))
}

fn other(v: &str) -> &'static str {
    if v == "x" {
        "y"
    } else {
        "x"
    }
}

/// `χ_{≥ℓ}`: true in `A_N` iff `N ≥ ℓ`.
pub fn chi_at_least(l: usize) -> Formula {
    Formula::exists("x", chi_prime(l, "x"))
}

/// `χ_ℓ`: true in `A_N` iff `N = ℓ`.
pub fn chi(l: usize) -> Formula {
    Formula::and(chi_at_least(l), Formula::not(chi_at_least(l + 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiMode {
    Exact,
    AtLeast,
}

pub fn gen_chi(l: usize, mode: ChiMode) -> Formula {
    match mode {
        ChiMode::Exact => chi(l),
        ChiMode::AtLeast => chi_at_least(l),
    }
}

const POOL: [&str; 4] = ["x", "y", "z", "u"];

fn pool_without<'a>(a: &str, b: &str) -> Vec<&'a str> {
    POOL.iter().copied().filter(|v| *v != a && *v != b).collect()
}

/// `e` lies strictly between `a` and `b`.
fn between(a: &str, b: &str, e: &str) -> Formula {
    Formula::or(
        Formula::and(Formula::lt(a, e), Formula::lt(e, b)),
        Formula::and(Formula::lt(b, e), Formula::lt(e, a)),
    )
}

/// `|a - b| = 1`.
fn adjacent(a: &str, b: &str) -> Formula {
    let e = pool_without(a, b)[0];
    Formula::and(
        Formula::or(Formula::lt(a, b), Formula::lt(b, a)),
        Formula::not(Formula::exists(e, between(a, b, e))),
    )
}

/// `φ'_m(a, b)`: `|a - b| = 2^m`, via a midpoint `c` strictly between the
/// two at distance `2^(m-1)` from both.
fn phi_prime(m: u32, a: &str, b: &str) -> Formula {
    if m == 0 {
        return adjacent(a, b);
    }
    let rest = pool_without(a, b);
    let (c, d) = (rest[0], rest[1]);
    Formula::exists(
        c,
        Formula::and(
            between(a, b, c),
            Formula::forall(
                d,
                Formula::imp(
                    Formula::or(Formula::eq(d, a), Formula::eq(d, b)),
                    phi_prime(m - 1, c, d),
                ),
            ),
        ),
    )
}

/// `φ_m`: a four-variable sentence true in `A_N` iff `N = 2^m`.
pub fn gen_phi_m(m: u32) -> Formula {
    Formula::exists(
        "x",
        Formula::exists(
            "y",
            Formula::and(
                Formula::not(Formula::exists(
                    "z",
                    Formula::or(Formula::lt("z", "x"), Formula::lt("y", "z")),
                )),
                phi_prime(m, "x", "y"),
            ),
        ),
    )
}

fn check_order_sentence(f: &Formula) -> Result<()> {
    f.check_signature(&Signature::full_order())?;
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(Error::Unassigned(v));
    }
    Ok(())
}

/// Disjunction of `χ_ℓ` over `points`, plus `χ_{≥from}` when `tail` holds.
fn chi_disjunction(points: &[usize], tail: Option<usize>) -> Formula {
    let mut items: Vec<Formula> = points.iter().map(|&l| chi(l)).collect();
    if let Some(d) = tail {
        items.push(chi_at_least(d));
    }
    Formula::disjunction(items).unwrap_or_else(|| Formula::not(chi_at_least(0)))
}

/// An equivalent `FO²(<)` sentence for an `FO³(<,succ,min,max)` sentence,
/// built from its truth values up to the stabilization point.
pub fn translate_fo3_to_fo2(psi: &Formula, guards: &Guards) -> Result<Formula> {
    check_order_sentence(psi)?;
    psi.check_width(3)?;
    let s = stabilization_threshold(psi, guards)?;
    let points: Vec<usize> = (0..s.threshold).filter(|&n| s.truth[n]).collect();
    Ok(chi_disjunction(&points, s.tail.then_some(s.threshold)))
}

/// An equivalent `FO²(<)` sentence for any first-order sentence over the
/// order signature, cut at `2^(d+1)`.
pub fn translate_fo_to_fo2(phi: &Formula, guards: &Guards) -> Result<Formula> {
    check_order_sentence(phi)?;
    let d = phi.quantifier_depth() as u32;
    let k = 1usize
        .checked_shl(d + 1)
        .filter(|&k| k <= guards.stabilization_limit)
        .ok_or_else(|| {
            Error::guard(format!(
                "2^{} exceeds the stabilization guard of {}",
                d + 1,
                guards.stabilization_limit
            ))
        })?;
    let mut points = Vec::new();
    for n in 0..k {
        if eval_on_order(phi, n)? {
            points.push(n);
        }
    }
    let tail = eval_on_order(phi, k)?;
    Ok(chi_disjunction(&points, tail.then_some(k)))
}

const SUGAR_POOL: [&str; 3] = ["x", "y", "z"];

fn fresh(used: &BTreeSet<String>) -> Result<String> {
    SUGAR_POOL
        .iter()
        .find(|v| !used.contains(**v))
        .map(|v| v.to_string())
        .ok_or_else(|| Error::Signature("no free variable among x, y, z for rewriting".into()))
}

/// `w` is the least (`min`) or greatest (`max`) element.
fn is_endpoint(t: &Term, w: &str) -> Result<Formula> {
    let v = fresh(&BTreeSet::from([w.to_string()]))?;
    Ok(match t {
        Term::Min => Formula::not(Formula::exists(v.clone(), Formula::lt(v.as_str(), w))),
        _ => Formula::not(Formula::exists(v.clone(), Formula::lt(w, v.as_str()))),
    })
}

fn rewrite_atom(atom: &Formula) -> Result<Formula> {
    let used: BTreeSet<String> = atom
        .terms()
        .into_iter()
        .filter_map(|t| t.as_var().map(str::to_string))
        .collect();
    // v = min and v = max get the direct forms
    if let Formula::Equal(a, b) = atom {
        match (a, b) {
            (Term::Var(v), c @ (Term::Min | Term::Max)) | (c @ (Term::Min | Term::Max), Term::Var(v)) => {
                return is_endpoint(c, v);
            }
            _ => {}
        }
    }
    if let Some(pos) = atom.terms().iter().position(|t| t.is_constant()) {
        let c = atom.terms()[pos].clone();
        let w = fresh(&used)?;
        let replaced = replace_term(atom, pos, Term::var(w.clone()));
        return Ok(Formula::exists(
            w.clone(),
            Formula::and(is_endpoint(&c, &w)?, rewrite_atom(&replaced)?),
        ));
    }
    if let Formula::Succ(a, b) = atom {
        let w = fresh(&used)?;
        let (a, b) = (a.clone(), b.clone());
        return Ok(Formula::and(
            Formula::Less(a.clone(), b.clone()),
            Formula::not(Formula::exists(
                w.clone(),
                Formula::and(
                    Formula::Less(a, Term::var(w.clone())),
                    Formula::Less(Term::var(w), b),
                ),
            )),
        ));
    }
    Ok(atom.clone())
}

fn replace_term(atom: &Formula, pos: usize, t: Term) -> Formula {
    let pick = |k: usize, old: &Term| if k == pos { t.clone() } else { old.clone() };
    match atom {
        Formula::Less(a, b) => Formula::Less(pick(0, a), pick(1, b)),
        Formula::Equal(a, b) => Formula::Equal(pick(0, a), pick(1, b)),
        Formula::Succ(a, b) => Formula::Succ(pick(0, a), pick(1, b)),
        Formula::Letter(l, a) => Formula::Letter(*l, pick(0, a)),
        Formula::Member(a, x) => Formula::Member(pick(0, a), x.clone()),
        other => other.clone(),
    }
}

fn rewrite(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Not(a) => Formula::not(rewrite(a)?),
        Formula::And(a, b) => Formula::and(rewrite(a)?, rewrite(b)?),
        Formula::Or(a, b) => Formula::or(rewrite(a)?, rewrite(b)?),
        Formula::Imp(a, b) => Formula::imp(rewrite(a)?, rewrite(b)?),
        Formula::Exists(v, a) => Formula::exists(v.clone(), rewrite(a)?),
        Formula::Forall(v, a) => Formula::forall(v.clone(), rewrite(a)?),
        Formula::ExistsSet(x, a) => Formula::exists_set(x.clone(), rewrite(a)?),
        Formula::ForallSet(x, a) => Formula::forall_set(x.clone(), rewrite(a)?),
        atom => rewrite_atom(atom)?,
    })
}

/// Rewrites `succ`, `min` and `max` away, leaving `<` and `=` only, without
/// leaving the three-variable fragment.
pub fn eliminate_sugar(psi: &Formula) -> Result<Formula> {
    psi.check_width(3)?;
    let out = rewrite(psi)?;
    out.check_width(3)?;
    Ok(out)
}
