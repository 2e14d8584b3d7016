//! First-order and monadic second-order sentences over tower strings:
//! `equal_h`, `inc_h`, `max_h`, `ok_j`, the `(v_h)+` sentence, `Φ_h`,
//! `ξ_h` and the order sentence `Ψ_h`.
//!
//! Bound variables are fresh names `v1, v2, ..`; the free positions of
//! `equal`, `inc` and `max` are `x` and `y`.

use crate::error::{Error, Result};
use crate::formula::{dotted_alphabet, Formula, Letter};

/// Name of the numbering set in `Φ_h` and `Ψ_h`.
pub const NUMBERING_SET: &str = "X";

use Letter::{Close, Dot, One, Open, Zero};

struct Gen {
    next: usize,
}

fn all(items: Vec<Formula>) -> Formula {
    Formula::conjunction(items).expect("nonempty conjunction")
}

fn any(items: Vec<Formula>) -> Formula {
    Formula::disjunction(items).expect("nonempty disjunction")
}

fn at(l: Letter, a: &str) -> Formula {
    Formula::letter(l, a)
}

fn at_any(ls: &[Letter], a: &str) -> Formula {
    any(ls.iter().map(|&l| at(l, a)).collect())
}

fn lt(a: &str, b: &str) -> Formula {
    Formula::lt(a, b)
}

fn iff(a: Formula, b: Formula) -> Formula {
    Formula::or(
        Formula::and(a.clone(), b.clone()),
        Formula::and(Formula::not(a), Formula::not(b)),
    )
}

impl Gen {
    fn new() -> Self {
        Gen { next: 0 }
    }

    fn var(&mut self) -> String {
        self.next += 1;
        format!("v{}", self.next)
    }

    /// `b = a + 1`.
    fn next_to(&mut self, a: &str, b: &str) -> Formula {
        let w = self.var();
        Formula::and(
            lt(a, b),
            Formula::not(Formula::exists(&w, Formula::and(lt(a, &w), lt(&w, b)))),
        )
    }

    /// No position strictly between `a` and `b` carries a letter of `ls`.
    fn none_between(&mut self, a: &str, b: &str, ls: &[Letter]) -> Formula {
        let e = self.var();
        Formula::not(Formula::exists(
            &e,
            all(vec![at_any(ls, &e), lt(a, &e), lt(&e, b)]),
        ))
    }

    /// The letters at `a + 1, a + 2, ..` are drawn from `steps` in order.
    fn ahead(&mut self, a: &str, steps: &[&[Letter]]) -> Formula {
        let Some((first, rest)) = steps.split_first() else {
            return Formula::eq(a, a);
        };
        let b = self.var();
        let mut body = vec![at_any(first, &b), self.next_to(a, &b)];
        if !rest.is_empty() {
            body.push(self.ahead(&b, rest));
        }
        Formula::exists(&b, all(body))
    }

    /// The letters at `a - 1, a - 2, ..` are drawn from `steps` in order.
    fn behind(&mut self, a: &str, steps: &[&[Letter]]) -> Formula {
        let Some((first, rest)) = steps.split_first() else {
            return Formula::eq(a, a);
        };
        let b = self.var();
        let mut body = vec![at_any(first, &b), self.next_to(&b, a)];
        if !rest.is_empty() {
            body.push(self.behind(&b, rest));
        }
        Formula::exists(&b, all(body))
    }

    /// `a` opens a level `j-1` sub-block of the level `j` block opened at `s`.
    fn sub(&mut self, j: u32, s: &str, a: &str) -> Formula {
        all(vec![
            at(Open(j - 1), a),
            lt(s, a),
            self.none_between(s, a, &[Close(j)]),
        ])
    }

    /// The bit after the level `i` block opened at `a` is 1.
    fn bit_one(&mut self, i: u32, a: &str) -> Formula {
        let e = self.var();
        let closes = all(vec![
            at(Close(i), &e),
            lt(a, &e),
            self.none_between(a, &e, &[Close(i)]),
        ]);
        Formula::exists(&e, Formula::and(closes, self.ahead(&e, &[&[One]])))
    }

    fn same_bit(&mut self, i: u32, a: &str, b: &str) -> Formula {
        iff(self.bit_one(i, a), self.bit_one(i, b))
    }

    fn equal(&mut self, j: u32, x: &str, y: &str) -> Formula {
        if j == 1 {
            return any(vec![
                Formula::and(self.ahead(x, &[&[Close(1)]]), self.ahead(y, &[&[Close(1)]])),
                Formula::and(
                    self.ahead(x, &[&[Zero], &[Close(1)]]),
                    self.ahead(y, &[&[Zero], &[Close(1)]]),
                ),
                Formula::and(
                    self.ahead(x, &[&[One], &[Close(1)]]),
                    self.ahead(y, &[&[One], &[Close(1)]]),
                ),
            ]);
        }
        // one inclusion, quantified over both orientations
        let (s, t, s1, t1) = (self.var(), self.var(), self.var(), self.var());
        let matched = all(vec![
            self.sub(j, &t, &t1),
            self.equal(j - 1, &s1, &t1),
            self.same_bit(j - 1, &s1, &t1),
        ]);
        let incl = Formula::forall(
            &s1,
            Formula::imp(self.sub(j, &s, &s1), Formula::exists(&t1, matched)),
        );
        let either = |v: &str| Formula::or(Formula::eq(v, x), Formula::eq(v, y));
        Formula::forall(
            &s,
            Formula::imp(
                either(&s),
                Formula::forall(&t, Formula::imp(either(&t), incl)),
            ),
        )
    }

    fn inc(&mut self, j: u32, x: &str, y: &str) -> Formula {
        if j == 1 {
            return Formula::or(
                Formula::and(
                    self.ahead(x, &[&[Close(1)]]),
                    self.ahead(y, &[&[Zero], &[Close(1)]]),
                ),
                Formula::and(
                    self.ahead(x, &[&[Zero], &[Close(1)]]),
                    self.ahead(y, &[&[One], &[Close(1)]]),
                ),
            );
        }
        let from_zero = Formula::and(
            self.ahead(x, &[&[Close(j)]]),
            self.ahead(
                y,
                &[&[Open(j - 1)], &[Close(j - 1)], &[Zero], &[Close(j)]],
            ),
        );
        // c is the lowest 1-bit of y; below it x has ones, at it x has a zero
        let c = self.var();
        let lowest = {
            let d = self.var();
            let below = Formula::and(self.sub(j, y, &d), lt(&d, &c));
            Formula::and(
                self.bit_one(j - 1, &c),
                Formula::forall(&d, Formula::imp(below, Formula::not(self.bit_one(j - 1, &d)))),
            )
        };
        let forward = {
            let (s, t) = (self.var(), self.var());
            let relation = any(vec![
                Formula::and(lt(&t, &c), self.bit_one(j - 1, &s)),
                Formula::and(Formula::eq(&t, &c), Formula::not(self.bit_one(j - 1, &s))),
                Formula::and(lt(&c, &t), self.same_bit(j - 1, &s, &t)),
            ]);
            let body = all(vec![self.sub(j, y, &t), self.equal(j - 1, &s, &t), relation]);
            Formula::forall(&s, Formula::imp(self.sub(j, x, &s), Formula::exists(&t, body)))
        };
        let backward = {
            let (t, s) = (self.var(), self.var());
            let body = Formula::and(self.sub(j, x, &s), self.equal(j - 1, &s, &t));
            Formula::forall(
                &t,
                Formula::imp(
                    Formula::and(self.sub(j, y, &t), Formula::not(Formula::eq(&t, &c))),
                    Formula::exists(&s, body),
                ),
            )
        };
        let counted = Formula::exists(
            &c,
            all(vec![self.sub(j, y, &c), lowest, forward, backward]),
        );
        Formula::or(
            from_zero,
            Formula::and(self.ahead(x, &[&[Open(j - 1)]]), counted),
        )
    }

    /// The block at `x` encodes `Tower(j) - 1`.
    fn max(&mut self, j: u32, x: &str) -> Formula {
        if j == 1 {
            return self.ahead(x, &[&[Zero], &[Close(1)]]);
        }
        let first = {
            let s = self.var();
            let body = all(vec![
                at(Open(j - 1), &s),
                self.next_to(x, &s),
                Formula::not(self.bit_one(j - 1, &s)),
            ]);
            Formula::exists(&s, body)
        };
        let others = {
            let s = self.var();
            let cond = Formula::and(self.sub(j, x, &s), Formula::not(self.next_to(x, &s)));
            Formula::forall(&s, Formula::imp(cond, self.bit_one(j - 1, &s)))
        };
        let last = {
            let (s, r) = (self.var(), self.var());
            let later = Formula::and(self.sub(j, x, &r), lt(&s, &r));
            let body = all(vec![
                self.sub(j, x, &s),
                Formula::not(Formula::exists(&r, later)),
                self.max(j - 1, &s),
            ]);
            Formula::exists(&s, body)
        };
        all(vec![first, others, last])
    }

    /// The level `j` block opened at `s` and closed at `e` is a canonical
    /// `μ_j` encoding, given that its sub-blocks are.
    fn block(&mut self, j: u32, s: &str, e: &str) -> Formula {
        let inner = self.none_between(s, e, &[Open(j), Close(j)]);
        let starts = Formula::or(
            self.ahead(s, &[&[Close(j)]]),
            self.ahead(s, &[&[Open(j - 1)], &[Close(j - 1)]]),
        );
        let layout = {
            let (q, b, r) = (self.var(), self.var(), self.var());
            let then = Formula::exists(
                &r,
                all(vec![
                    Formula::or(at(Open(j - 1), &r), Formula::eq(&r, e)),
                    self.next_to(&b, &r),
                ]),
            );
            let bit = Formula::exists(
                &b,
                all(vec![at_any(&[Zero, One], &b), self.next_to(&q, &b), then]),
            );
            let cond = all(vec![at(Close(j - 1), &q), lt(s, &q), lt(&q, e)]);
            Formula::forall(&q, Formula::imp(cond, bit))
        };
        let counting = {
            let (a, b) = (self.var(), self.var());
            let consecutive = all(vec![
                at(Open(j - 1), &b),
                lt(&a, &b),
                lt(&b, e),
                self.none_between(&a, &b, &[Open(j - 1)]),
            ]);
            Formula::forall(
                &a,
                Formula::imp(
                    self.sub(j, s, &a),
                    Formula::forall(&b, Formula::imp(consecutive, self.inc(j - 1, &a, &b))),
                ),
            )
        };
        let canonical = {
            let a = self.var();
            let cond = all(vec![
                self.sub(j, s, &a),
                self.none_between(&a, e, &[Open(j - 1)]),
                Formula::not(self.next_to(s, &a)),
            ]);
            Formula::forall(&a, Formula::imp(cond, self.bit_one(j - 1, &a)))
        };
        all(vec![inner, starts, layout, counting, canonical])
    }

    fn ok(&mut self, j: u32) -> Formula {
        if j == 1 {
            let (p, q) = (self.var(), self.var());
            let opens = Formula::forall(
                &p,
                Formula::imp(
                    at(Open(1), &p),
                    Formula::or(
                        self.ahead(&p, &[&[Close(1)]]),
                        self.ahead(&p, &[&[Zero], &[Close(1)]]),
                    ),
                ),
            );
            let closes = Formula::forall(
                &q,
                Formula::imp(
                    at(Close(1), &q),
                    Formula::or(
                        self.behind(&q, &[&[Open(1)]]),
                        self.behind(&q, &[&[Zero], &[Open(1)]]),
                    ),
                ),
            );
            return Formula::and(opens, closes);
        }
        let (s, e) = (self.var(), self.var());
        let right = Formula::exists(
            &e,
            all(vec![at(Close(j), &e), lt(&s, &e), self.block(j, &s, &e)]),
        );
        let opens = Formula::forall(&s, Formula::imp(at(Open(j), &s), right));
        let (s, e) = (self.var(), self.var());
        let left = Formula::exists(
            &s,
            all(vec![at(Open(j), &s), lt(&s, &e), self.block(j, &s, &e)]),
        );
        let closes = Formula::forall(&e, Formula::imp(at(Close(j), &e), left));
        Formula::and(opens, closes)
    }

    fn first_last(&mut self, h: u32) -> Formula {
        let (p, q, r, t) = (self.var(), self.var(), self.var(), self.var());
        let first = Formula::forall(
            &p,
            Formula::imp(
                Formula::not(Formula::exists(&q, lt(&q, &p))),
                at(Open(h + 1), &p),
            ),
        );
        let last = Formula::forall(
            &r,
            Formula::imp(
                Formula::not(Formula::exists(&t, lt(&r, &t))),
                at(Close(h + 1), &r),
            ),
        );
        Formula::and(first, last)
    }

    /// Copies of `v_h` abut: `T(h+1)` away from the start exactly after
    /// `E(h+1)`.
    fn copies_abut(&mut self, h: u32) -> Formula {
        let (p, q) = (self.var(), self.var());
        let (a, b) = (self.var(), self.var());
        let opens = Formula::forall(
            &p,
            Formula::imp(
                Formula::and(at(Open(h + 1), &p), Formula::exists(&q, lt(&q, &p))),
                self.behind(&p, &[&[Close(h + 1)]]),
            ),
        );
        let closes = Formula::forall(
            &a,
            Formula::imp(
                Formula::and(at(Close(h + 1), &a), Formula::exists(&b, lt(&a, &b))),
                self.ahead(&a, &[&[Open(h + 1)]]),
            ),
        );
        Formula::and(opens, closes)
    }

    fn dots(&mut self, h: u32) -> Formula {
        let (p, q) = (self.var(), self.var());
        let placed = Formula::forall(
            &p,
            Formula::imp(
                at(Dot, &p),
                Formula::and(
                    self.behind(&p, &[&[Close(h)]]),
                    self.ahead(&p, &[&[Open(h), Close(h + 1)]]),
                ),
            ),
        );
        let required = Formula::forall(
            &q,
            Formula::imp(at(Close(h), &q), self.ahead(&q, &[&[Dot]])),
        );
        Formula::and(placed, required)
    }

    /// Neighbourhood constraints that already follow from the others; they
    /// let partial letter assignments fail early.
    fn shape(&mut self, h: u32) -> Formula {
        let mut items = Vec::new();
        let p = self.var();
        items.push(Formula::forall(
            &p,
            Formula::imp(at(Open(h + 1), &p), self.ahead(&p, &[&[Open(h)]])),
        ));
        let before_bit: Vec<Letter> = std::iter::once(Open(1))
            .chain((1..h).map(Close))
            .collect();
        let p = self.var();
        items.push(Formula::forall(
            &p,
            Formula::imp(at_any(&[Zero, One], &p), self.behind(&p, &[&before_bit])),
        ));
        for j in 2..=h {
            let p = self.var();
            items.push(Formula::forall(
                &p,
                Formula::imp(at(Open(j), &p), self.ahead(&p, &[&[Close(j), Open(j - 1)]])),
            ));
        }
        for j in 1..h {
            let p = self.var();
            items.push(Formula::forall(
                &p,
                Formula::imp(at(Close(j), &p), self.ahead(&p, &[&[Zero, One]])),
            ));
        }
        all(items)
    }

    /// Each copy lists `μ_h(0) .. μ_h(Tower(h) - 1)`.
    fn copies(&mut self, h: u32) -> Formula {
        let (s, e) = (self.var(), self.var());
        let inside = |a: &str| Formula::and(lt(&s, a), lt(a, &e));
        let counting = {
            let (a, b) = (self.var(), self.var());
            let consecutive = all(vec![
                at(Open(h), &b),
                lt(&a, &b),
                lt(&b, &e),
                self.none_between(&a, &b, &[Open(h)]),
            ]);
            Formula::forall(
                &a,
                Formula::imp(
                    Formula::and(at(Open(h), &a), inside(&a)),
                    Formula::forall(&b, Formula::imp(consecutive, self.inc(h, &a, &b))),
                ),
            )
        };
        let ends = {
            let a = self.var();
            let cond = all(vec![
                at(Open(h), &a),
                inside(&a),
                self.none_between(&a, &e, &[Open(h)]),
            ]);
            Formula::forall(&a, Formula::imp(cond, self.max(h, &a)))
        };
        let body = all(vec![
            at(Close(h + 1), &e),
            lt(&s, &e),
            self.none_between(&s, &e, &[Open(h + 1), Close(h + 1)]),
            self.ahead(&s, &[&[Open(h)], &[Close(h)]]),
            self.behind(&e, &[&[Dot], &[Close(h)]]),
            counting,
            ends,
        ]);
        Formula::forall(
            &s,
            Formula::imp(at(Open(h + 1), &s), Formula::exists(&e, body)),
        )
    }

    fn vh_plus(&mut self, h: u32) -> Formula {
        let mut items = vec![self.first_last(h), self.shape(h), self.copies_abut(h), self.dots(h)];
        for j in 1..=h {
            items.push(self.ok(j));
        }
        items.push(self.copies(h));
        all(items)
    }

    fn in_x(&self, a: &str) -> Formula {
        Formula::member(a, NUMBERING_SET)
    }

    /// No `E(h+1)` strictly between `a` and `b`.
    fn same_copy(&mut self, h: u32, a: &str, b: &str) -> Formula {
        self.none_between(a, b, &[Close(h + 1)])
    }

    /// The counter bit of the `μ_h` block at `b`: its following dot is in X.
    fn bit_x(&mut self, b: &str) -> Formula {
        let p = self.var();
        let first = all(vec![
            at(Dot, &p),
            lt(b, &p),
            self.none_between(b, &p, &[Dot]),
        ]);
        Formula::exists(&p, Formula::and(first, self.in_x(&p)))
    }

    /// Every lower counter bit of the copy of `b` is 1.
    fn carry(&mut self, h: u32, b: &str) -> Formula {
        let p = self.var();
        let cond = all(vec![at(Dot, &p), lt(&p, b), self.same_copy(h, &p, b)]);
        Formula::forall(&p, Formula::imp(cond, self.in_x(&p)))
    }

    fn numbering(&mut self, h: u32) -> Formula {
        let p = self.var();
        let conf = Formula::forall(&p, Formula::imp(self.in_x(&p), at(Dot, &p)));
        let (p, e) = (self.var(), self.var());
        let init = Formula::forall(
            &p,
            Formula::imp(
                Formula::and(
                    at(Dot, &p),
                    Formula::not(Formula::exists(&e, Formula::and(at(Close(h + 1), &e), lt(&e, &p)))),
                ),
                Formula::not(self.in_x(&p)),
            ),
        );
        let (p, t) = (self.var(), self.var());
        let fin = Formula::forall(
            &p,
            Formula::imp(
                Formula::and(
                    at(Dot, &p),
                    Formula::not(Formula::exists(&t, Formula::and(at(Open(h + 1), &t), lt(&p, &t)))),
                ),
                self.in_x(&p),
            ),
        );
        let no_overflow = {
            let (e, q, p) = (self.var(), self.var(), self.var());
            let zero = all(vec![
                at(Dot, &p),
                lt(&p, &e),
                self.same_copy(h, &p, &e),
                Formula::not(self.in_x(&p)),
            ]);
            Formula::forall(
                &e,
                Formula::imp(
                    Formula::and(at(Close(h + 1), &e), Formula::exists(&q, lt(&e, &q))),
                    Formula::exists(&p, zero),
                ),
            )
        };
        let step = {
            let (b1, e, b) = (self.var(), self.var(), self.var());
            let later = Formula::exists(&e, Formula::and(at(Close(h + 1), &e), lt(&e, &b1)));
            let previous = {
                let f = self.var();
                let seam = all(vec![
                    at(Close(h + 1), &f),
                    lt(&b, &f),
                    lt(&f, &b1),
                    self.same_copy(h, &b, &f),
                    self.same_copy(h, &f, &b1),
                ]);
                Formula::exists(&f, seam)
            };
            let flips = iff(
                self.bit_x(&b1),
                iff(self.bit_x(&b), Formula::not(self.carry(h, &b))),
            );
            let body = all(vec![
                at(Open(h), &b),
                lt(&b, &b1),
                previous,
                self.equal(h, &b, &b1),
                flips,
            ]);
            Formula::forall(
                &b1,
                Formula::imp(Formula::and(at(Open(h), &b1), later), Formula::exists(&b, body)),
            )
        };
        all(vec![conf, init, fin, no_overflow, step])
    }

    fn xi(&mut self, h: u32) -> Formula {
        let p = self.var();
        let alphabet = dotted_alphabet(h);
        let mut items = vec![at_any(&alphabet, &p)];
        for (i, &a) in alphabet.iter().enumerate() {
            for &b in &alphabet[i + 1..] {
                items.push(Formula::not(Formula::and(at(a, &p), at(b, &p))));
            }
        }
        Formula::forall(&p, all(items))
    }
}

fn check_height(h: u32) -> Result<()> {
    if h == 0 {
        return Err(Error::Precondition("tower formulas start at height 1".into()));
    }
    Ok(())
}

/// `equal_h(x, y)`: the `μ_h` blocks opened at `x` and `y` encode the same
/// number.
pub fn gen_equal(h: u32) -> Result<Formula> {
    check_height(h)?;
    Ok(Gen::new().equal(h, "x", "y"))
}

/// `inc_h(x, y)`: the block at `y` encodes one more than the block at `x`.
pub fn gen_inc(h: u32) -> Result<Formula> {
    check_height(h)?;
    Ok(Gen::new().inc(h, "x", "y"))
}

/// `max_h(x)`: the block at `x` encodes `Tower(h) - 1`.
pub fn gen_max(h: u32) -> Result<Formula> {
    check_height(h)?;
    Ok(Gen::new().max(h, "x"))
}

/// `ok_j`: every level `j` tag belongs to a canonical `μ_j` block, assuming
/// the lower levels are canonical.
pub fn gen_ok(j: u32) -> Result<Formula> {
    check_height(j)?;
    Ok(Gen::new().ok(j))
}

/// A first-order sentence defining `(v_h)+`.
pub fn gen_vh_plus(h: u32) -> Result<Formula> {
    check_height(h)?;
    Ok(Gen::new().vh_plus(h))
}

/// `Φ_h = ∃X (..)`: true exactly on `w_h`.
pub fn gen_phi(h: u32) -> Result<Formula> {
    check_height(h)?;
    let mut g = Gen::new();
    let matrix = Formula::and(g.vh_plus(h), g.numbering(h));
    Ok(Formula::exists_set(NUMBERING_SET, matrix))
}

/// `ξ_h`: every position carries exactly one letter.
pub fn gen_xi(h: u32) -> Result<Formula> {
    check_height(h)?;
    Ok(Gen::new().xi(h))
}

/// `Ψ_h`: a monadic `Σ¹₁` sentence over pure orders, true in `A_N` iff
/// `N = ℓ(h)`.
pub fn gen_psi(h: u32) -> Result<Formula> {
    check_height(h)?;
    let mut g = Gen::new();
    let matrix = all(vec![g.xi(h), g.vh_plus(h), g.numbering(h)]).letters_to_sets();
    let numbered = Formula::exists_set(NUMBERING_SET, matrix);
    Ok(dotted_alphabet(h)
        .into_iter()
        .rev()
        .fold(numbered, |f, l| Formula::exists_set(l.set_name(), f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{eval_fo, eval_mso, Assignment, MsoMode, SetAssignment, Verdict};
    use crate::families::tower::{block_values, build_vh_wh};
    use crate::guard::Guards;
    use crate::structures::{LabeledString, Structure};

    fn holds(f: &Formula, w: &LabeledString) -> bool {
        eval_fo(f, &Structure::from(w.clone()), &Assignment::new()).unwrap()
    }

    #[test]
    fn equal_and_inc_on_w1() {
        let g = Guards::default();
        let w = build_vh_wh(1, &g).unwrap().w;
        let s = Structure::from(w.clone());
        let blocks = block_values(&w, 1).unwrap();
        let (eq, inc) = (gen_equal(1).unwrap(), gen_inc(1).unwrap());
        for &(p, m) in &blocks {
            for &(q, n) in &blocks {
                let a = Assignment::from([("x".to_string(), p), ("y".to_string(), q)]);
                assert_eq!(eval_fo(&eq, &s, &a).unwrap(), m == n);
                assert_eq!(eval_fo(&inc, &s, &a).unwrap(), m + 1 == n);
            }
        }
    }

    #[test]
    fn vh_plus_small() {
        let g = Guards::default();
        let f = gen_vh_plus(1).unwrap();
        let v = build_vh_wh(1, &g).unwrap().v;
        assert!(holds(&f, &v));
        assert!(holds(&f, &v.repeat(2)));
        let mut broken = v.repeat(2);
        broken.letters.remove(5);
        assert!(!holds(&f, &broken));
        assert!(!holds(&f, &LabeledString::parse(1, "T2 T1 E1 dot E2").unwrap()));
    }

    #[test]
    fn phi_1_counts_copies() {
        let g = Guards::default();
        let f = gen_phi(1).unwrap();
        let v = build_vh_wh(1, &g).unwrap().v;
        for k in 1..=5 {
            let s = Structure::from(v.repeat(k));
            let verdict = eval_mso(&f, &s, &MsoMode::Restricted(Dot), &g).unwrap();
            assert_eq!(verdict == Verdict::True, k == 4, "k={k}");
        }
    }

    #[test]
    fn sizes_are_polynomial() {
        let sizes: Vec<usize> = (1..=4).map(|h| gen_psi(h).unwrap().size()).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]));
        assert!(gen_equal(0).is_err());
    }

    #[test]
    fn equal_and_inc_on_w2() {
        let g = Guards::default();
        let w = build_vh_wh(2, &g).unwrap().w;
        let s = Structure::from(w.clone());
        let blocks = block_values(&w, 2).unwrap();
        let (eq, inc, mx) = (gen_equal(2).unwrap(), gen_inc(2).unwrap(), gen_max(2).unwrap());
        let mut ev_eq = crate::evaluator::Evaluator::new(&eq, &s).unwrap();
        let mut ev_inc = crate::evaluator::Evaluator::new(&inc, &s).unwrap();
        let mut ev_max = crate::evaluator::Evaluator::new(&mx, &s).unwrap();
        for &(p, m) in &blocks {
            assert_eq!(ev_max.holds_xyz([p, 0, 0]).unwrap(), m == 3);
            for &(q, n) in &blocks {
                assert_eq!(ev_eq.holds_xyz([p, q, 0]).unwrap(), m == n);
                assert_eq!(ev_inc.holds_xyz([p, q, 0]).unwrap(), m + 1 == n);
            }
        }
    }

    #[test]
    fn phi_2_witness() {
        let g = Guards::default();
        let w = build_vh_wh(2, &g).unwrap().w;
        let witness = SetAssignment::from([(
            NUMBERING_SET.to_string(),
            crate::families::tower::canonical_numbering(2, &g).unwrap(),
        )]);
        let s = Structure::from(w);
        let v = eval_mso(&gen_phi(2).unwrap(), &s, &MsoMode::Witness(witness), &g).unwrap();
        assert_eq!(v, Verdict::True);
    }

    #[test]
    fn psi_1() {
        let g = Guards::default();
        let f = gen_psi(1).unwrap();
        let witness = crate::families::tower::canonical_letter_witness(1, &g).unwrap();
        let s = Structure::from(crate::structures::LinearOrder { n: 35 });
        assert_eq!(eval_mso(&f, &s, &MsoMode::Witness(witness), &g).unwrap(), Verdict::True);
        for n in 0..=12 {
            let s = Structure::from(crate::structures::LinearOrder { n });
            assert_eq!(eval_mso(&f, &s, &MsoMode::Exhaustive, &g).unwrap(), Verdict::False);
        }
    }
}
