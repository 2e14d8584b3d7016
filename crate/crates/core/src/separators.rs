//! Potential separators over the ten pairs of `{min, max, x, y, z}`, their
//! weights, the constructive builders used in the lower-bound argument, and an
//! exact minimal-separator search.
//!
//! Weights are kept in squared integer form `c² + b` so that every comparison
//! made by the certificate checks is exact.

use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::structures::{lt_type, Interpretation, Point};
use num_traits::{Float, PrimInt, Unsigned};
use serde::Serialize;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

/// Entry type of a potential separator.
pub trait Natural: PrimInt + Unsigned + Hash + fmt::Debug + fmt::Display + FromStr {}

impl<T: PrimInt + Unsigned + Hash + fmt::Debug + fmt::Display + FromStr> Natural for T {}

/// The ten two-element subsets in canonical order.
pub const PAIRS: [(Point, Point); 10] = [
    (Point::Min, Point::Max),
    (Point::X, Point::Y),
    (Point::X, Point::Z),
    (Point::Y, Point::Z),
    (Point::Min, Point::X),
    (Point::Min, Point::Y),
    (Point::Min, Point::Z),
    (Point::X, Point::Max),
    (Point::Y, Point::Max),
    (Point::Z, Point::Max),
];

/// Index of the unordered pair `{a, b}` in [`PAIRS`].
pub fn pair_index(a: Point, b: Point) -> Option<usize> {
    PAIRS
        .iter()
        .position(|&(p, q)| (p, q) == (a, b) || (p, q) == (b, a))
}

const CENTRE: [usize; 3] = [1, 2, 3];

fn pair_name(i: usize) -> String {
    let (a, b) = PAIRS[i];
    format!("{{{a},{b}}}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PotentialSeparator<N: Natural> {
    pub entries: [N; 10],
}

impl<N: Natural> Default for PotentialSeparator<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<N: Natural> PotentialSeparator<N> {
    pub fn zero() -> Self {
        PotentialSeparator {
            entries: [N::zero(); 10],
        }
    }

    pub fn uniform(v: N) -> Self {
        PotentialSeparator { entries: [v; 10] }
    }

    pub fn get(&self, a: Point, b: Point) -> N {
        self.entries[pair_index(a, b).expect("pair of distinct points")]
    }

    pub fn set(&mut self, a: Point, b: Point, v: N) {
        self.entries[pair_index(a, b).expect("pair of distinct points")] = v;
    }

    pub fn with(mut self, a: Point, b: Point, v: N) -> Self {
        self.set(a, b, v);
        self
    }

    pub fn border_distance(&self) -> N {
        let mut best = self.get(Point::Min, Point::Max);
        for u in Point::VARIABLES {
            for v in Point::VARIABLES {
                best = best.max(self.get(Point::Min, u) + self.get(v, Point::Max));
            }
        }
        best
    }

    /// Sum of the two largest entries among `{x,y}`, `{x,z}`, `{y,z}`.
    pub fn centre_distance(&self) -> N {
        let mut c = [
            self.entries[CENTRE[0]],
            self.entries[CENTRE[1]],
            self.entries[CENTRE[2]],
        ];
        c.sort();
        c[1] + c[2]
    }

    pub fn weight(&self) -> Weight {
        Weight::new(
            self.centre_distance().to_u128().unwrap_or(u128::MAX),
            self.border_distance().to_u128().unwrap_or(u128::MAX),
        )
    }

    /// Pointwise sum; separates `⟨A1 ∪ A2, B⟩` when the summands separate
    /// `⟨A1, B⟩` and `⟨A2, B⟩`.
    pub fn combine_boolean(&self, other: &Self) -> Self {
        let mut out = *self;
        for (e, o) in out.entries.iter_mut().zip(other.entries) {
            *e = *e + o;
        }
        out
    }

    /// The separator for a quantifier node binding `u`, built from a separator
    /// of its child.
    pub fn lift_quantifier(&self, u: Point) -> Result<Self> {
        if !u.is_variable() {
            return Err(Error::Precondition(format!(
                "quantified point must be a variable, got `{u}`"
            )));
        }
        let one = N::one();
        let d = |a: Point, b: Point| self.get(a, b);
        let hop = |a: Point, b: Point| d(a, u) + d(u, b) + one;
        let mut out = Self::zero();
        for &(a, b) in &PAIRS {
            let v = if a == u || b == u {
                N::zero()
            } else {
                d(a, b).max(hop(a, b))
            };
            out.set(a, b, v);
        }
        Ok(out)
    }

    /// Whether `self` separates `⟨A, B⟩`.
    pub fn is_separator(&self, a: &[Interpretation], b: &[Interpretation]) -> bool {
        a.iter().all(|i| {
            b.iter().all(|j| {
                thresholds(i, j).iter().enumerate().any(|(p, t)| match t {
                    Some(t) => self.entries[p].to_u64().is_none_or(|e| e >= *t),
                    None => false,
                })
            })
        })
    }

    /// Converts the entries to another natural type, failing on overflow.
    pub fn cast<M: Natural>(&self) -> Option<PotentialSeparator<M>> {
        let mut out = PotentialSeparator::<M>::zero();
        for (o, e) in out.entries.iter_mut().zip(self.entries) {
            *o = M::from(e)?;
        }
        Some(out)
    }
}

impl<N: Natural> fmt::Display for PotentialSeparator<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:{}", pair_name(i), e)?;
        }
        Ok(())
    }
}

impl<N: Natural> Serialize for PotentialSeparator<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_point(s: &str) -> Option<Point> {
    match s.trim() {
        "min" => Some(Point::Min),
        "max" => Some(Point::Max),
        v => Point::from_var(v),
    }
}

impl<N: Natural> FromStr for PotentialSeparator<N> {
    type Err = Error;

    /// Accepts `{a,b}:v` items separated by whitespace, in any order; missing
    /// pairs default to 0.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Self::zero();
        let mut seen = [false; 10];
        let mut offset = 0;
        for item in s.split_whitespace() {
            let at = s[offset..].find(item).map_or(0, |i| i + offset);
            offset = at + item.len();
            let bad = || Error::parse(at, format!("bad separator entry `{item}`"));
            let (pair, value) = item.rsplit_once(':').ok_or_else(bad)?;
            let inner = pair
                .strip_prefix('{')
                .and_then(|p| p.strip_suffix('}'))
                .ok_or_else(bad)?;
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            let (a, b) = (parse_point(a).ok_or_else(bad)?, parse_point(b).ok_or_else(bad)?);
            let idx = pair_index(a, b).ok_or_else(bad)?;
            if seen[idx] {
                return Err(Error::parse(at, format!("pair {} given twice", pair_name(idx))));
            }
            seen[idx] = true;
            out.entries[idx] = value.parse::<N>().map_err(|_| bad())?;
        }
        Ok(out)
    }
}

/// A weight `sqrt(c² + b)` held exactly as its centre and border distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Weight {
    pub centre: u128,
    pub border: u128,
}

impl Weight {
    pub fn new(centre: u128, border: u128) -> Self {
        Weight { centre, border }
    }

    /// `w² = c² + b`.
    pub fn squared(&self) -> u128 {
        self.centre
            .saturating_mul(self.centre)
            .saturating_add(self.border)
    }

    pub fn value<F: Float>(&self) -> F {
        F::from(self.squared()).map_or(F::infinity(), F::sqrt)
    }

    /// `w(self) ≤ w(a) + w(b)`, decided without floating point.
    pub fn le_sum(&self, a: &Weight, b: &Weight) -> bool {
        let (w, w1, w2) = (self.squared(), a.squared(), b.squared());
        match w.checked_sub(w1.saturating_add(w2)) {
            None | Some(0) => true,
            Some(r) => sq_le(r, 4, w1, w2),
        }
    }

    /// `w(self) ≤ w(a) + k`.
    pub fn le_plus(&self, a: &Weight, k: u64) -> bool {
        let (w, w1, k) = (self.squared(), a.squared(), k as u128);
        match w.checked_sub(w1.saturating_add(k * k)) {
            None | Some(0) => true,
            Some(r) => sq_le(r, 4 * k * k, w1, 1),
        }
    }

    /// `w(self) ≤ k`.
    pub fn le_int(&self, k: u64) -> bool {
        self.squared() <= (k as u128) * (k as u128)
    }

    /// `n ≥ ½·w(self)`.
    pub fn half_le(&self, n: u64) -> bool {
        4 * (n as u128) * (n as u128) >= self.squared()
    }
}

/// `r² ≤ f·x·y` without overflow on the operands this crate produces.
fn sq_le(r: u128, f: u128, x: u128, y: u128) -> bool {
    match (r.checked_mul(r), f.checked_mul(x).and_then(|v| v.checked_mul(y))) {
        (Some(l), Some(rhs)) => l <= rhs,
        (None, Some(_)) => false,
        (_, None) => {
            let (l, rhs) = (r as f64 * r as f64, f as f64 * x as f64 * y as f64);
            l <= rhs
        }
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.squared().cmp(&other.squared())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sqrt({})", self.squared())
    }
}

/// Per-pair thresholds `t_p(I, J)`: `δ` separates `I` from `J` iff
/// `δ(p) ≥ t_p` for some pair with a finite threshold. `None` is infinity.
pub fn thresholds(i: &Interpretation, j: &Interpretation) -> [Option<u64>; 10] {
    let mut out = [None; 10];
    for (k, &(a, b)) in PAIRS.iter().enumerate() {
        let (ia, ib) = (i.value(a) as i64, i.value(b) as i64);
        let (ja, jb) = (j.value(a) as i64, j.value(b) as i64);
        out[k] = if lt_type(ia, ib) != lt_type(ja, jb) {
            Some(1)
        } else if ia - ib != ja - jb {
            let m = (ia - ib).unsigned_abs().min((ja - jb).unsigned_abs());
            Some(m.max(1))
        } else {
            None
        };
    }
    out
}

/// Every entry `2^(d+1)`: separates any two sets that some depth-`d` formula
/// over `<` tells apart.
pub fn separator_from_depth(d: u32) -> crate::Separator {
    PotentialSeparator::uniform(1u64.checked_shl(d + 1).unwrap_or(u64::MAX))
}

/// `m` on `{min, max}` and zero elsewhere.
pub fn cor4_separator(m: u64) -> Result<crate::Separator> {
    if m == 0 {
        return Err(Error::Precondition(
            "the all-zero map separates nothing; m must be at least 1".into(),
        ));
    }
    Ok(crate::Separator::zero().with(Point::Min, Point::Max, m))
}

type Constraint = [Option<u64>; 10];

fn satisfies(e: &[u64; 10], c: &Constraint) -> bool {
    c.iter()
        .zip(e)
        .any(|(t, v)| matches!(t, Some(t) if v >= t))
}

/// `a` is implied by `b`: every map meeting `b` meets `a`.
fn implied_by(a: &Constraint, b: &Constraint) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    })
}

fn squared_weight(e: &[u64; 10]) -> u128 {
    PotentialSeparator { entries: *e }.weight().squared()
}

/// The reduced constraint system of a separator query, or `None` when some
/// pair of interpretations cannot be separated at all.
fn constraints(
    a: &[Interpretation],
    b: &[Interpretation],
    guards: &Guards,
) -> Result<Option<Vec<Constraint>>> {
    let pairs = a.len().saturating_mul(b.len());
    if pairs > guards.separator_pairs {
        return Err(Error::guard(format!(
            "{pairs} interpretation pairs exceed the separator guard of {}",
            guards.separator_pairs
        )));
    }
    let mut set = BTreeSet::new();
    for i in a {
        for j in b {
            let t = thresholds(i, j);
            if t.iter().all(Option::is_none) {
                return Ok(None);
            }
            set.insert(t);
        }
    }
    let all: Vec<Constraint> = set.into_iter().collect();
    let mut kept = Vec::new();
    for (k, c) in all.iter().enumerate() {
        let redundant = all
            .iter()
            .enumerate()
            .any(|(l, d)| l != k && d != c && implied_by(c, d));
        if !redundant {
            kept.push(*c);
        }
    }
    Ok(Some(kept))
}

struct Search<'a> {
    constraints: &'a [Constraint],
    best: Option<(u128, [u64; 10])>,
    visited: HashSet<[u64; 10]>,
}

impl Search<'_> {
    fn run(&mut self, e: [u64; 10]) {
        if !self.visited.insert(e) {
            return;
        }
        let w = squared_weight(&e);
        if let Some((bw, _)) = self.best {
            if w > bw {
                return;
            }
        }
        // branch on the open constraint with the fewest ways to close it
        let open = self
            .constraints
            .iter()
            .filter(|c| !satisfies(&e, c))
            .min_by_key(|c| c.iter().filter(|t| t.is_some()).count());
        let Some(c) = open else {
            let better = match self.best {
                None => true,
                Some((bw, be)) => (w, e) < (bw, be),
            };
            if better {
                self.best = Some((w, e));
            }
            return;
        };
        let mut options: Vec<(u128, [u64; 10])> = c
            .iter()
            .enumerate()
            .filter_map(|(p, t)| {
                let t = (*t)?;
                let mut next = e;
                next[p] = next[p].max(t);
                Some((squared_weight(&next), next))
            })
            .collect();
        options.sort();
        for (_, next) in options {
            self.run(next);
        }
    }
}

/// A minimum-weight separator for `⟨A, B⟩`, or `None` if no separator exists.
/// Among minimum-weight separators the lexicographically least entry vector is
/// returned.
pub fn minimal_separator(
    a: &[Interpretation],
    b: &[Interpretation],
    guards: &Guards,
) -> Result<Option<crate::Separator>> {
    let Some(cs) = constraints(a, b, guards)? else {
        return Ok(None);
    };
    let mut search = Search {
        constraints: &cs,
        best: None,
        visited: HashSet::new(),
    };
    search.run([0; 10]);
    let (_, e) = search
        .best
        .ok_or_else(|| Error::Invariant("separator search found no solution".into()))?;
    Ok(Some(PotentialSeparator { entries: e }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Separator;

    fn i(n: usize, v: [usize; 3]) -> Interpretation {
        Interpretation::new(n, v)
    }

    #[test]
    fn definition_examples() {
        let d2 = Separator::zero().with(Point::Min, Point::Max, 2);
        assert!(d2.is_separator(&[Interpretation::zero(2)], &[Interpretation::zero(3)]));
        assert!(!Separator::zero().is_separator(&[Interpretation::zero(2)], &[Interpretation::zero(3)]));
        assert!(!d2.is_separator(&[Interpretation::zero(3)], &[Interpretation::zero(5)]));
    }

    #[test]
    fn weights() {
        let z = Separator::zero().weight();
        assert_eq!((z.centre, z.border, z.squared()), (0, 0, 0));
        let d = cor4_separator(7).unwrap().weight();
        assert_eq!((d.centre, d.border), (0, 7));
        let u = separator_from_depth(2);
        assert_eq!(u.entries, [8; 10]);
        let w = u.weight();
        assert_eq!((w.centre, w.border, w.squared()), (16, 16, 272));
        assert!((cor4_separator(4).unwrap().weight().value::<f64>() - 2.0).abs() < 1e-12);
        assert_eq!(separator_from_depth(0).entries, [2; 10]);
        assert!(cor4_separator(0).is_err());
    }

    #[test]
    fn border_allows_same_variable() {
        let d = Separator::zero()
            .with(Point::Min, Point::X, 3)
            .with(Point::X, Point::Max, 4);
        assert_eq!(d.border_distance(), 7);
    }

    #[test]
    fn lift_examples() {
        let l = Separator::zero().lift_quantifier(Point::Z).unwrap();
        for (k, &(a, b)) in PAIRS.iter().enumerate() {
            let want = if a == Point::Z || b == Point::Z { 0 } else { 1 };
            assert_eq!(l.entries[k], want, "{a},{b}");
        }
        let l = Separator::uniform(1).lift_quantifier(Point::Z).unwrap();
        for (k, &(a, b)) in PAIRS.iter().enumerate() {
            let want = if a == Point::Z || b == Point::Z { 0 } else { 3 };
            assert_eq!(l.entries[k], want);
        }
        assert!(Separator::zero().lift_quantifier(Point::Max).is_err());
    }

    #[test]
    fn combine_examples() {
        let s = cor4_separator(2)
            .unwrap()
            .combine_boolean(&cor4_separator(3).unwrap());
        assert_eq!(s.get(Point::Max, Point::Min), 5);
        assert_eq!(Separator::zero().combine_boolean(&Separator::zero()), Separator::zero());
    }

    #[test]
    fn literal_round_trip() {
        let d = Separator::zero()
            .with(Point::Min, Point::Max, 4)
            .with(Point::Y, Point::Z, 2);
        let text = d.to_string();
        assert!(text.starts_with("{min,max}:4 {x,y}:0 {x,z}:0 {y,z}:2 {min,x}:0"));
        assert_eq!(text.parse::<Separator>().unwrap(), d);
        assert_eq!("{max,min}:4 {z,y}:2".parse::<Separator>().unwrap(), d);
        assert!("{min,min}:1".parse::<Separator>().is_err());
        assert!("{min,max}:1 {max,min}:2".parse::<Separator>().is_err());
        assert!("{min,max}:-1".parse::<Separator>().is_err());
    }

    #[test]
    fn generic_entries() {
        let d: crate::Separator32 = "{min,max}:9".parse().unwrap();
        assert_eq!(d.weight().squared(), 9);
        let wide: crate::Separator128 = d.cast().unwrap();
        assert_eq!(wide.border_distance(), 9u128);
    }

    #[test]
    fn thresholds_cases() {
        let t = thresholds(&i(5, [1, 3, 3]), &i(5, [3, 1, 3]));
        // x<y vs x>y
        assert_eq!(t[pair_index(Point::X, Point::Y).unwrap()], Some(1));
        // {min,max}: identical
        assert_eq!(t[0], None);
        // {x,z}: diffs -2 vs 0 -> lt types differ
        assert_eq!(t[pair_index(Point::X, Point::Z).unwrap()], Some(1));
        let t = thresholds(&Interpretation::zero(4), &Interpretation::zero(9));
        assert_eq!(t[0], Some(4));
    }

    #[test]
    fn minimal_separator_cor4() {
        let g = Guards::default();
        for m in 1..=6 {
            let d = minimal_separator(&[Interpretation::zero(m)], &[Interpretation::zero(m + 1)], &g)
                .unwrap()
                .unwrap();
            assert_eq!(d.weight().squared(), m as u128);
        }
    }

    #[test]
    fn degenerate_inputs() {
        let g = Guards::default();
        let a = [i(3, [1, 2, 3])];
        assert_eq!(minimal_separator(&a, &a, &g).unwrap(), None);
        assert_eq!(minimal_separator(&a, &[], &g).unwrap(), Some(Separator::zero()));
    }

    #[test]
    fn exact_comparisons() {
        let w = |s: u128| Weight::new(0, s);
        // sqrt(9) <= sqrt(4) + sqrt(1)
        assert!(w(9).le_sum(&w(4), &w(1)));
        assert!(!w(10).le_sum(&w(4), &w(1)));
        // sqrt(16) <= sqrt(4) + 2
        assert!(w(16).le_plus(&w(4), 2));
        assert!(!w(17).le_plus(&w(4), 2));
        assert!(w(1).le_int(1));
        assert!(!w(2).le_int(1));
        assert!(w(4).half_le(1));
        assert!(!w(5).half_le(1));
    }
}
