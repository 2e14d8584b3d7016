//! Finite linear orders, labeled strings, interpretations and the order-type
//! primitives used by separators: differences, `<`-types and capped d-types.

use crate::error::{Error, Result};
use crate::formula::{dotted_alphabet, Letter};
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// The linear order on `{0, .., n}` with successor, `min = 0` and `max = n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LinearOrder {
    pub n: usize,
}

impl LinearOrder {
    pub fn new(n: usize) -> Self {
        LinearOrder { n }
    }

    /// Number of elements, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> usize {
        0
    }

    pub fn max(&self) -> usize {
        self.n
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        a < b
    }

    pub fn succ(&self, a: usize, b: usize) -> bool {
        a + 1 == b
    }
}

impl fmt::Display for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A:{}", self.n)
    }
}

impl FromStr for LinearOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .trim()
            .strip_prefix("A:")
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| Error::parse(0, format!("bad linear order literal `{s}`")))?;
        Ok(LinearOrder::new(n))
    }
}

/// A nonempty string over the dotted alphabet of height `h`. Positions are
/// 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledString {
    pub h: u32,
    pub letters: Vec<Letter>,
}

impl LabeledString {
    pub fn new(h: u32, letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Precondition("strings must be nonempty".into()));
        }
        let alphabet = dotted_alphabet(h);
        if let Some(bad) = letters.iter().find(|l| !alphabet.contains(l)) {
            return Err(Error::Signature(format!(
                "letter `{bad}` is not in the dotted alphabet of height {h}"
            )));
        }
        Ok(LabeledString { h, letters })
    }

    /// Parses whitespace-separated letter names such as `"T2 T1 E1 dot E2"`.
    pub fn parse(h: u32, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut offset = 0;
        for word in text.split_whitespace() {
            let at = text[offset..].find(word).map(|i| i + offset).unwrap_or(0);
            offset = at + word.len();
            let l: Letter = word
                .parse()
                .map_err(|_| Error::parse(at, format!("unknown letter `{word}`")))?;
            letters.push(l);
        }
        LabeledString::new(h, letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, pos: usize) -> Letter {
        self.letters[pos]
    }

    /// Positions carrying `l`.
    pub fn positions_of(&self, l: Letter) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.letters[p] == l).collect()
    }

    /// The linear order underlying the string.
    pub fn order(&self) -> LinearOrder {
        LinearOrder::new(self.len() - 1)
    }

    /// `self` repeated `k` times.
    pub fn repeat(&self, k: usize) -> LabeledString {
        LabeledString {
            h: self.h,
            letters: self.letters.repeat(k),
        }
    }
}

impl fmt::Display for LabeledString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A structure formulas are evaluated on: a linear order or a labeled string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Order(LinearOrder),
    String(LabeledString),
}

impl Structure {
    /// Largest element; the universe is `{0, .., max}`.
    pub fn max(&self) -> usize {
        match self {
            Structure::Order(o) => o.n,
            Structure::String(s) => s.len() - 1,
        }
    }

    pub fn letter(&self, pos: usize) -> Option<Letter> {
        match self {
            Structure::Order(_) => None,
            Structure::String(s) => s.letters.get(pos).copied(),
        }
    }

    pub fn as_string(&self) -> Option<&LabeledString> {
        match self {
            Structure::String(s) => Some(s),
            Structure::Order(_) => None,
        }
    }
}

impl From<LinearOrder> for Structure {
    fn from(o: LinearOrder) -> Self {
        Structure::Order(o)
    }
}

impl From<LabeledString> for Structure {
    fn from(s: LabeledString) -> Self {
        Structure::String(s)
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Order(o) => write!(f, "{o}"),
            Structure::String(s) => write!(f, "{s}"),
        }
    }
}

/// The five points an interpretation assigns: the two constants and the
/// three variables. The derived order `min ≺ x ≺ y ≺ z ≺ max` breaks ties in
/// [`d_type`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Point {
    Min,
    X,
    Y,
    Z,
    Max,
}

impl Point {
    pub const ALL: [Point; 5] = [Point::Min, Point::X, Point::Y, Point::Z, Point::Max];
    pub const VARIABLES: [Point; 3] = [Point::X, Point::Y, Point::Z];

    /// Variable point for a variable name `x`, `y` or `z`.
    pub fn from_var(name: &str) -> Option<Point> {
        match name {
            "x" => Some(Point::X),
            "y" => Some(Point::Y),
            "z" => Some(Point::Z),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Point::Min => "min",
            Point::X => "x",
            Point::Y => "y",
            Point::Z => "z",
            Point::Max => "max",
        }
    }

    pub fn is_variable(self) -> bool {
        matches!(self, Point::X | Point::Y | Point::Z)
    }

    fn var_index(self) -> Option<usize> {
        match self {
            Point::X => Some(0),
            Point::Y => Some(1),
            Point::Z => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A linear order `A_n` with an assignment of `x`, `y`, `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interpretation {
    pub n: usize,
    pub vars: [usize; 3],
}

impl Interpretation {
    /// Panics if an assigned value lies outside `{0, .., n}`.
    pub fn new(n: usize, vars: [usize; 3]) -> Self {
        assert!(
            vars.iter().all(|&v| v <= n),
            "assignment {vars:?} outside A_{n}"
        );
        Interpretation { n, vars }
    }

    /// The all-zero assignment over `A_n`.
    pub fn zero(n: usize) -> Self {
        Interpretation { n, vars: [0; 3] }
    }

    pub fn order(&self) -> LinearOrder {
        LinearOrder::new(self.n)
    }

    /// Value of a point, with `min = 0` and `max = n`.
    pub fn value(&self, p: Point) -> usize {
        match p {
            Point::Min => 0,
            Point::Max => self.n,
            v => self.vars[v.var_index().expect("variable point")],
        }
    }

    /// The interpretation with variable `p` reassigned to `a`.
    pub fn with(&self, p: Point, a: usize) -> Interpretation {
        let mut out = *self;
        out.vars[p.var_index().expect("only variables can be reassigned")] = a;
        out
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A:{} x:{} y:{} z:{}",
            self.n, self.vars[0], self.vars[1], self.vars[2]
        )
    }
}

impl Serialize for Interpretation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Interpretation {
    type Err = Error;

    /// Accepts `"A:N"` optionally followed by `x:a y:b z:c` or `x=a,y=b`
    /// in any order; unassigned variables default to 0.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::parse(0, format!("bad interpretation `{s}`: {m}"));
        let mut parts = s.split(|c: char| c.is_whitespace() || c == ',').filter(|p| !p.is_empty());
        let head = parts.next().ok_or_else(|| bad("empty"))?;
        let order: LinearOrder = head.parse()?;
        let mut vars = [0usize; 3];
        for part in parts {
            let (name, value) = part
                .split_once([':', '='])
                .ok_or_else(|| bad("expected name:value"))?;
            let p = Point::from_var(name).ok_or_else(|| bad("unknown variable"))?;
            let v: usize = value.parse().map_err(|_| bad("bad value"))?;
            if v > order.n {
                return Err(bad("value outside the universe"));
            }
            vars[p.var_index().unwrap()] = v;
        }
        Ok(Interpretation::new(order.n, vars))
    }
}

pub fn diff(m: i64, n: i64) -> i64 {
    m - n
}

/// `<`-type of a pair of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LtType {
    Less,
    Equal,
    Greater,
}

impl fmt::Display for LtType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LtType::Less => "<",
            LtType::Equal => "=",
            LtType::Greater => ">",
        })
    }
}

pub fn lt_type(m: i64, n: i64) -> LtType {
    match m.cmp(&n) {
        Ordering::Less => LtType::Less,
        Ordering::Equal => LtType::Equal,
        Ordering::Greater => LtType::Greater,
    }
}

/// Order pattern of the five points plus the gaps between neighbours, each
/// capped at `2^(d+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DType {
    pub d: u32,
    pub ord: [Point; 5],
    pub dist: [u64; 4],
}

pub fn d_type(i: &Interpretation, d: u32) -> DType {
    let mut ord = Point::ALL;
    ord.sort_by_key(|&p| (i.value(p), p));
    let cap = 1u64.checked_shl(d + 1).unwrap_or(u64::MAX);
    let mut dist = [0u64; 4];
    for k in 0..4 {
        let gap = (i.value(ord[k + 1]) - i.value(ord[k])) as u64;
        dist[k] = gap.min(cap);
    }
    DType { d, ord, dist }
}

pub fn types_equal(t1: &DType, t2: &DType) -> Result<bool> {
    if t1.d != t2.d {
        return Err(Error::DepthMismatch(t1.d, t2.d));
    }
    Ok(t1.ord == t2.ord && t1.dist == t2.dist)
}

/// Every interpretation over `A_n`.
pub fn all_interpretations(n: usize) -> impl Iterator<Item = Interpretation> {
    (0..=n).flat_map(move |x| {
        (0..=n).flat_map(move |y| (0..=n).map(move |z| Interpretation::new(n, [x, y, z])))
    })
}
