//! Model checking for first-order and monadic second-order formulas over
//! linear orders and labeled strings.
//!
//! A formula is compiled once per structure into an indexed program. Every
//! first-order quantifier node owns a truth table keyed by the values of its
//! free variables; entries are filled lazily and reused across queries, so a
//! width-`k` formula costs at most `size · (N+1)^k` quantifier steps. Two
//! refinements keep large instances cheap:
//!
//! * guarded quantifiers `∀v((v=t1 ∨ ..) → ψ)` and `∃v((v=t1 ∨ ..) ∧ ψ)` are
//!   evaluated by substituting the values of `t1, ..` instead of ranging over
//!   the universe;
//! * truth values are three-valued (Kleene). Set variables whose membership is
//!   not yet decided read as unknown, which lets the set-quantifier search
//!   discard partial assignments as soon as the matrix is definitely false.

use crate::error::{Error, Result};
use crate::formula::{Formula, Letter, Term};
use crate::guard::Guards;
use crate::structures::{Interpretation, LinearOrder, Structure};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// Values of free first-order variables.
pub type Assignment = BTreeMap<String, usize>;

/// Values of free set variables.
pub type SetAssignment = BTreeMap<String, BTreeSet<usize>>;

/// The assignment `x, y, z` of an interpretation.
pub fn assignment_of(i: &Interpretation) -> Assignment {
    ["x", "y", "z"]
        .iter()
        .zip(i.vars)
        .map(|(v, a)| (v.to_string(), a))
        .collect()
}

/// Parses `"x=3,y=0,z=7"`; an empty string is the empty assignment.
pub fn parse_assignment(text: &str) -> Result<Assignment> {
    let mut out = Assignment::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::parse(0, format!("bad assignment item `{item}`"));
        let (v, a) = item.split_once('=').ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        out.insert(v.trim().to_string(), a);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tri {
    F,
    T,
    U,
}

impl Tri {
    fn of(b: bool) -> Tri {
        if b {
            Tri::T
        } else {
            Tri::F
        }
    }

    fn not(self) -> Tri {
        match self {
            Tri::F => Tri::T,
            Tri::T => Tri::F,
            Tri::U => Tri::U,
        }
    }

    fn code(self) -> u8 {
        match self {
            Tri::F => 1,
            Tri::T => 2,
            Tri::U => 3,
        }
    }

    fn decode(c: u8) -> Option<Tri> {
        match c {
            1 => Some(Tri::F),
            2 => Some(Tri::T),
            3 => Some(Tri::U),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum T {
    Var(usize),
    Const(usize),
}

#[derive(Debug, Clone)]
enum Node {
    Less(T, T),
    Equal(T, T),
    Succ(T, T),
    Letter(Letter, T),
    Member(T, usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    Quant {
        exists: bool,
        var: usize,
        body: usize,
        table: Option<usize>,
        /// The bound variable only matters strictly between these two points,
        /// in either order when the flag is set.
        range: Option<(T, T, bool)>,
    },
    Guarded {
        exists: bool,
        var: usize,
        terms: Vec<T>,
        body: usize,
    },
    SetQuant {
        exists: bool,
        set: usize,
        body: usize,
    },
}

const DENSE_LIMIT: u128 = 1 << 20;

/// How far [`Evaluator::peek`] looks below a node.
const PEEK_DEPTH: u32 = 6;

#[derive(Debug)]
enum Memo {
    Dense(Vec<u8>),
    Sparse(HashMap<u64, u8>),
}

#[derive(Debug)]
struct Table {
    free: Vec<usize>,
    sets: u64,
    memo: Memo,
    /// Keys are taken relative to the least free value. Sound for bounded
    /// subformulas without constants, letters or sets, whose truth is
    /// invariant under translation.
    shift: bool,
}

impl Table {
    fn clear(&mut self) {
        match &mut self.memo {
            Memo::Dense(v) => v.iter_mut().for_each(|c| *c = 0),
            Memo::Sparse(m) => m.clear(),
        }
    }
}

/// Which subsets a nested set quantifier ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MsoMode {
    /// All subsets of the universe.
    Exhaustive,
    /// Subsets of the positions carrying the letter.
    Restricted(Letter),
    /// The supplied sets for the leading existential block.
    Witness(SetAssignment),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Verdict {
    True,
    False,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

struct Compiler<'a> {
    structure: &'a Structure,
    vars: Vec<String>,
    sets: Vec<String>,
    nodes: Vec<Node>,
    free: Vec<Vec<usize>>,
    set_deps: Vec<u64>,
    tables: Vec<Table>,
    invariant: Vec<bool>,
}

impl Compiler<'_> {
    fn var_slot(&mut self, name: &str) -> usize {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                self.vars.push(name.to_string());
                self.vars.len() - 1
            }
        }
    }

    fn set_slot(&mut self, name: &str) -> Result<usize> {
        Ok(match self.sets.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                if self.sets.len() == 64 {
                    return Err(Error::guard("more than 64 set variables"));
                }
                self.sets.push(name.to_string());
                self.sets.len() - 1
            }
        })
    }

    fn term(&mut self, t: &Term) -> T {
        match t {
            Term::Var(v) => T::Var(self.var_slot(v)),
            Term::Min => T::Const(0),
            Term::Max => T::Const(self.structure.max()),
        }
    }

    fn push(&mut self, node: Node, free: Vec<usize>, sets: u64) -> usize {
        let var = |t: &T| matches!(t, T::Var(_));
        let inv = &self.invariant;
        let invariant = match &node {
            Node::Less(a, b) | Node::Equal(a, b) | Node::Succ(a, b) => var(a) && var(b),
            Node::Letter(..) | Node::Member(..) | Node::SetQuant { .. } => false,
            &Node::Not(a) => inv[a],
            &Node::And(a, b) | &Node::Or(a, b) | &Node::Imp(a, b) => inv[a] && inv[b],
            Node::Quant { body, range, .. } => {
                range.is_some_and(|(a, b, _)| var(&a) && var(&b)) && inv[*body]
            }
            Node::Guarded { terms, body, .. } => terms.iter().all(var) && inv[*body],
        };
        self.invariant.push(invariant);
        self.nodes.push(node);
        self.free.push(free);
        self.set_deps.push(sets);
        self.nodes.len() - 1
    }

    fn term_free(t: T) -> Vec<usize> {
        match t {
            T::Var(v) => vec![v],
            T::Const(_) => Vec::new(),
        }
    }

    fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Terms `t` of a guard `(v = t1) ∨ (v = t2) ∨ ..`, if `g` is one.
    fn guard_terms(g: &Formula, v: &str) -> Option<Vec<Term>> {
        match g {
            Formula::Equal(a, b) => {
                let is_v = |t: &Term| t.as_var() == Some(v);
                match (is_v(a), is_v(b)) {
                    (true, false) => Some(vec![b.clone()]),
                    (false, true) => Some(vec![a.clone()]),
                    _ => None,
                }
            }
            Formula::Or(a, b) => {
                let mut l = Self::guard_terms(a, v)?;
                l.extend(Self::guard_terms(b, v)?);
                Some(l)
            }
            _ => None,
        }
    }

    /// `(s < v ∧ v < t)`, or that or its mirror image `(t < v ∧ v < s)`.
    fn between(f: &Formula, v: &str) -> Option<(Term, Term, bool)> {
        let is_v = |t: &Term| t.as_var() == Some(v);
        match f {
            Formula::And(l, r) => match (l.as_ref(), r.as_ref()) {
                (Formula::Less(s, a), Formula::Less(b, t)) if is_v(a) && is_v(b) && !is_v(s) && !is_v(t) => {
                    Some((s.clone(), t.clone(), false))
                }
                _ => None,
            },
            Formula::Or(l, r) => {
                let (s, t, _) = Self::between(l, v)?;
                let (t2, s2, _) = Self::between(r, v)?;
                (s == s2 && t == t2).then_some((s, t, true))
            }
            _ => None,
        }
    }

    fn compile(&mut self, f: &Formula) -> Result<usize> {
        let id = match f {
            Formula::Less(a, b) | Formula::Equal(a, b) | Formula::Succ(a, b) => {
                let (ta, tb) = (self.term(a), self.term(b));
                let free = Self::union(&Self::term_free(ta), &Self::term_free(tb));
                let node = match f {
                    Formula::Less(..) => Node::Less(ta, tb),
                    Formula::Equal(..) => Node::Equal(ta, tb),
                    _ => Node::Succ(ta, tb),
                };
                self.push(node, free, 0)
            }
            Formula::Letter(l, t) => {
                if self.structure.as_string().is_none() {
                    return Err(Error::Signature(format!(
                        "letter atom `{f}` on a structure without letters"
                    )));
                }
                let t = self.term(t);
                self.push(Node::Letter(*l, t), Self::term_free(t), 0)
            }
            Formula::Member(t, x) => {
                let t = self.term(t);
                let s = self.set_slot(x)?;
                self.push(Node::Member(t, s), Self::term_free(t), 1 << s)
            }
            Formula::Not(a) => {
                let c = self.compile(a)?;
                let (free, sets) = (self.free[c].clone(), self.set_deps[c]);
                self.push(Node::Not(c), free, sets)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                let (ca, cb) = (self.compile(a)?, self.compile(b)?);
                let free = Self::union(&self.free[ca], &self.free[cb]);
                let sets = self.set_deps[ca] | self.set_deps[cb];
                let node = match f {
                    Formula::And(..) => Node::And(ca, cb),
                    Formula::Or(..) => Node::Or(ca, cb),
                    _ => Node::Imp(ca, cb),
                };
                self.push(node, free, sets)
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let exists = matches!(f, Formula::Exists(..));
                let guarded = match (exists, body.as_ref()) {
                    (true, Formula::And(g, rest)) | (false, Formula::Imp(g, rest)) => {
                        Self::guard_terms(g, v).map(|ts| (ts, rest.as_ref()))
                    }
                    _ => None,
                };
                let var = self.var_slot(v);
                if let Some((ts, rest)) = guarded {
                    let terms: Vec<T> = ts.iter().map(|t| self.term(t)).collect();
                    let b = self.compile(rest)?;
                    let mut free: Vec<usize> = self.free[b].iter().copied().filter(|&s| s != var).collect();
                    for &t in &terms {
                        free = Self::union(&free, &Self::term_free(t));
                    }
                    let sets = self.set_deps[b];
                    self.push(
                        Node::Guarded {
                            exists,
                            var,
                            terms,
                            body: b,
                        },
                        free,
                        sets,
                    )
                } else {
                    let bounds = match (exists, body.as_ref()) {
                        (true, g) if Self::between(g, v).is_some() => Self::between(g, v),
                        (true, Formula::And(g, _)) | (false, Formula::Imp(g, _)) => Self::between(g, v),
                        _ => None,
                    };
                    let range = bounds.map(|(s, t, sym)| (self.term(&s), self.term(&t), sym));
                    let b = self.compile(body)?;
                    let free: Vec<usize> = self.free[b].iter().copied().filter(|&s| s != var).collect();
                    let sets = self.set_deps[b];
                    let base = self.structure.max() as u128 + 1;
                    let cells = base.checked_pow(free.len() as u32).unwrap_or(u128::MAX);
                    let memo = if cells <= DENSE_LIMIT {
                        Memo::Dense(vec![0; cells as usize])
                    } else {
                        Memo::Sparse(HashMap::new())
                    };
                    let shift = self.invariant[b] && range.is_some_and(|(s, t, _)| {
                        matches!((s, t), (T::Var(_), T::Var(_)))
                    });
                    self.tables.push(Table {
                        free: free.clone(),
                        sets,
                        memo,
                        shift,
                    });
                    let table = Some(self.tables.len() - 1);
                    self.push(
                        Node::Quant {
                            exists,
                            var,
                            body: b,
                            table,
                            range,
                        },
                        free,
                        sets,
                    )
                }
            }
            Formula::ExistsSet(x, body) | Formula::ForallSet(x, body) => {
                let exists = matches!(f, Formula::ExistsSet(..));
                let set = self.set_slot(x)?;
                let b = self.compile(body)?;
                let free = self.free[b].clone();
                let sets = self.set_deps[b] & !(1u64 << set);
                self.push(Node::SetQuant { exists, set, body: b }, free, sets)
            }
        };
        Ok(id)
    }
}

/// A formula compiled against one structure, reusable across assignments.
pub struct Evaluator {
    max: usize,
    letters: Option<Vec<Letter>>,
    vars: Vec<String>,
    sets: Vec<String>,
    nodes: Vec<Node>,
    free: Vec<Vec<usize>>,
    tables: Vec<Table>,
    /// Tables depending on each set slot.
    set_tables: Vec<Vec<usize>>,
    root: usize,
    env: Vec<usize>,
    set_values: Vec<Vec<Tri>>,
    set_given: Vec<bool>,
    inner_domain: Vec<usize>,
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Evaluator")
            .field("max", &self.max)
            .field("nodes", &self.nodes.len())
            .field("tables", &self.tables.len())
            .finish()
    }
}

impl Evaluator {
    pub fn new(f: &Formula, structure: &Structure) -> Result<Self> {
        let mut c = Compiler {
            structure,
            vars: Vec::new(),
            sets: Vec::new(),
            nodes: Vec::new(),
            free: Vec::new(),
            set_deps: Vec::new(),
            tables: Vec::new(),
            invariant: Vec::new(),
        };
        let root = c.compile(f)?;
        let max = structure.max();
        let mut set_tables = vec![Vec::new(); c.sets.len()];
        for (t, table) in c.tables.iter().enumerate() {
            for (s, list) in set_tables.iter_mut().enumerate() {
                if table.sets & (1 << s) != 0 {
                    list.push(t);
                }
            }
        }
        let nsets = c.sets.len();
        let letters = structure.as_string().map(|s| s.letters.clone());
        let mut ev = Evaluator {
            max,
            letters,
            env: vec![0; c.vars.len()],
            vars: c.vars,
            sets: c.sets,
            nodes: c.nodes,
            free: c.free,
            tables: c.tables,
            set_tables,
            root,
            set_values: vec![vec![Tri::F; max + 1]; nsets],
            set_given: vec![false; nsets],
            inner_domain: (0..=max).collect(),
        };
        let free_sets = f.free_set_variables();
        for s in 0..nsets {
            ev.set_given[s] = !free_sets.contains(&ev.sets[s]);
        }
        Ok(ev)
    }

    /// Largest element of the structure.
    pub fn max(&self) -> usize {
        self.max
    }

    fn slot(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn bind(&mut self, assignment: &Assignment) -> Result<()> {
        for &v in &self.free[self.root] {
            let name = &self.vars[v];
            let a = *assignment
                .get(name)
                .ok_or_else(|| Error::Unassigned(name.clone()))?;
            if a > self.max {
                return Err(Error::Precondition(format!(
                    "value {a} of `{name}` outside the universe {{0..{}}}",
                    self.max
                )));
            }
            self.env[v] = a;
        }
        Ok(())
    }

    /// Assigns a free set variable; bits outside the universe are an error.
    pub fn set_set(&mut self, name: &str, members: &BTreeSet<usize>) -> Result<()> {
        let s = self
            .sets
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Witness(format!("formula has no free set `{name}`")))?;
        if let Some(&bad) = members.iter().find(|&&p| p > self.max) {
            return Err(Error::Witness(format!(
                "position {bad} of `{name}` outside the universe"
            )));
        }
        for p in 0..=self.max {
            self.set_values[s][p] = Tri::of(members.contains(&p));
        }
        self.set_given[s] = true;
        self.invalidate(s);
        Ok(())
    }

    fn check_sets(&self) -> Result<()> {
        match self.set_given.iter().position(|g| !g) {
            Some(s) => Err(Error::Unassigned(self.sets[s].clone())),
            None => Ok(()),
        }
    }

    /// Truth under `assignment`, which must cover the free variables.
    pub fn holds(&mut self, assignment: &Assignment) -> Result<bool> {
        self.bind(assignment)?;
        self.check_sets()?;
        match self.eval(self.root) {
            Tri::T => Ok(true),
            Tri::F => Ok(false),
            Tri::U => Err(Error::Invariant("undetermined truth value".into())),
        }
    }

    /// Truth with `x, y, z` taken from the slice; other free variables are an
    /// error.
    pub fn holds_xyz(&mut self, vals: [usize; 3]) -> Result<bool> {
        for &v in &self.free[self.root] {
            let i = match self.vars[v].as_str() {
                "x" => 0,
                "y" => 1,
                "z" => 2,
                other => return Err(Error::Unassigned(other.to_string())),
            };
            if vals[i] > self.max {
                return Err(Error::Precondition(format!("value {} outside A_{}", vals[i], self.max)));
            }
            self.env[v] = vals[i];
        }
        self.check_sets()?;
        match self.eval(self.root) {
            Tri::T => Ok(true),
            Tri::F => Ok(false),
            Tri::U => Err(Error::Invariant("undetermined truth value".into())),
        }
    }

    fn invalidate(&mut self, s: usize) {
        for k in 0..self.set_tables[s].len() {
            let t = self.set_tables[s][k];
            self.tables[t].clear();
        }
    }

    fn value(&self, t: T) -> usize {
        match t {
            T::Var(v) => self.env[v],
            T::Const(c) => c,
        }
    }

    fn key(&self, table: usize) -> u64 {
        let base = self.max as u64 + 1;
        let t = &self.tables[table];
        let low = if t.shift {
            t.free.iter().map(|&v| self.env[v]).min().unwrap_or(0)
        } else {
            0
        };
        t.free
            .iter()
            .fold(0u64, |acc, &v| acc.wrapping_mul(base).wrapping_add((self.env[v] - low) as u64))
    }

    fn lookup(&self, table: usize, key: u64) -> Option<Tri> {
        match &self.tables[table].memo {
            Memo::Dense(v) => Tri::decode(v[key as usize]),
            Memo::Sparse(m) => m.get(&key).copied().and_then(Tri::decode),
        }
    }

    fn store(&mut self, table: usize, key: u64, t: Tri) {
        match &mut self.tables[table].memo {
            Memo::Dense(v) => v[key as usize] = t.code(),
            Memo::Sparse(m) => {
                m.insert(key, t.code());
            }
        }
    }

    /// The value of `id` if it follows from atoms and memoized quantifier
    /// entries alone, without evaluating anything new.
    fn peek(&mut self, id: usize, depth: u32) -> Option<Tri> {
        if depth == 0 {
            return None;
        }
        let both = |x: Option<Tri>, y: Option<Tri>, zero: Tri, f: fn(Tri, Tri) -> Tri| match (x, y) {
            (Some(z), _) | (_, Some(z)) if z == zero => Some(zero),
            (Some(p), Some(q)) => Some(f(p, q)),
            _ => None,
        };
        match &self.nodes[id] {
            Node::Less(..) | Node::Equal(..) | Node::Succ(..) | Node::Letter(..) | Node::Member(..) => {
                Some(self.eval(id))
            }
            &Node::Not(a) => self.peek(a, depth - 1).map(Tri::not),
            &Node::And(a, b) => {
                let (p, q) = (self.peek(a, depth - 1), self.peek(b, depth - 1));
                both(p, q, Tri::F, |p, q| if p == Tri::T { q } else if q == Tri::T { p } else { Tri::U })
            }
            &Node::Or(a, b) => {
                let (p, q) = (self.peek(a, depth - 1), self.peek(b, depth - 1));
                both(p, q, Tri::T, |p, q| if p == Tri::F { q } else if q == Tri::F { p } else { Tri::U })
            }
            &Node::Imp(a, b) => {
                let (p, q) = (self.peek(a, depth - 1).map(Tri::not), self.peek(b, depth - 1));
                both(p, q, Tri::T, |p, q| if p == Tri::F { q } else if q == Tri::F { p } else { Tri::U })
            }
            &Node::Quant { table: Some(t), .. } => {
                let k = self.key(t);
                self.lookup(t, k)
            }
            Node::Guarded {
                exists,
                var,
                terms,
                body,
            } => {
                let (exists, var, body, count) = (*exists, *var, *body, terms.len());
                let saved = self.env[var];
                let mut acc = Some(Tri::of(!exists));
                for k in 0..count {
                    let a = match &self.nodes[id] {
                        Node::Guarded { terms, .. } => self.value(terms[k]),
                        _ => unreachable!(),
                    };
                    self.env[var] = a;
                    match (exists, self.peek(body, depth - 1)) {
                        (true, Some(Tri::T)) | (false, Some(Tri::F)) => {
                            acc = Some(Tri::of(exists));
                            break;
                        }
                        (_, None) => acc = None,
                        (_, Some(Tri::U)) => acc = acc.map(|_| Tri::U),
                        _ => {}
                    }
                }
                self.env[var] = saved;
                acc
            }
            _ => None,
        }
    }

    fn eval(&mut self, id: usize) -> Tri {
        match &self.nodes[id] {
            Node::Less(a, b) => Tri::of(self.value(*a) < self.value(*b)),
            Node::Equal(a, b) => Tri::of(self.value(*a) == self.value(*b)),
            Node::Succ(a, b) => Tri::of(self.value(*a) + 1 == self.value(*b)),
            Node::Letter(l, t) => {
                let p = self.value(*t);
                Tri::of(self.letters.as_ref().is_some_and(|w| w[p] == *l))
            }
            Node::Member(t, s) => self.set_values[*s][self.value(*t)],
            &Node::Not(a) => self.eval(a).not(),
            &Node::And(a, b) => {
                if self.peek(b, PEEK_DEPTH) == Some(Tri::F) {
                    return Tri::F;
                }
                match self.eval(a) {
                    Tri::F => Tri::F,
                    Tri::T => self.eval(b),
                    Tri::U => match self.eval(b) {
                        Tri::F => Tri::F,
                        _ => Tri::U,
                    },
                }
            }
            &Node::Or(a, b) => {
                if self.peek(b, PEEK_DEPTH) == Some(Tri::T) {
                    return Tri::T;
                }
                match self.eval(a) {
                    Tri::T => Tri::T,
                    Tri::F => self.eval(b),
                    Tri::U => match self.eval(b) {
                        Tri::T => Tri::T,
                        _ => Tri::U,
                    },
                }
            }
            &Node::Imp(a, b) => {
                if self.peek(b, PEEK_DEPTH) == Some(Tri::T) {
                    return Tri::T;
                }
                match self.eval(a) {
                    Tri::F => Tri::T,
                    Tri::T => self.eval(b),
                    Tri::U => match self.eval(b) {
                        Tri::T => Tri::T,
                        _ => Tri::U,
                    },
                }
            }
            &Node::Quant {
                exists,
                var,
                body,
                table,
                range,
            } => {
                let key = table.map(|t| (t, self.key(t)));
                if let Some((t, k)) = key {
                    if let Some(v) = self.lookup(t, k) {
                        return v;
                    }
                }
                let (lo, hi) = match range {
                    Some((s, t, sym)) => {
                        let (s, t) = (self.value(s), self.value(t));
                        let (s, t) = if sym { (s.min(t), s.max(t)) } else { (s, t) };
                        (s + 1, t)
                    }
                    None => (0, self.max + 1),
                };
                let saved = self.env[var];
                let mut acc = Tri::of(!exists);
                for a in lo..hi {
                    self.env[var] = a;
                    match (exists, self.eval(body)) {
                        (true, Tri::T) => {
                            acc = Tri::T;
                            break;
                        }
                        (false, Tri::F) => {
                            acc = Tri::F;
                            break;
                        }
                        (_, Tri::U) => acc = Tri::U,
                        _ => {}
                    }
                }
                self.env[var] = saved;
                if let Some((t, k)) = key {
                    self.store(t, k, acc);
                }
                acc
            }
            Node::Guarded {
                exists,
                var,
                terms,
                body,
            } => {
                let (exists, var, body, count) = (*exists, *var, *body, terms.len());
                let decisive = Tri::of(exists);
                if self.peek(id, PEEK_DEPTH) == Some(decisive) {
                    return decisive;
                }
                let saved = self.env[var];
                let mut acc = Tri::of(!exists);
                for k in 0..count {
                    let a = match &self.nodes[id] {
                        Node::Guarded { terms, .. } => self.value(terms[k]),
                        _ => unreachable!(),
                    };
                    self.env[var] = a;
                    match (exists, self.eval(body)) {
                        (true, Tri::T) => {
                            acc = Tri::T;
                            break;
                        }
                        (false, Tri::F) => {
                            acc = Tri::F;
                            break;
                        }
                        (_, Tri::U) => acc = Tri::U,
                        _ => {}
                    }
                }
                self.env[var] = saved;
                acc
            }
            &Node::SetQuant { exists, set, body } => self.eval_set_quant(exists, set, body),
        }
    }

    fn eval_set_quant(&mut self, exists: bool, set: usize, body: usize) -> Tri {
        let domain = self.inner_domain.clone();
        let saved = self.set_values[set].clone();
        let mut acc = Tri::of(!exists);
        // the domain size is checked against the guard before evaluation starts
        for mask in 0u64..(1u64 << domain.len()) {
            let mut values = vec![Tri::F; self.max + 1];
            for (k, &p) in domain.iter().enumerate() {
                values[p] = Tri::of(mask >> k & 1 == 1);
            }
            self.set_values[set] = values;
            self.invalidate(set);
            match (exists, self.eval(body)) {
                (true, Tri::T) => {
                    acc = Tri::T;
                    break;
                }
                (false, Tri::F) => {
                    acc = Tri::F;
                    break;
                }
                (_, Tri::U) => acc = Tri::U,
                _ => {}
            }
        }
        self.set_values[set] = saved;
        self.invalidate(set);
        acc
    }

    fn has_inner_set_quantifiers(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, Node::SetQuant { .. }))
    }
}

/// Truth of a first-order formula under an assignment.
pub fn eval_fo(f: &Formula, s: &Structure, assignment: &Assignment) -> Result<bool> {
    if f.is_mso() {
        return Err(Error::Signature(
            "set variables need monadic second-order evaluation".into(),
        ));
    }
    f
        .free_variables()
        .into_iter()
        .find(|v| !assignment.contains_key(v))
        .map_or(Ok(()), |v| Err(Error::Unassigned(v)))?;
    Evaluator::new(f, s)?.holds(assignment)
}

/// Truth of a first-order formula in an interpretation over `A_N`.
pub fn eval_interpretation(f: &Formula, i: &Interpretation) -> Result<bool> {
    eval_fo(f, &Structure::Order(i.order()), &assignment_of(i))
}

/// Truth of a sentence in `A_n`.
pub fn eval_on_order(f: &Formula, n: usize) -> Result<bool> {
    eval_fo(f, &Structure::Order(LinearOrder::new(n)), &Assignment::new())
}

/// Splits off the maximal leading block of set quantifiers of one kind.
fn set_prefix(f: &Formula) -> (Option<bool>, Vec<String>, &Formula) {
    let mut names = Vec::new();
    let mut kind = None;
    let mut cur = f;
    loop {
        match cur {
            Formula::ExistsSet(x, b) if kind != Some(false) => {
                kind = Some(true);
                names.push(x.clone());
                cur = b;
            }
            Formula::ForallSet(x, b) if kind != Some(true) => {
                kind = Some(false);
                names.push(x.clone());
                cur = b;
            }
            _ => return (kind, names, cur),
        }
    }
}

/// Evaluates an MSO sentence.
///
/// The leading block of like set quantifiers is decided by a depth-first
/// search that fixes one membership bit at a time, position by position, and
/// stops early once the three-valued matrix is determined. Set quantifiers
/// further inside range over the same domain by plain enumeration.
pub fn eval_mso(f: &Formula, s: &Structure, mode: &MsoMode, guards: &Guards) -> Result<Verdict> {
    let (kind, names, matrix) = set_prefix(f);
    if let Some(v) = matrix.free_variables().into_iter().next() {
        return Err(Error::Unassigned(v));
    }
    let distinct: BTreeSet<&String> = names.iter().collect();
    if distinct.len() != names.len() {
        return Err(Error::Precondition(
            "repeated set variable in the leading quantifier block".into(),
        ));
    }
    let mut ev = Evaluator::new(matrix, s)?;
    let max = s.max();
    let domain: Vec<usize> = match mode {
        MsoMode::Restricted(l) => {
            let w = s.as_string().ok_or_else(|| {
                Error::Precondition("restricted mode needs a labeled string".into())
            })?;
            w.positions_of(*l)
        }
        _ => (0..=max).collect(),
    };
    ev.inner_domain = domain.clone();
    if ev.has_inner_set_quantifiers() && domain.len() > guards.mso_set_domain {
        return Err(Error::guard(format!(
            "set domain of {} positions exceeds the guard of {}",
            domain.len(),
            guards.mso_set_domain
        )));
    }
    let free_sets = matrix.free_set_variables();
    if let Some(x) = free_sets.iter().find(|x| !names.contains(x)) {
        return Err(Error::Unassigned(x.clone()));
    }
    if let MsoMode::Witness(map) = mode {
        if kind == Some(false) {
            return Err(Error::Witness(
                "witness mode needs a leading existential block".into(),
            ));
        }
        let given: BTreeSet<&String> = map.keys().collect();
        if given != distinct {
            return Err(Error::Witness(format!(
                "witness supplies {:?} but the formula quantifies {:?}",
                given, distinct
            )));
        }
        for (x, members) in map {
            if free_sets.contains(x) {
                ev.set_set(x, members)?;
            } else if let Some(&bad) = members.iter().find(|&&p| p > max) {
                return Err(Error::Witness(format!(
                    "position {bad} of `{x}` outside the universe"
                )));
            }
        }
        ev.check_sets()?;
        return Ok(match ev.eval(ev.root) {
            Tri::T => Verdict::True,
            Tri::F if names.is_empty() => Verdict::False,
            _ => Verdict::Inconclusive,
        });
    }
    let Some(exists) = kind else {
        ev.check_sets()?;
        return Ok(match ev.eval(ev.root) {
            Tri::T => Verdict::True,
            Tri::F => Verdict::False,
            Tri::U => return Err(Error::Invariant("undetermined truth value".into())),
        });
    };
    if domain.len() > guards.mso_set_domain {
        return Err(Error::guard(format!(
            "set domain of {} positions exceeds the guard of {}",
            domain.len(),
            guards.mso_set_domain
        )));
    }
    // sets bound in the prefix but unused by the matrix do not matter
    let slots: Vec<usize> = names
        .iter()
        .filter_map(|x| ev.sets.iter().position(|s| s == x))
        .collect();
    for &sl in &slots {
        for p in 0..=max {
            ev.set_values[sl][p] = Tri::F;
        }
        for &p in &domain {
            ev.set_values[sl][p] = Tri::U;
        }
        ev.set_given[sl] = true;
        ev.invalidate(sl);
    }
    ev.check_sets()?;
    let bits: Vec<(usize, usize)> = domain
        .iter()
        .flat_map(|&p| slots.iter().map(move |&sl| (sl, p)))
        .collect();
    let found = search(&mut ev, &bits, 0, exists)?;
    Ok(match (exists, found) {
        (true, true) | (false, false) => Verdict::True,
        _ => Verdict::False,
    })
}

/// Looks for a completion making the matrix true (`exists`) or false.
fn search(ev: &mut Evaluator, bits: &[(usize, usize)], k: usize, exists: bool) -> Result<bool> {
    let target = Tri::of(exists);
    match ev.eval(ev.root) {
        Tri::U => {}
        t => return Ok(t == target),
    }
    let Some(&(sl, p)) = bits.get(k) else {
        return Err(Error::Invariant(
            "matrix undetermined under a complete set assignment".into(),
        ));
    };
    for b in [false, true] {
        ev.set_values[sl][p] = Tri::of(b);
        ev.invalidate(sl);
        if search(ev, bits, k + 1, exists)? {
            return Ok(true);
        }
    }
    ev.set_values[sl][p] = Tri::U;
    ev.invalidate(sl);
    Ok(false)
}

/// Truth of a sentence on `A_0 .. A_K` for `K = 2^(d+1)`, with the least `D`
/// from which the truth value stays constant up to `K`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Stabilization {
    pub depth: u32,
    pub limit: usize,
    pub threshold: usize,
    pub tail: bool,
    pub truth: Vec<bool>,
}

pub fn stabilization_threshold(f: &Formula, guards: &Guards) -> Result<Stabilization> {
    if !f.free_variables().is_empty() || f.is_mso() || f.uses_letters() {
        return Err(Error::Precondition(
            "stabilization needs a first-order sentence over the order signature".into(),
        ));
    }
    let depth = f.quantifier_depth() as u32;
    let limit = 1usize
        .checked_shl(depth + 1)
        .filter(|&k| k <= guards.stabilization_limit)
        .ok_or_else(|| {
            Error::guard(format!(
                "2^{} exceeds the stabilization guard of {}",
                depth + 1,
                guards.stabilization_limit
            ))
        })?;
    let truth = (0..=limit)
        .map(|n| eval_on_order(f, n))
        .collect::<Result<Vec<bool>>>()?;
    let tail = truth[limit];
    let threshold = (0..=limit)
        .rev()
        .take_while(|&n| truth[n] == tail)
        .last()
        .unwrap_or(limit);
    Ok(Stabilization {
        depth,
        limit,
        threshold,
        tail,
        truth,
    })
}

impl Evaluator {
    /// Slot names of the free first-order variables of the compiled formula.
    pub fn free_variables(&self) -> Vec<String> {
        self.free[self.root].iter().map(|&v| self.vars[v].clone()).collect()
    }

    /// Whether `name` occurs in the compiled formula.
    pub fn uses_variable(&self, name: &str) -> bool {
        self.slot(name).is_some()
    }
}
