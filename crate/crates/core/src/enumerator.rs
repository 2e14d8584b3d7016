//! Brute-force enumeration of first-order formulas over linear orders, used
//! as an independent oracle for minimal distinguishing sizes and for the
//! type-indistinguishability check.
//!
//! Formulas are generated by size. Each one carries its truth vector over a
//! probe set: every assignment of the used variables in every order `A_N`
//! with `N ≤ 5`, plus the orders of the query at hand. Vectors are computed
//! compositionally, so a quantifier over a probe order only looks at probes
//! of the same order. Two formulas with the same vector and the same
//! closedness are merged and the first (smallest) is kept.

use crate::error::{Error, Result};
use crate::evaluator::eval_interpretation;
use crate::formula::{Formula, Signature, Term};
use crate::guard::Guards;
use crate::structures::{all_interpretations, d_type, Interpretation};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

const VARS: [&str; 3] = ["x", "y", "z"];

/// Largest order always included in the probe set.
pub const PROBE_MAX: usize = 5;

#[derive(Debug, Clone)]
struct Probes {
    width: usize,
    /// `(N, first probe index)` for every probe order.
    orders: Vec<(usize, usize)>,
    total: usize,
}

impl Probes {
    fn new(width: usize, extra: impl IntoIterator<Item = usize>) -> Self {
        let ns: BTreeSet<usize> = (0..=PROBE_MAX).chain(extra).collect();
        let mut orders = Vec::new();
        let mut total = 0;
        for n in ns {
            orders.push((n, total));
            total += (n + 1).pow(width as u32);
        }
        Probes {
            width,
            orders,
            total,
        }
    }

    fn words(&self) -> usize {
        self.total.div_ceil(64)
    }

    /// Probe index of `i`; variables beyond the width are ignored.
    fn index(&self, i: &Interpretation) -> Option<usize> {
        let &(n, start) = self.orders.iter().find(|(n, _)| *n == i.n)?;
        let code = i.vars[..self.width]
            .iter()
            .fold(0, |acc, &v| acc * (n + 1) + v);
        Some(start + code)
    }

    /// Every probe as an interpretation, unused variables at 0.
    fn interpretations(&self) -> Vec<Interpretation> {
        let mut out = Vec::with_capacity(self.total);
        for &(n, _) in &self.orders {
            let count = (n + 1).pow(self.width as u32);
            for code in 0..count {
                let mut vars = [0usize; 3];
                let mut c = code;
                for k in (0..self.width).rev() {
                    vars[k] = c % (n + 1);
                    c /= n + 1;
                }
                out.push(Interpretation::new(n, vars));
            }
        }
        out
    }
}

type Bits = Vec<u64>;

fn get(bits: &Bits, i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn set(bits: &mut Bits, i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub formula: Formula,
    pub size: usize,
    pub depth: usize,
    /// Bit `k` set iff variable `VARS[k]` occurs free.
    free: u8,
    bits: Bits,
}

impl Entry {
    pub fn is_sentence(&self) -> bool {
        self.free == 0
    }
}

fn free_mask(f: &Formula) -> u8 {
    f.free_variables()
        .iter()
        .filter_map(|v| VARS.iter().position(|w| w == v))
        .fold(0, |m, k| m | 1 << k)
}

/// What to enumerate.
#[derive(Debug, Clone)]
pub struct EnumConfig {
    pub sig: Signature,
    pub width: usize,
    pub max_size: usize,
    /// Only formulas of at most this quantifier depth.
    pub max_depth: Option<usize>,
    /// Orders added to the probe set.
    pub extra_orders: Vec<usize>,
}

impl EnumConfig {
    pub fn new(sig: Signature, width: usize, max_size: usize) -> Self {
        EnumConfig {
            sig,
            width,
            max_size,
            max_depth: None,
            extra_orders: Vec::new(),
        }
    }
}

/// A size-ordered enumeration, grown one size at a time.
pub struct Enumerator {
    config: EnumConfig,
    probes: Probes,
    probe_list: Vec<Interpretation>,
    /// `levels[s]` holds the classes first reached at size `s`.
    levels: Vec<Vec<Entry>>,
    seen: HashSet<(Bits, u8)>,
    /// For variable `k` and probe `p`, the probes `p[k ↦ a]` for all `a`.
    shifts: Vec<Vec<Vec<usize>>>,
    max_classes: usize,
}

impl Enumerator {
    pub fn new(config: EnumConfig, guards: &Guards) -> Result<Self> {
        if config.width > 3 {
            return Err(Error::Precondition("enumeration supports at most 3 variables".into()));
        }
        if !config.sig.letters.is_empty() || config.sig.mso {
            return Err(Error::Precondition(
                "enumeration covers first-order formulas over orders only".into(),
            ));
        }
        if config.max_size > guards.enum_max_size {
            return Err(Error::guard(format!(
                "size bound {} exceeds the enumeration guard of {}",
                config.max_size, guards.enum_max_size
            )));
        }
        let probes = Probes::new(config.width, config.extra_orders.iter().copied());
        let probe_list = probes.interpretations();
        let shifts = (0..config.width)
            .map(|k| {
                probe_list
                    .iter()
                    .map(|i| {
                        (0..=i.n)
                            .map(|a| {
                                let mut j = *i;
                                j.vars[k] = a;
                                probes.index(&j).expect("same order")
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut e = Enumerator {
            config,
            probes,
            probe_list,
            levels: vec![Vec::new()],
            seen: HashSet::new(),
            shifts,
            max_classes: guards.enum_max_classes,
        };
        e.atoms()?;
        Ok(e)
    }

    pub fn probe_count(&self) -> usize {
        self.probes.total
    }

    /// Largest size enumerated so far.
    pub fn size(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, s: usize) -> &[Entry] {
        self.levels.get(s).map_or(&[], Vec::as_slice)
    }

    pub fn class_count(&self) -> usize {
        self.seen.len()
    }

    fn terms(&self) -> Vec<Term> {
        let mut out: Vec<Term> = VARS[..self.config.width].iter().map(|v| Term::var(*v)).collect();
        if self.config.sig.min {
            out.push(Term::Min);
        }
        if self.config.sig.max {
            out.push(Term::Max);
        }
        out
    }

    fn admit(&mut self, level: &mut Vec<Entry>, formula: Formula, depth: usize, free: u8, bits: Bits) -> Result<()> {
        if !self.seen.insert((bits.clone(), free)) {
            return Ok(());
        }
        if self.seen.len() > self.max_classes {
            return Err(Error::guard(format!(
                "more than {} semantic classes",
                self.max_classes
            )));
        }
        let size = formula.size();
        level.push(Entry {
            formula,
            size,
            depth,
            free,
            bits,
        });
        Ok(())
    }

    fn atoms(&mut self) -> Result<()> {
        let terms = self.terms();
        let mut atoms = Vec::new();
        for a in &terms {
            for b in &terms {
                if self.config.sig.less {
                    atoms.push(Formula::Less(a.clone(), b.clone()));
                }
                if self.config.sig.succ {
                    atoms.push(Formula::Succ(a.clone(), b.clone()));
                }
                if a < b {
                    atoms.push(Formula::Equal(a.clone(), b.clone()));
                }
            }
        }
        let mut level = Vec::new();
        for f in atoms {
            let mut bits = vec![0u64; self.probes.words()];
            for (k, i) in self.probe_list.iter().enumerate() {
                if eval_interpretation(&f, i)? {
                    set(&mut bits, k);
                }
            }
            let free = free_mask(&f);
            self.admit(&mut level, f, 0, free, bits)?;
        }
        self.levels.push(level);
        Ok(())
    }

    fn quantify(&self, e: &Entry, k: usize, exists: bool) -> Bits {
        let mut out = vec![0u64; self.probes.words()];
        for (p, row) in self.shifts[k].iter().enumerate() {
            let hit = if exists {
                row.iter().any(|&q| get(&e.bits, q))
            } else {
                row.iter().all(|&q| get(&e.bits, q))
            };
            if hit {
                set(&mut out, p);
            }
        }
        out
    }

    fn complement(&self, bits: &Bits) -> Bits {
        let mut out: Bits = bits.iter().map(|w| !w).collect();
        let extra = self.probes.words() * 64 - self.probes.total;
        if extra > 0 {
            let last = out.len() - 1;
            out[last] &= u64::MAX >> extra;
        }
        out
    }

    /// Enumerates the classes first reached at the next size.
    pub fn grow(&mut self) -> Result<bool> {
        let s = self.levels.len();
        if s > self.config.max_size {
            return Ok(false);
        }
        let mut level = Vec::new();
        let prev = std::mem::take(&mut self.levels[s - 1]);
        for e in &prev {
            let bits = self.complement(&e.bits);
            self.admit(&mut level, Formula::not(e.formula.clone()), e.depth, e.free, bits)?;
        }
        let can_quantify = self.config.max_depth.is_none_or(|d| prev.iter().any(|e| e.depth < d));
        if can_quantify {
            for e in &prev {
                if self.config.max_depth.is_some_and(|d| e.depth >= d) {
                    continue;
                }
                for (k, v) in VARS.iter().enumerate().take(self.config.width) {
                    if e.free >> k & 1 == 0 {
                        continue;
                    }
                    for exists in [true, false] {
                        let bits = self.quantify(e, k, exists);
                        let f = if exists {
                            Formula::exists(*v, e.formula.clone())
                        } else {
                            Formula::forall(*v, e.formula.clone())
                        };
                        self.admit(&mut level, f, e.depth + 1, e.free & !(1 << k), bits)?;
                    }
                }
            }
        }
        self.levels[s - 1] = prev;
        for i in 1..s - 1 {
            let j = s - 1 - i;
            let left = std::mem::take(&mut self.levels[i]);
            let right = if i == j { None } else { Some(std::mem::take(&mut self.levels[j])) };
            {
                let rs: &[Entry] = right.as_deref().unwrap_or(&left);
                for (ai, a) in left.iter().enumerate() {
                    for (bi, b) in rs.iter().enumerate() {
                        let free = a.free | b.free;
                        let depth = a.depth.max(b.depth);
                        let imp: Bits = self
                            .complement(&a.bits)
                            .iter()
                            .zip(&b.bits)
                            .map(|(x, y)| x | y)
                            .collect();
                        self.admit(&mut level, Formula::imp(a.formula.clone(), b.formula.clone()), depth, free, imp)?;
                        // ∧ and ∨ are symmetric: one orientation suffices
                        if i > j || (i == j && bi < ai) {
                            continue;
                        }
                        let and = a.bits.iter().zip(&b.bits).map(|(x, y)| x & y).collect();
                        self.admit(&mut level, Formula::and(a.formula.clone(), b.formula.clone()), depth, free, and)?;
                        let or = a.bits.iter().zip(&b.bits).map(|(x, y)| x | y).collect();
                        self.admit(&mut level, Formula::or(a.formula.clone(), b.formula.clone()), depth, free, or)?;
                    }
                }
            }
            self.levels[i] = left;
            if let Some(r) = right {
                self.levels[j] = r;
            }
        }
        self.levels.push(level);
        Ok(true)
    }

    /// Grows up to the configured size bound.
    pub fn run(&mut self) -> Result<()> {
        while self.grow()? {}
        Ok(())
    }

    /// Sentence representatives, by size.
    pub fn sentences(&self) -> impl Iterator<Item = &Entry> {
        self.levels.iter().flatten().filter(|e| e.is_sentence())
    }

    /// Truth value of an entry on `i`, if `i` is among the probes.
    pub fn truth(&self, e: &Entry, i: &Interpretation) -> Option<bool> {
        self.probes.index(i).map(|p| get(&e.bits, p))
    }
}

/// Number of new sentence classes per size.
#[derive(Debug, Clone, Serialize)]
pub struct ClassCounts {
    pub probes: usize,
    pub sentences_by_size: BTreeMap<usize, usize>,
    pub formulas_by_size: BTreeMap<usize, usize>,
}

/// Sentence representatives up to `max_size`, smallest first, one per
/// semantic class over the probe set.
pub fn enumerate(sig: &Signature, width: usize, max_size: usize, guards: &Guards) -> Result<(Vec<Formula>, ClassCounts)> {
    let mut e = Enumerator::new(EnumConfig::new(sig.clone(), width, max_size), guards)?;
    e.run()?;
    let mut counts = ClassCounts {
        probes: e.probe_count(),
        sentences_by_size: BTreeMap::new(),
        formulas_by_size: BTreeMap::new(),
    };
    for s in 1..=e.size() {
        counts.formulas_by_size.insert(s, e.level(s).len());
        counts
            .sentences_by_size
            .insert(s, e.level(s).iter().filter(|x| x.is_sentence()).count());
    }
    Ok((e.sentences().map(|x| x.formula.clone()).collect(), counts))
}

/// The least size of a sentence true on all of `a` and false on all of `b`,
/// with such a sentence, or `None` if there is none up to `cap`. The answer
/// is re-checked by the evaluator.
pub fn min_distinguishing_size(
    sig: &Signature,
    width: usize,
    a: &[Interpretation],
    b: &[Interpretation],
    cap: usize,
    guards: &Guards,
) -> Result<Option<(usize, Formula)>> {
    let mut config = EnumConfig::new(sig.clone(), width, cap);
    config.extra_orders = a.iter().chain(b).map(|i| i.n).collect();
    let mut e = Enumerator::new(config, guards)?;
    loop {
        let s = e.size();
        let hit = e.level(s).iter().find(|x| {
            x.is_sentence()
                && a.iter().all(|i| e.truth(x, i) == Some(true))
                && b.iter().all(|j| e.truth(x, j) == Some(false))
        });
        if let Some(x) = hit {
            for i in a {
                if !eval_interpretation(&x.formula, i)? {
                    return Err(Error::Invariant(format!("`{}` fails on {i}", x.formula)));
                }
            }
            for j in b {
                if eval_interpretation(&x.formula, j)? {
                    return Err(Error::Invariant(format!("`{}` holds on {j}", x.formula)));
                }
            }
            return Ok(Some((x.size, x.formula.clone())));
        }
        if !e.grow()? {
            return Ok(None);
        }
    }
}

/// Interpretation pairs with equal `d`-types that some depth-`d` formula
/// nonetheless tells apart.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma3Report {
    pub depth: u32,
    pub max_order: usize,
    pub interpretations: usize,
    pub type_classes: usize,
    /// Pairs separated by exact three-variable equivalence at depth `d`.
    pub refinement_counterexamples: Vec<(Interpretation, Interpretation)>,
    /// Enumerated sentences and formulas of depth `≤ d` checked.
    pub formulas_checked: usize,
    pub enumeration_counterexamples: Vec<(String, Interpretation, Interpretation)>,
}

impl Lemma3Report {
    pub fn passed(&self) -> bool {
        self.refinement_counterexamples.is_empty() && self.enumeration_counterexamples.is_empty()
    }
}

/// Atomic facts about the five points of an interpretation under `<`, `=`
/// and `succ`.
fn atomic_type(i: &Interpretation) -> Vec<bool> {
    use crate::structures::Point;
    let mut out = Vec::with_capacity(75);
    for &p in &Point::ALL {
        for &q in &Point::ALL {
            let (a, b) = (i.value(p), i.value(q));
            out.extend([a < b, a == b, a + 1 == b]);
        }
    }
    out
}

/// Three-variable equivalence classes up to quantifier depth `d`, over all
/// interpretations on orders up to `n_max`.
fn refine(interps: &[Interpretation], d: u32) -> Vec<usize> {
    let index: HashMap<Interpretation, usize> =
        interps.iter().enumerate().map(|(k, i)| (*i, k)).collect();
    let mut ids: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut class: Vec<usize> = interps
        .iter()
        .map(|i| {
            let n = ids.len();
            *ids.entry(atomic_type(i)).or_insert(n)
        })
        .collect();
    for _ in 0..d {
        let mut ids: HashMap<(usize, Vec<BTreeSet<usize>>), usize> = HashMap::new();
        class = interps
            .iter()
            .map(|i| {
                let moves = (0..3)
                    .map(|k| {
                        (0..=i.n)
                            .map(|a| {
                                let mut j = *i;
                                j.vars[k] = a;
                                class[index[&j]]
                            })
                            .collect()
                    })
                    .collect();
                let n = ids.len();
                *ids.entry((class[index[i]], moves)).or_insert(n)
            })
            .collect();
    }
    class
}

/// Checks that equal `d`-types imply indistinguishability at depth `d` in
/// two independent ways: exact partition refinement over all interpretations
/// on `A_0 .. A_{n_max}`, and every enumerated formula of depth `≤ d` up to
/// `formula_size` over the orders `A_0 .. A_5`.
pub fn check_lemma3(d: u32, n_max: usize, formula_size: usize, guards: &Guards) -> Result<Lemma3Report> {
    if d > guards.lemma3_depth || n_max > guards.lemma3_max_order {
        return Err(Error::guard(format!(
            "depth {d} / order {n_max} beyond the guard of depth {} / order {}",
            guards.lemma3_depth, guards.lemma3_max_order
        )));
    }
    let interps: Vec<Interpretation> = (0..=n_max).flat_map(all_interpretations).collect();
    let class = refine(&interps, d);
    let mut by_type: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for (k, i) in interps.iter().enumerate() {
        let t = d_type(i, d);
        by_type.entry((t.ord, t.dist)).or_default().push(k);
    }
    let mut refinement_counterexamples = Vec::new();
    for members in by_type.values() {
        let first = members[0];
        for &k in &members[1..] {
            if class[k] != class[first] {
                refinement_counterexamples.push((interps[first], interps[k]));
            }
        }
    }

    let mut config = EnumConfig::new(Signature::full_order(), 3, formula_size);
    config.max_depth = Some(d as usize);
    let mut e = Enumerator::new(config, guards)?;
    e.run()?;
    let probes: Vec<Interpretation> = interps.iter().filter(|i| i.n <= PROBE_MAX).copied().collect();
    let mut probe_types: BTreeMap<_, Vec<Interpretation>> = BTreeMap::new();
    for i in &probes {
        let t = d_type(i, d);
        probe_types.entry((t.ord, t.dist)).or_default().push(*i);
    }
    let mut formulas_checked = 0;
    let mut enumeration_counterexamples = Vec::new();
    for s in 1..=e.size() {
        for x in e.level(s) {
            formulas_checked += 1;
            for members in probe_types.values() {
                let v0 = e.truth(x, &members[0]);
                if let Some(j) = members[1..].iter().find(|j| e.truth(x, j) != v0) {
                    enumeration_counterexamples.push((x.formula.to_string(), members[0], *j));
                }
            }
        }
    }
    Ok(Lemma3Report {
        depth: d,
        max_order: n_max,
        interpretations: interps.len(),
        type_classes: by_type.len(),
        refinement_counterexamples,
        formulas_checked,
        enumeration_counterexamples,
    })
}
