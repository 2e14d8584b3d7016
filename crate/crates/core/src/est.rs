//! Extended syntax trees: a formula's syntax tree with each node labelled by
//! a pair of interpretation sets that the node's subformula tells apart, plus
//! the per-node weight checks and the size lower-bound certificate.

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::formula::{Formula, Signature};
use crate::guard::Guards;
use crate::separators::{minimal_separator, Weight};
use crate::structures::{Interpretation, LinearOrder, Point, Structure};
use crate::Separator;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, Serialize)]
pub struct EstNode {
    /// Syntax label: the atom text, a connective, or `exists u` / `forall u`.
    pub sl: String,
    #[serde(skip)]
    pub formula: Formula,
    /// Interpretations satisfying the subformula.
    pub a: Vec<Interpretation>,
    /// Interpretations falsifying the subformula.
    pub b: Vec<Interpretation>,
    pub children: Vec<usize>,
}

/// Nodes in preorder; the root is node 0.
#[derive(Debug, Clone, Serialize)]
pub struct ExtSyntaxTree {
    pub nodes: Vec<EstNode>,
}

fn syntax_label(f: &Formula) -> String {
    match f {
        Formula::Not(_) => "not".into(),
        Formula::And(..) => "and".into(),
        Formula::Or(..) => "or".into(),
        Formula::Imp(..) => "imp".into(),
        Formula::Exists(v, _) => format!("exists {v}"),
        Formula::Forall(v, _) => format!("forall {v}"),
        atom => atom.to_string(),
    }
}

fn sorted(set: impl IntoIterator<Item = Interpretation>) -> Vec<Interpretation> {
    set.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Model checks subformulas, one compiled evaluator per subformula and order.
/// Subformulas are keyed by address, so every formula passed in must outlive
/// the oracle.
struct Oracle {
    cache: HashMap<(*const Formula, usize), Evaluator>,
}

impl Oracle {
    fn new() -> Self {
        Oracle {
            cache: HashMap::new(),
        }
    }

    fn holds(&mut self, f: &Formula, i: &Interpretation) -> Result<bool> {
        let key = (f as *const Formula, i.n);
        if let std::collections::hash_map::Entry::Vacant(e) = self.cache.entry(key) {
            let ev = Evaluator::new(f, &Structure::from(LinearOrder::new(i.n)))?;
            e.insert(ev);
        }
        self.cache.get_mut(&key).expect("inserted above").holds_xyz(i.vars)
    }

    fn split(
        &mut self,
        f: &Formula,
        set: &[Interpretation],
    ) -> Result<(Vec<Interpretation>, Vec<Interpretation>)> {
        let (mut yes, mut no) = (Vec::new(), Vec::new());
        for i in set {
            if self.holds(f, i)? {
                yes.push(*i);
            } else {
                no.push(*i);
            }
        }
        Ok((yes, no))
    }

    /// Least `a` with `f` evaluating to `want` under `i[u ↦ a]`.
    fn least(&mut self, f: &Formula, i: &Interpretation, u: Point, want: bool) -> Result<Interpretation> {
        for a in 0..=i.n {
            let j = i.with(u, a);
            if self.holds(f, &j)? == want {
                return Ok(j);
            }
        }
        Err(Error::Invariant(format!("no witness for `{f}` at {i}")))
    }
}

fn expand(set: &[Interpretation], u: Point) -> Vec<Interpretation> {
    sorted(set.iter().flat_map(|i| (0..=i.n).map(move |a| i.with(u, a))))
}

fn check_formula(f: &Formula) -> Result<()> {
    f.check_signature(&Signature::full_order())?;
    if let Some(v) = f.variables().into_iter().find(|v| Point::from_var(v).is_none()) {
        return Err(Error::Signature(format!(
            "extended syntax trees need variables among x, y, z; found `{v}`"
        )));
    }
    Ok(())
}

struct Builder<'f> {
    oracle: Oracle,
    _psi: std::marker::PhantomData<&'f Formula>,
    nodes: Vec<EstNode>,
    budget: usize,
}

impl<'f> Builder<'f> {
    fn node(&mut self, f: &'f Formula, a: Vec<Interpretation>, b: Vec<Interpretation>) -> Result<usize> {
        if a.len() + b.len() > self.budget {
            return Err(Error::guard(format!(
                "node `{}` carries {} interpretations, budget {}",
                syntax_label(f),
                a.len() + b.len(),
                self.budget
            )));
        }
        let id = self.nodes.len();
        self.nodes.push(EstNode {
            sl: syntax_label(f),
            formula: f.clone(),
            a: a.clone(),
            b: b.clone(),
            children: Vec::new(),
        });
        let children = match f {
            Formula::Not(g) => vec![self.node(g, b, a)?],
            Formula::Or(g, h) => {
                let (a1, a2) = self.oracle.split(g, &a)?;
                vec![self.node(g, a1, b.clone())?, self.node(h, a2, b)?]
            }
            Formula::And(g, h) => {
                let (b2, b1) = self.oracle.split(g, &b)?;
                vec![self.node(g, a.clone(), b1)?, self.node(h, a, b2)?]
            }
            // g → h as ¬g ∨ h: the members falsifying g go left with the
            // roles of the two sides exchanged
            Formula::Imp(g, h) => {
                let (a2, a1) = self.oracle.split(g, &a)?;
                vec![self.node(g, b.clone(), a1)?, self.node(h, a2, b)?]
            }
            Formula::Exists(v, g) => {
                let u = Point::from_var(v).expect("checked variable");
                let a1 = a
                    .iter()
                    .map(|i| self.oracle.least(g, i, u, true))
                    .collect::<Result<Vec<_>>>()?;
                vec![self.node(g, sorted(a1), expand(&b, u))?]
            }
            Formula::Forall(v, g) => {
                let u = Point::from_var(v).expect("checked variable");
                let b1 = b
                    .iter()
                    .map(|j| self.oracle.least(g, j, u, false))
                    .collect::<Result<Vec<_>>>()?;
                vec![self.node(g, expand(&a, u), sorted(b1))?]
            }
            _ => Vec::new(),
        };
        self.nodes[id].children = children;
        Ok(id)
    }
}

impl ExtSyntaxTree {
    /// Builds the tree for `ψ` over `⟨A, B⟩`. Witnesses for `∃` on the
    /// A-side and counterexamples for `∀` on the B-side are the least
    /// elements that work.
    pub fn build(
        psi: &Formula,
        a: &[Interpretation],
        b: &[Interpretation],
        guards: &Guards,
    ) -> Result<ExtSyntaxTree> {
        check_formula(psi)?;
        let mut oracle = Oracle::new();
        for i in a {
            if !oracle.holds(psi, i)? {
                return Err(Error::Precondition(format!("{i} in A falsifies the formula")));
            }
        }
        for j in b {
            if oracle.holds(psi, j)? {
                return Err(Error::Precondition(format!("{j} in B satisfies the formula")));
            }
        }
        let mut builder = Builder {
            oracle,
            _psi: std::marker::PhantomData,
            nodes: Vec::new(),
            budget: guards.tree_budget,
        };
        builder.node(psi, sorted(a.iter().copied()), sorted(b.iter().copied()))?;
        Ok(ExtSyntaxTree {
            nodes: builder.nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &EstNode {
        &self.nodes[0]
    }

    /// Re-evaluates every node: the A-side must satisfy and the B-side
    /// falsify the node's subformula. Returns the first offending node.
    pub fn verify_labels(&self) -> Result<()> {
        let mut oracle = Oracle::new();
        for (k, node) in self.nodes.iter().enumerate() {
            for i in &node.a {
                if !oracle.holds(&node.formula, i)? {
                    return Err(Error::Invariant(format!("node {k} ({}): {i} in A fails", node.sl)));
                }
            }
            for j in &node.b {
                if oracle.holds(&node.formula, j)? {
                    return Err(Error::Invariant(format!("node {k} ({}): {j} in B holds", node.sl)));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }
}

/// Which weight inequality a node must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    /// Leaf: `w ≤ 1`.
    Leaf,
    /// Two children: `w ≤ w1 + w2`.
    Binary,
    /// One child: `w ≤ w1 + 2`.
    Unary,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeCheck {
    pub node: usize,
    pub clause: Clause,
    pub weight: Option<Weight>,
    /// `None` when a separator search at this node or a child hit the guard.
    pub holds: Option<bool>,
    /// Whether the separator rebuilt from the children's minimal separators
    /// (pointwise sum, or the quantifier lift) separates this node's label.
    pub rebuilt_separates: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KeyPropReport {
    pub checks: Vec<NodeCheck>,
    pub violations: Vec<usize>,
    pub skipped: Vec<usize>,
}

impl KeyPropReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn node_separator(node: &EstNode, guards: &Guards) -> Result<Option<Separator>> {
    minimal_separator(&node.a, &node.b, guards)?
        .map(Some)
        .ok_or_else(|| Error::Invariant(format!("node `{}` has no separator", node.sl)))
}

/// Checks the weight inequalities at every node with exact arithmetic.
pub fn check_keyprop(t: &ExtSyntaxTree, guards: &Guards) -> Result<KeyPropReport> {
    let seps: Vec<Option<Separator>> = t
        .nodes
        .iter()
        .map(|n| match node_separator(n, guards) {
            Err(Error::Guard(_)) => Ok(None),
            other => other,
        })
        .collect::<Result<_>>()?;
    let mut report = KeyPropReport {
        checks: Vec::new(),
        violations: Vec::new(),
        skipped: Vec::new(),
    };
    for (k, node) in t.nodes.iter().enumerate() {
        let clause = match node.children.len() {
            0 => Clause::Leaf,
            1 => Clause::Unary,
            _ => Clause::Binary,
        };
        let kids: Option<Vec<Separator>> = node.children.iter().map(|&c| seps[c]).collect();
        let (holds, rebuilt) = match (&seps[k], kids) {
            (Some(d), Some(kids)) => {
                let w = d.weight();
                let holds = match clause {
                    Clause::Leaf => w.le_int(1),
                    Clause::Binary => w.le_sum(&kids[0].weight(), &kids[1].weight()),
                    Clause::Unary => w.le_plus(&kids[0].weight(), 2),
                };
                let rebuilt = match &node.formula {
                    Formula::Exists(v, _) | Formula::Forall(v, _) => {
                        let u = Point::from_var(v).expect("checked variable");
                        Some(kids[0].lift_quantifier(u)?)
                    }
                    Formula::Not(_) => Some(kids[0]),
                    _ if clause == Clause::Binary => Some(kids[0].combine_boolean(&kids[1])),
                    _ => None,
                };
                (Some(holds), rebuilt.map(|r| r.is_separator(&node.a, &node.b)))
            }
            _ => (None, None),
        };
        match holds {
            Some(false) => report.violations.push(k),
            None => report.skipped.push(k),
            _ => {}
        }
        if rebuilt == Some(false) && !report.violations.contains(&k) {
            report.violations.push(k);
        }
        report.checks.push(NodeCheck {
            node: k,
            clause,
            weight: seps[k].map(|d| d.weight()),
            holds,
            rebuilt_separates: rebuilt,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeBound {
    pub nodes: usize,
    pub root_weight: Weight,
    pub bound_holds: bool,
}

/// `|T| ≥ ½·w(root)`.
pub fn tree_size_bound(t: &ExtSyntaxTree, guards: &Guards) -> Result<SizeBound> {
    let d = node_separator(t.root(), guards)?.expect("guard errors propagate");
    let w = d.weight();
    Ok(SizeBound {
        nodes: t.len(),
        root_weight: w,
        bound_holds: w.half_le(t.len() as u64),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub formula: String,
    pub size: usize,
    pub separator: Separator,
    pub weight: Weight,
    /// `½·w` as a float, for display only.
    pub bound: f64,
    pub holds: bool,
}

/// Certifies `|ψ| ≥ ½·w(δ)` for a minimal separator `δ` of `⟨A, B⟩`. A
/// certificate with `holds = false` means something is broken here.
pub fn certify_lower_bound(
    psi: &Formula,
    a: &[Interpretation],
    b: &[Interpretation],
    guards: &Guards,
) -> Result<Certificate> {
    check_formula(psi)?;
    let mut oracle = Oracle::new();
    for i in a {
        if !oracle.holds(psi, i)? {
            return Err(Error::Precondition(format!("{i} in A falsifies the formula")));
        }
    }
    for j in b {
        if oracle.holds(psi, j)? {
            return Err(Error::Precondition(format!("{j} in B satisfies the formula")));
        }
    }
    let d = minimal_separator(a, b, guards)?
        .ok_or_else(|| Error::Invariant("distinguished sets without a separator".into()))?;
    let w = d.weight();
    Ok(Certificate {
        formula: psi.to_string(),
        size: psi.size(),
        separator: d,
        weight: w,
        bound: w.value::<f64>() / 2.0,
        holds: w.half_le(psi.size() as u64),
    })
}
