//! Node classification, branch decomposition and membership in the recursive,
//! inductive, restricted inductive and tame inductive classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Exec};
use crate::syntax::{Inequality, Language, NodeId, Polarity, Sign, SignedTree, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeFlag {
    DeltaAdjoint,
    SlrOuter,
    BinderInner,
    Sla,
    SlrInner,
    BinderPia,
    Sra,
    Srr,
}

impl NodeFlag {
    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NodeClass(u8);

impl NodeClass {
    pub fn with(self, flag: NodeFlag) -> Self {
        NodeClass(self.0 | flag.bit())
    }

    pub fn has(self, flag: NodeFlag) -> bool {
        self.0 & flag.bit() != 0
    }

    pub fn flags(self) -> Vec<NodeFlag> {
        use NodeFlag::*;
        [DeltaAdjoint, SlrOuter, BinderInner, Sla, SlrInner, BinderPia, Sra, Srr].into_iter().filter(|f| self.has(*f)).collect()
    }

    pub fn is_outer_skeleton(self) -> bool {
        self.has(NodeFlag::DeltaAdjoint) || self.has(NodeFlag::SlrOuter)
    }

    pub fn is_inner_skeleton(self) -> bool {
        self.has(NodeFlag::BinderInner) || self.has(NodeFlag::Sla) || self.has(NodeFlag::SlrInner)
    }

    pub fn is_skeleton(self) -> bool {
        self.is_outer_skeleton() || self.is_inner_skeleton()
    }

    pub fn is_pia(self) -> bool {
        self.has(NodeFlag::BinderPia) || self.has(NodeFlag::Sra) || self.has(NodeFlag::Srr)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// Classifies a signed node by its sign, constructor, arity and family.
/// Leaves carry no flags; starred and second-kind binders classify like `mu`/`nu`.
pub fn classify_node(term: &Term, sign: Sign) -> NodeClass {
    use crate::syntax::Family;
    use NodeFlag::*;
    let c = NodeClass::default();
    // `positive_like`: +∨ / −∧ (join-like at this sign), +f / −g.
    match (term, sign) {
        (Term::Join(..), Sign::Plus) | (Term::Meet(..), Sign::Minus) => c.with(DeltaAdjoint).with(Sla),
        (Term::Meet(..), Sign::Plus) | (Term::Join(..), Sign::Minus) => c.with(Sra),
        (Term::App(conn, _), _) => {
            let left_residual = matches!((conn.family, sign), (Family::F, Sign::Plus) | (Family::G, Sign::Minus));
            match (left_residual, conn.arity()) {
                (_, 0) if left_residual => c.with(SlrOuter),
                (_, 0) => c,
                (true, 1) => c.with(SlrOuter).with(Sla),
                (true, _) => c.with(SlrOuter).with(SlrInner),
                (false, 1) => c.with(Sra),
                (false, _) => c.with(Srr),
            }
        }
        (Term::Binder(kind, _, _), _) => {
            if kind.is_least() == (sign == Sign::Plus) {
                c.with(BinderInner)
            } else {
                c.with(BinderPia)
            }
        }
        _ => c,
    }
}

/// An order-type over named proposition letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Epsilon(pub BTreeMap<String, Polarity>);

impl Epsilon {
    pub fn uniform(letters: &[String], p: Polarity) -> Self {
        Epsilon(letters.iter().map(|l| (l.clone(), p)).collect())
    }

    /// Order-type number `mask` over `letters`: bit `i` set means letter `i` is `∂`.
    pub fn from_mask(letters: &[String], mask: usize) -> Self {
        Epsilon(
            letters
                .iter()
                .enumerate()
                .map(|(i, l)| (l.clone(), if mask >> i & 1 == 1 { Polarity::Neg } else { Polarity::Pos }))
                .collect(),
        )
    }

    /// Letters absent from the map default to `1`.
    pub fn get(&self, letter: &str) -> Polarity {
        self.0.get(letter).copied().unwrap_or(Polarity::Pos)
    }

    pub fn opposite(&self) -> Self {
        Epsilon(self.0.iter().map(|(k, v)| (k.clone(), v.flip())).collect())
    }

    pub fn is_critical(&self, letter: &str, sign: Sign) -> bool {
        Sign::critical_for(self.get(letter)) == sign
    }

    /// Parses `p=1,q=d`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected `letter=1|d`, got `{item}`"))?;
            let p = match v.trim() {
                "1" => Polarity::Pos,
                "d" | "∂" => Polarity::Neg,
                other => return Err(format!("bad polarity `{other}`")),
            };
            map.insert(k.trim().to_string(), p);
        }
        Ok(Epsilon(map))
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={}", v.symbol())).collect();
        f.write_str(&parts.join(","))
    }
}

/// A strict order on letters given by its generating edges `(smaller, larger)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrictOrder(pub BTreeSet<(String, String)>);

impl StrictOrder {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Irreflexive and acyclic.
    pub fn is_acyclic(&self) -> bool {
        topological_order(&self.0, &[]).is_some()
    }

    /// Whether `a < b` in the transitive closure.
    pub fn less(&self, a: &str, b: &str) -> bool {
        let mut stack = vec![a.to_string()];
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            for (s, t) in &self.0 {
                if *s == x {
                    if t == b {
                        return true;
                    }
                    if seen.insert(t.clone()) {
                        stack.push(t.clone());
                    }
                }
            }
        }
        false
    }

    /// Letters in an order compatible with `<` (smaller first); ties follow `letters`.
    pub fn linearize(&self, letters: &[String]) -> Option<Vec<String>> {
        topological_order(&self.0, letters)
    }

    /// Parses `q<p,r<p`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut edges = BTreeSet::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, b) = item.split_once('<').ok_or_else(|| format!("expected `a<b`, got `{item}`"))?;
            edges.insert((a.trim().to_string(), b.trim().to_string()));
        }
        Ok(StrictOrder(edges))
    }
}

impl fmt::Display for StrictOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("{a}<{b}")).collect();
        f.write_str(&parts.join(","))
    }
}

fn topological_order(edges: &BTreeSet<(String, String)>, letters: &[String]) -> Option<Vec<String>> {
    let mut nodes: Vec<String> = letters.to_vec();
    for (a, b) in edges {
        for x in [a, b] {
            if !nodes.contains(x) {
                nodes.push(x.clone());
            }
        }
    }
    let mut out = Vec::new();
    let mut remaining = nodes;
    while !remaining.is_empty() {
        let pos = remaining.iter().position(|x| !edges.iter().any(|(a, b)| b == x && remaining.contains(a)))?;
        out.push(remaining.remove(pos));
    }
    Some(out)
}

/// A root-to-leaf path through a signed tree, stored leaf-first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub leaf: NodeId,
    /// Ancestors of the leaf, nearest first.
    pub nodes: Vec<NodeId>,
}

impl Branch {
    pub fn to(tree: &SignedTree<'_>, leaf: NodeId) -> Self {
        Branch { leaf, nodes: tree.ancestors(leaf) }
    }

    /// The node just below `nodes[k]` on this branch.
    fn below(&self, k: usize) -> NodeId {
        if k == 0 {
            self.leaf
        } else {
            self.nodes[k - 1]
        }
    }

    /// Children of `nodes[k]` not on the branch.
    pub fn side_children(&self, tree: &SignedTree<'_>, k: usize) -> Vec<NodeId> {
        let on = self.below(k);
        tree.node(self.nodes[k]).children.iter().copied().filter(|&c| c != on).collect()
    }

    pub fn letter<'a>(&self, tree: &SignedTree<'a>) -> Option<&'a str> {
        match tree.node(self.leaf).term {
            Term::Prop(p) => Some(p.as_str()),
            _ => None,
        }
    }

    /// Root-to-leaf `(constructor, sign)` pairs.
    pub fn describe(&self, tree: &SignedTree<'_>) -> Vec<(String, Sign)> {
        let mut out: Vec<(String, Sign)> =
            self.nodes.iter().rev().map(|&n| (constructor_label(tree.node(n).term), tree.node(n).sign)).collect();
        out.push((constructor_label(tree.node(self.leaf).term), tree.node(self.leaf).sign));
        out
    }
}

pub fn constructor_label(t: &Term) -> String {
    match t {
        Term::Meet(..) => "/\\".into(),
        Term::Join(..) => "\\/".into(),
        Term::App(c, _) => c.name.clone(),
        Term::Binder(k, x, _) => format!("{} {}", k.keyword(), x),
        leaf => leaf.to_string(),
    }
}

/// Split of a branch (above its leaf) into PIA, inner and outer skeleton segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchDecomposition {
    pub leaf: NodeId,
    pub p1: Vec<NodeId>,
    pub p2: Vec<NodeId>,
    pub p3: Vec<NodeId>,
}

impl BranchDecomposition {
    /// Re-validates the segments against the node flags.
    pub fn is_consistent(&self, tree: &SignedTree<'_>) -> bool {
        let class = |n: &NodeId| classify_node(tree.node(*n).term, tree.node(*n).sign);
        self.p1.iter().all(|n| class(n).is_pia())
            && self.p2.iter().all(|n| class(n).is_inner_skeleton())
            && self.p3.iter().all(|n| class(n).is_outer_skeleton())
    }
}

/// All ε-critical branches, in leaf order.
pub fn critical_branches(tree: &SignedTree<'_>, eps: &Epsilon) -> Vec<Branch> {
    tree.letter_leaves()
        .into_iter()
        .filter(|(_, p, s)| eps.is_critical(p, *s))
        .map(|(id, _, _)| Branch::to(tree, id))
        .collect()
}

pub fn decompose_branch(tree: &SignedTree<'_>, branch: &Branch) -> Vec<BranchDecomposition> {
    let classes: Vec<NodeClass> =
        branch.nodes.iter().map(|&n| classify_node(tree.node(n).term, tree.node(n).sign)).collect();
    let n = classes.len();
    let mut out = Vec::new();
    for k1 in 0..=n {
        if !classes[..k1].iter().all(|c| c.is_pia()) {
            break;
        }
        for k2 in k1..=n {
            if !classes[k1..k2].iter().all(|c| c.is_inner_skeleton()) {
                break;
            }
            if classes[k2..].iter().all(|c| c.is_outer_skeleton()) {
                out.push(BranchDecomposition {
                    leaf: branch.leaf,
                    p1: branch.nodes[..k1].to_vec(),
                    p2: branch.nodes[k1..k2].to_vec(),
                    p3: branch.nodes[k2..].to_vec(),
                });
            }
        }
    }
    out
}

/// Every letter leaf of the subtree at `id` is critical for the opposite order-type.
fn agrees_with_opposite(tree: &SignedTree<'_>, id: NodeId, eps: &Epsilon) -> bool {
    tree.descendants(id).into_iter().all(|d| match tree.node(d).term {
        Term::Prop(p) => !eps.is_critical(p, tree.node(d).sign),
        _ => true,
    })
}

fn side_conditions_hold(tree: &SignedTree<'_>, branch: &Branch, segment: &[NodeId], flag: NodeFlag, eps: &Epsilon) -> bool {
    segment.iter().all(|&n| {
        let node = tree.node(n);
        if !classify_node(node.term, node.sign).has(flag) {
            return true;
        }
        let k = branch.nodes.iter().position(|&m| m == n).expect("segment node on branch");
        branch
            .side_children(tree, k)
            .into_iter()
            .all(|c| tree.node(c).term.is_sentence() && agrees_with_opposite(tree, c, eps))
    })
}

/// GB1–GB3.
pub fn check_good(tree: &SignedTree<'_>, branch: &Branch, eps: &Epsilon, dec: &BranchDecomposition) -> bool {
    let top = dec.p1.last().copied().unwrap_or(dec.leaf);
    tree.node(top).term.is_sentence()
        && side_conditions_hold(tree, branch, &dec.p1, NodeFlag::Srr, eps)
        && side_conditions_hold(tree, branch, &dec.p2, NodeFlag::SlrInner, eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchProps {
    pub nb_pia: bool,
    pub nl: bool,
}

pub fn check_branch_props(tree: &SignedTree<'_>, branch: &Branch, dec: &BranchDecomposition) -> BranchProps {
    let nb_pia = dec.p1.iter().all(|&n| !matches!(tree.node(n).term, Term::Binder(..)));
    let nl = dec.p2.iter().all(|&n| {
        let node = tree.node(n);
        if !classify_node(node.term, node.sign).has(NodeFlag::SlrInner) {
            return true;
        }
        let k = branch.nodes.iter().position(|&m| m == n).expect("segment node on branch");
        branch.side_children(tree, k).into_iter().all(|c| !tree.node(c).term.has_letters())
    });
    BranchProps { nb_pia, nl }
}

/// Constraints `(p_j, p_i)` forced by the SRR side subtrees on P1.
pub fn omega_constraints(tree: &SignedTree<'_>, branch: &Branch, dec: &BranchDecomposition) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    let Some(leaf) = branch.letter(tree) else { return out };
    for &n in &dec.p1 {
        let node = tree.node(n);
        if !classify_node(node.term, node.sign).has(NodeFlag::Srr) {
            continue;
        }
        let k = branch.nodes.iter().position(|&m| m == n).expect("segment node on branch");
        for c in branch.side_children(tree, k) {
            for p in tree.node(c).term.letters() {
                out.insert((p, leaf.to_string()));
            }
        }
    }
    out
}

pub fn check_omega_conf(tree: &SignedTree<'_>, branch: &Branch, dec: &BranchDecomposition, omega: &StrictOrder) -> bool {
    omega_constraints(tree, branch, dec).iter().all(|(a, b)| omega.less(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassName {
    Recursive,
    Inductive,
    Restricted,
    Tame,
}

impl ClassName {
    pub const ALL: [ClassName; 4] = [ClassName::Recursive, ClassName::Inductive, ClassName::Restricted, ClassName::Tame];

    pub fn label(self) -> &'static str {
        match self {
            ClassName::Recursive => "recursive",
            ClassName::Inductive => "inductive",
            ClassName::Restricted => "restricted inductive",
            ClassName::Tame => "tame inductive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub epsilon: Epsilon,
    pub omega: StrictOrder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub epsilon: Epsilon,
    /// Root-to-node `(constructor, sign)` pairs.
    pub branch: Vec<(String, Sign)>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub class: ClassName,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub version: u32,
    pub inequality: String,
    pub letters: Vec<String>,
    pub summary: String,
    pub classes: Vec<ClassVerdict>,
}

impl ClassReport {
    pub fn verdict(&self, class: ClassName) -> &ClassVerdict {
        self.classes.iter().find(|v| v.class == class).expect("all classes reported")
    }

    pub fn holds(&self, class: ClassName) -> bool {
        self.verdict(class).holds
    }

    pub fn witness(&self, class: ClassName) -> Option<&Witness> {
        self.verdict(class).witnesses.first()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("classification input must be an L1 inequality over the base signature: {0}")]
    OutsideL1(String),
}

/// Per-ε evaluation of all four classes.
#[derive(Debug, Clone)]
struct EpsilonResult {
    eps: Epsilon,
    recursive: Result<(), Failure>,
    inductive: Result<StrictOrder, Failure>,
    restricted: Result<StrictOrder, Failure>,
    tame: Result<(), Failure>,
}

fn failure(eps: &Epsilon, tree: &SignedTree<'_>, branch: &Branch, reason: &str) -> Failure {
    Failure { epsilon: eps.clone(), branch: branch.describe(tree), reason: reason.into() }
}

fn node_failure(eps: &Epsilon, tree: &SignedTree<'_>, id: NodeId, reason: &str) -> Failure {
    let mut path: Vec<(String, Sign)> =
        tree.ancestors(id).iter().rev().map(|&n| (constructor_label(tree.node(n).term), tree.node(n).sign)).collect();
    path.push((constructor_label(tree.node(id).term), tree.node(id).sign));
    Failure { epsilon: eps.clone(), branch: path, reason: reason.into() }
}

fn evaluate_epsilon(trees: &[SignedTree<'_>; 2], eps: Epsilon) -> EpsilonResult {
    let mut recursive = Ok(());
    let mut restricted_props: Result<(), Failure> = Ok(());
    let mut constraints = BTreeSet::new();
    let mut binder_on_critical: Option<Failure> = None;
    let mut on_critical: [BTreeSet<NodeId>; 2] = [BTreeSet::new(), BTreeSet::new()];

    for (t, tree) in trees.iter().enumerate() {
        for branch in critical_branches(tree, &eps) {
            on_critical[t].extend(branch.nodes.iter().copied());
            if binder_on_critical.is_none() {
                if let Some(&b) = branch.nodes.iter().find(|&&n| matches!(tree.node(n).term, Term::Binder(..))) {
                    binder_on_critical = Some(node_failure(&eps, tree, b, "binder on a critical branch"));
                }
            }
            let good: Vec<BranchDecomposition> =
                decompose_branch(tree, &branch).into_iter().filter(|d| check_good(tree, &branch, &eps, d)).collect();
            let Some(first) = good.first() else {
                if recursive.is_ok() {
                    recursive = Err(failure(&eps, tree, &branch, "critical branch is not good"));
                }
                continue;
            };
            constraints.extend(omega_constraints(tree, &branch, first));
            let props_ok = good.iter().any(|d| {
                let p = check_branch_props(tree, &branch, d);
                p.nb_pia && p.nl
            });
            if !props_ok && restricted_props.is_ok() {
                restricted_props = Err(failure(&eps, tree, &branch, "NB-PIA or NL fails on every good decomposition"));
            }
        }
    }

    let inductive = match &recursive {
        Err(f) => Err(f.clone()),
        Ok(()) => {
            let omega = StrictOrder(constraints);
            if omega.is_acyclic() {
                Ok(omega)
            } else {
                let reason = format!("forced Omega constraints {omega} are cyclic");
                Err(Failure { epsilon: eps.clone(), branch: Vec::new(), reason })
            }
        }
    };

    let restricted = inductive.clone().and_then(|omega| {
        restricted_props.clone()?;
        for (t, tree) in trees.iter().enumerate() {
            for (id, node) in tree.nodes.iter().enumerate() {
                if matches!(node.term, Term::Binder(..)) && !on_critical[t].contains(&id) {
                    return Err(node_failure(&eps, tree, id, "binder not on any critical branch"));
                }
            }
        }
        Ok(omega)
    });

    let tame = inductive.clone().and_then(|omega| {
        if !omega.is_empty() {
            return Err(Failure { epsilon: eps.clone(), branch: Vec::new(), reason: format!("Omega {omega} is not empty") });
        }
        if let Some(f) = binder_on_critical.clone() {
            return Err(f);
        }
        for tree in trees {
            for (id, node) in tree.nodes.iter().enumerate() {
                if let Term::Binder(kind, _, _) = node.term {
                    if kind.is_least() == (node.sign == Sign::Plus) {
                        return Err(node_failure(&eps, tree, id, "only +nu and -mu binders are allowed"));
                    }
                }
            }
        }
        Ok(())
    });

    EpsilonResult { eps, recursive, inductive, restricted, tame }
}

/// Re-checks a witness directly against the class definition, using the given
/// Ω instead of synthesizing one.
pub fn validate_witness(ineq: &Inequality, class: ClassName, w: &Witness) -> bool {
    if !w.omega.is_acyclic() {
        return false;
    }
    if class == ClassName::Tame && !w.omega.is_empty() {
        return false;
    }
    let trees = [SignedTree::new(&ineq.lhs, Sign::Plus), SignedTree::new(&ineq.rhs, Sign::Minus)];
    for tree in &trees {
        let mut on_critical = BTreeSet::new();
        for branch in critical_branches(tree, &w.epsilon) {
            on_critical.extend(branch.nodes.iter().copied());
            let ok = decompose_branch(tree, &branch).iter().any(|d| {
                if !check_good(tree, &branch, &w.epsilon, d) {
                    return false;
                }
                let conf = class == ClassName::Recursive || check_omega_conf(tree, &branch, d, &w.omega);
                let props = class != ClassName::Restricted || {
                    let p = check_branch_props(tree, &branch, d);
                    p.nb_pia && p.nl
                };
                conf && props
            });
            if !ok {
                return false;
            }
            if class == ClassName::Tame && branch.nodes.iter().any(|&n| matches!(tree.node(n).term, Term::Binder(..))) {
                return false;
            }
        }
        for (id, node) in tree.nodes.iter().enumerate() {
            let Term::Binder(kind, _, _) = node.term else { continue };
            match class {
                ClassName::Restricted if !on_critical.contains(&id) => return false,
                ClassName::Tame if kind.is_least() == (node.sign == Sign::Plus) => return false,
                _ => {}
            }
        }
    }
    true
}

pub fn classify_inequality(ineq: &Inequality) -> Result<ClassReport, ClassifyError> {
    classify_inequality_with(ineq, Exec::default())
}

pub fn classify_inequality_with(ineq: &Inequality, exec: Exec) -> Result<ClassReport, ClassifyError> {
    if !ineq.in_language(Language::L1) {
        return Err(ClassifyError::OutsideL1(ineq.to_string()));
    }
    let letters = ineq.letters();
    let n = letters.len();
    let results: Vec<EpsilonResult> = par::map_range(exec, 1usize << n, |mask| {
        let trees = [SignedTree::new(&ineq.lhs, Sign::Plus), SignedTree::new(&ineq.rhs, Sign::Minus)];
        evaluate_epsilon(&trees, Epsilon::from_mask(&letters, mask))
    });

    let collect = |class: ClassName| -> ClassVerdict {
        let mut witnesses = Vec::new();
        let mut failures = Vec::new();
        for r in &results {
            let outcome = match class {
                ClassName::Recursive => r.recursive.clone().map(|_| StrictOrder::default()),
                ClassName::Inductive => r.inductive.clone(),
                ClassName::Restricted => r.restricted.clone(),
                ClassName::Tame => r.tame.clone().map(|_| StrictOrder::default()),
            };
            match outcome {
                Ok(omega) => witnesses.push(Witness { epsilon: r.eps.clone(), omega }),
                Err(f) => failures.push(f),
            }
        }
        let holds = !witnesses.is_empty();
        if holds {
            failures.clear();
        }
        ClassVerdict { class, holds, witnesses, failures }
    };
    let classes: Vec<ClassVerdict> = ClassName::ALL.iter().map(|&c| collect(c)).collect();
    let summary = {
        let held: Vec<&str> = [ClassName::Tame, ClassName::Restricted]
            .iter()
            .filter(|c| classes.iter().any(|v| v.class == **c && v.holds))
            .map(|c| c.label())
            .collect();
        if !held.is_empty() {
            held.join(", ")
        } else if let Some(v) = [ClassName::Inductive, ClassName::Recursive]
            .iter()
            .find(|c| classes.iter().any(|v| v.class == **c && v.holds))
        {
            v.label().to_string()
        } else {
            "not recursive".to_string()
        }
    };
    Ok(ClassReport { version: 1, inequality: ineq.to_string(), letters, summary, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_inequality, parse_term, Family, OrderType, Signature};

    fn sig() -> Signature {
        Signature::declare(&[
            ("f".into(), Family::F, 1, OrderType::parse("(1)").unwrap()),
            ("g".into(), Family::G, 1, OrderType::parse("(1)").unwrap()),
            ("h".into(), Family::F, 2, OrderType::parse("(1,1)").unwrap()),
            ("k".into(), Family::G, 2, OrderType::parse("(1,1)").unwrap()),
            ("fd".into(), Family::F, 1, OrderType::parse("(d)").unwrap()),
        ])
        .unwrap()
    }

    fn class_of(text: &str, sign: Sign) -> NodeClass {
        let t = parse_term(text, &sig()).unwrap();
        classify_node(&t, sign)
    }

    #[test]
    fn node_table() {
        use NodeFlag::*;
        assert_eq!(class_of("p \\/ q", Sign::Plus).flags(), vec![DeltaAdjoint, Sla]);
        assert_eq!(class_of("g(p)", Sign::Minus).flags(), vec![SlrOuter, Sla]);
        assert_eq!(class_of("nu X. X", Sign::Plus).flags(), vec![BinderPia]);
        assert_eq!(class_of("mu X. X", Sign::Plus).flags(), vec![BinderInner]);
        assert_eq!(class_of("mu* X. X", Sign::Minus).flags(), vec![BinderPia]);
        assert_eq!(class_of("h(p, q)", Sign::Plus).flags(), vec![SlrOuter, SlrInner]);
        assert_eq!(class_of("h(p, q)", Sign::Minus).flags(), vec![Srr]);
        assert_eq!(class_of("k(p, q)", Sign::Plus).flags(), vec![Srr]);
        assert_eq!(class_of("p /\\ q", Sign::Plus).flags(), vec![Sra]);
        assert_eq!(class_of("f(p)", Sign::Minus).flags(), vec![Sra]);
        assert!(class_of("p", Sign::Plus).is_empty());
    }

    #[test]
    fn critical_branch_selection() {
        let s = sig();
        let eps = Epsilon::uniform(&["p".into()], Polarity::Pos);
        let t = parse_term("f(p)", &s).unwrap();
        assert_eq!(critical_branches(&SignedTree::new(&t, Sign::Plus), &eps).len(), 1);
        let t = parse_term("g(p)", &s).unwrap();
        assert!(critical_branches(&SignedTree::new(&t, Sign::Minus), &eps).is_empty());
        let t = parse_term("p /\\ f(p)", &s).unwrap();
        assert_eq!(critical_branches(&SignedTree::new(&t, Sign::Plus), &eps).len(), 2);
    }

    #[test]
    fn decompositions() {
        let s = sig();
        let t = parse_term("mu X. (p \\/ f(X))", &s).unwrap();
        let tree = SignedTree::new(&t, Sign::Plus);
        let leaf = tree.letter_leaves()[0].0;
        let decs = decompose_branch(&tree, &Branch::to(&tree, leaf));
        assert!(decs.iter().any(|d| d.p1.is_empty() && d.p2.len() == 2 && d.p3.is_empty()));
        assert!(decs.iter().all(|d| d.is_consistent(&tree)));

        // PIA above skeleton.
        let t = parse_term("f(p) /\\ q", &s).unwrap();
        let tree = SignedTree::new(&t, Sign::Plus);
        let leaf = tree.letter_leaves()[0].0;
        assert!(decompose_branch(&tree, &Branch::to(&tree, leaf)).is_empty());

        let t = parse_term("p", &s).unwrap();
        let tree = SignedTree::new(&t, Sign::Plus);
        let decs = decompose_branch(&tree, &Branch::to(&tree, 0));
        assert_eq!(decs.len(), 1);
        assert!(decs[0].p1.is_empty() && decs[0].p2.is_empty() && decs[0].p3.is_empty());
    }

    #[test]
    fn good_branch_side_conditions() {
        let s = sig();
        let t = parse_term("k(q, p)", &s).unwrap();
        let tree = SignedTree::new(&t, Sign::Plus);
        let eps = Epsilon::uniform(&["q".into(), "p".into()], Polarity::Pos);
        let leaf = tree.letter_leaves()[1].0;
        let branch = Branch::to(&tree, leaf);
        let decs = decompose_branch(&tree, &branch);
        assert!(!decs.is_empty());
        assert!(decs.iter().all(|d| !check_good(&tree, &branch, &eps, d)));
        let eps = Epsilon::parse("q=d,p=1").unwrap();
        assert!(decs.iter().any(|d| check_good(&tree, &branch, &eps, d)));

        let dec = &decs[0];
        assert!(!check_omega_conf(&tree, &branch, dec, &StrictOrder::default()));
        assert!(check_omega_conf(&tree, &branch, dec, &StrictOrder::parse("q<p").unwrap()));
    }

    #[test]
    fn branch_properties() {
        let s = sig();
        let t = parse_term("h(nu X. g(X), p)", &s).unwrap();
        let tree = SignedTree::new(&t, Sign::Plus);
        let leaf = tree.letter_leaves()[0].0;
        let branch = Branch::to(&tree, leaf);
        let dec = decompose_branch(&tree, &branch).into_iter().find(|d| d.p2.len() == 1).unwrap();
        assert_eq!(check_branch_props(&tree, &branch, &dec), BranchProps { nb_pia: true, nl: true });

        let t = parse_term("f(nu X. (p /\\ g(X)))", &s).unwrap();
        let tree = SignedTree::new(&t, Sign::Plus);
        let leaf = tree.letter_leaves()[0].0;
        let branch = Branch::to(&tree, leaf);
        let dec = &decompose_branch(&tree, &branch)[0];
        assert!(!check_branch_props(&tree, &branch, dec).nb_pia);
    }

    #[test]
    fn classify_examples() {
        let s = Signature::default_unary();
        let r = classify_inequality(&parse_inequality("f(p) <= g(p)", &s).unwrap()).unwrap();
        assert!(r.holds(ClassName::Tame));
        let w = r.witness(ClassName::Tame).unwrap();
        assert_eq!(w.epsilon, Epsilon::parse("p=1").unwrap());
        assert!(w.omega.is_empty());

        let r = classify_inequality(&parse_inequality("mu X. (p \\/ f(X)) <= g(p)", &s).unwrap()).unwrap();
        assert!(r.holds(ClassName::Restricted));
        assert!(!r.holds(ClassName::Tame));
        assert_eq!(r.witness(ClassName::Restricted).unwrap().epsilon, Epsilon::parse("p=1").unwrap());

        let r = classify_inequality(&parse_inequality("g(f(p)) <= f(g(p))", &s).unwrap()).unwrap();
        assert!(!r.holds(ClassName::Recursive));
        assert_eq!(r.verdict(ClassName::Recursive).failures.len(), 2);
        assert_eq!(r.summary, "not recursive");
    }

    #[test]
    fn rejects_non_l1() {
        let s = Signature::default_unary();
        let i = parse_inequality("j1 <= p", &s).unwrap();
        assert!(classify_inequality(&i).is_err());
        let i = parse_inequality("mu* X. X <= p", &s).unwrap();
        assert!(classify_inequality(&i).is_err());
    }

    #[test]
    fn strict_order_utilities() {
        let o = StrictOrder::parse("q<p,r<q").unwrap();
        assert!(o.is_acyclic());
        assert!(o.less("r", "p"));
        let letters: Vec<String> = vec!["p".into(), "q".into(), "r".into()];
        assert_eq!(o.linearize(&letters).unwrap(), vec!["r", "q", "p"]);
        assert!(!StrictOrder::parse("p<p").unwrap().is_acyclic());
        assert!(!StrictOrder::parse("p<q,q<p").unwrap().is_acyclic());
    }
}
