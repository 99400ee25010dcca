//! Signed generation trees.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::signature::Polarity;
use super::term::{Path, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Sign of a child reached through a coordinate of the given polarity.
    pub fn apply(self, p: Polarity) -> Self {
        match p {
            Polarity::Pos => self,
            Polarity::Neg => self.flip(),
        }
    }

    /// The leaf sign which is critical for a letter of this order-type entry.
    pub fn critical_for(p: Polarity) -> Self {
        match p {
            Polarity::Pos => Sign::Plus,
            Polarity::Neg => Sign::Minus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct SignedNode<'a> {
    pub term: &'a Term,
    pub sign: Sign,
    pub parent: Option<NodeId>,
    /// Coordinate of this node in its parent.
    pub coordinate: usize,
    pub children: Vec<NodeId>,
    pub path: Path,
}

/// The generation tree of a term with a sign at every node. Node 0 is the root.
#[derive(Debug, Clone)]
pub struct SignedTree<'a> {
    pub nodes: Vec<SignedNode<'a>>,
}

impl<'a> SignedTree<'a> {
    pub fn new(term: &'a Term, sign: Sign) -> Self {
        let mut tree = SignedTree { nodes: Vec::new() };
        tree.push(term, sign, None, 0, Vec::new());
        tree
    }

    fn push(&mut self, term: &'a Term, sign: Sign, parent: Option<NodeId>, coordinate: usize, path: Path) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(SignedNode { term, sign, parent, coordinate, children: Vec::new(), path: path.clone() });
        for (i, child) in term.children().into_iter().enumerate() {
            let mut p = path.clone();
            p.push(i);
            let c = self.push(child, sign.apply(term.child_polarity(i)), Some(id), i, p);
            self.nodes[id].children.push(c);
        }
        id
    }

    pub fn root(&self) -> &SignedNode<'a> {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &SignedNode<'a> {
        &self.nodes[id]
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].children.is_empty())
    }

    /// Leaves labelled by proposition letters, with their sign.
    pub fn letter_leaves(&self) -> Vec<(NodeId, &'a str, Sign)> {
        self.leaves()
            .filter_map(|i| match self.nodes[i].term {
                Term::Prop(p) => Some((i, p.as_str(), self.nodes[i].sign)),
                _ => None,
            })
            .collect()
    }

    /// Ancestors of `id`, nearest first, excluding `id` itself.
    pub fn ancestors(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.nodes[p].parent;
        }
        out
    }

    /// Subtree node ids of `id` (pre-order, including `id`).
    pub fn descendants(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.nodes[out[i]].children.iter().copied());
            i += 1;
        }
        out
    }

    pub fn find_path(&self, path: &[usize]) -> Option<NodeId> {
        let mut cur = 0;
        for &i in path {
            cur = *self.nodes[cur].children.get(i)?;
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::signature::{Family, OrderType, Signature};
    use crate::syntax::term::BinderKind;

    #[test]
    fn application_flips_at_antitone_coordinates() {
        let sig = Signature::declare(&[("f".into(), Family::F, 2, OrderType::parse("(1,d)").unwrap())]).unwrap();
        let t = Term::app(sig.get("f").unwrap().clone(), vec![Term::prop("p"), Term::prop("q")]).unwrap();
        let tree = SignedTree::new(&t, Sign::Plus);
        let leaves = tree.letter_leaves();
        assert_eq!(leaves[0].1, "p");
        assert_eq!(leaves[0].2, Sign::Plus);
        assert_eq!(leaves[1].1, "q");
        assert_eq!(leaves[1].2, Sign::Minus);
    }

    #[test]
    fn lattice_nodes_and_binders_propagate() {
        let t = Term::join(Term::prop("p"), Term::prop("q"));
        let tree = SignedTree::new(&t, Sign::Minus);
        assert!(tree.nodes.iter().all(|n| n.sign == Sign::Minus));

        let sig = Signature::default_unary();
        let f = sig.get("f").unwrap().clone();
        let body = Term::join(Term::prop("p"), Term::app(f, vec![Term::fpvar("X")]).unwrap());
        let b = Term::binder(BinderKind::Mu, "X", body).unwrap();
        let tree = SignedTree::new(&b, Sign::Plus);
        assert!(tree.nodes.iter().all(|n| n.sign == Sign::Plus));
        assert_eq!(tree.nodes.len(), 5);
    }
}
