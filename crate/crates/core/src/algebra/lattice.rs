use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Elem = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("empty carrier")]
    Empty,
    #[error("duplicate element `{0}`")]
    Duplicate(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("order relation has a cycle through `{0}`")]
    Cycle(String),
    #[error("`{0}` and `{1}` have no join")]
    NoJoin(String, String),
    #[error("`{0}` and `{1}` have no meet")]
    NoMeet(String, String),
}

/// A finite bounded lattice with precomputed order, meet and join tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    name: String,
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<Elem>>,
    join: Vec<Vec<Elem>>,
    bot: Elem,
    top: Elem,
}

impl FiniteLattice {
    /// Builds from cover pairs `(lower, upper)`; the order is their reflexive-transitive closure.
    pub fn from_covers(name: &str, names: Vec<String>, covers: &[(Elem, Elem)]) -> Result<Self, LatticeError> {
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(LatticeError::UnknownElement(format!("#{}", a.max(b))));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Self::from_order(name, names, leq)
    }

    /// Builds from a full order matrix `leq[a][b]`.
    pub fn from_order(name: &str, names: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(LatticeError::Duplicate(a.clone()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(LatticeError::Cycle(names[a].clone()));
                }
            }
        }
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<Elem> = (0..n).filter(|&x| leq[x][a] && leq[x][b]).collect();
                let glb = lower.iter().copied().find(|&x| lower.iter().all(|&y| leq[y][x]));
                meet[a][b] = glb.ok_or_else(|| LatticeError::NoMeet(names[a].clone(), names[b].clone()))?;
                let upper: Vec<Elem> = (0..n).filter(|&x| leq[a][x] && leq[b][x]).collect();
                let lub = upper.iter().copied().find(|&x| upper.iter().all(|&y| leq[x][y]));
                join[a][b] = lub.ok_or_else(|| LatticeError::NoJoin(names[a].clone(), names[b].clone()))?;
            }
        }
        let bot = (0..n).fold(0, |acc, x| meet[acc][x]);
        let top = (0..n).fold(0, |acc, x| join[acc][x]);
        Ok(FiniteLattice { name: name.to_string(), names, leq, meet, join, bot, top })
    }

    pub fn chain(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        let covers: Vec<(Elem, Elem)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_covers(&format!("chain{n}"), names, &covers).expect("chains are lattices")
    }

    /// The powerset of a `k`-element set; element `i` is the bitmask `i`.
    pub fn boolean(k: u32) -> Self {
        let n = 1usize << k;
        let names = (0..n).map(|i| format!("{i:0width$b}", width = k as usize)).collect();
        let leq = (0..n).map(|a| (0..n).map(|b| a & b == a).collect()).collect();
        Self::from_order(&format!("2^{k}"), names, leq).expect("boolean algebras are lattices")
    }

    pub fn m3() -> Self {
        let names = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        Self::from_covers("M3", names, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).expect("M3")
    }

    /// Pentagon `0 < a < b < 1`, `0 < c < 1`.
    pub fn n5() -> Self {
        let names = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        Self::from_covers("N5", names, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]).expect("N5")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size()
    }

    pub fn element_name(&self, e: Elem) -> &str {
        &self.names[e]
    }

    pub fn element_names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a][b]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a][b]
    }

    pub fn bot(&self) -> Elem {
        self.bot
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.bot, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Elements that are not bottom and not the join of two strictly smaller elements.
    pub fn join_irreducibles(&self) -> Vec<Elem> {
        self.elements()
            .filter(|&x| {
                x != self.bot
                    && !self.elements().any(|a| {
                        self.elements().any(|b| a != x && b != x && self.leq(a, x) && self.leq(b, x) && self.join(a, b) == x)
                    })
            })
            .collect()
    }

    pub fn meet_irreducibles(&self) -> Vec<Elem> {
        self.elements()
            .filter(|&x| {
                x != self.top
                    && !self.elements().any(|a| {
                        self.elements().any(|b| a != x && b != x && self.leq(x, a) && self.leq(x, b) && self.meet(a, b) == x)
                    })
            })
            .collect()
    }

    pub fn is_distributive(&self) -> bool {
        self.elements().all(|a| {
            self.elements()
                .all(|b| self.elements().all(|c| self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c))))
        })
    }

    /// Cover pairs `(lower, upper)`.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if a != b
                    && self.leq(a, b)
                    && !self.elements().any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn to_description(&self) -> LatticeDescription {
        LatticeDescription {
            name: Some(self.name.clone()),
            elements: self.names.clone(),
            covers: self.covers().into_iter().map(|(a, b)| (self.names[a].clone(), self.names[b].clone())).collect(),
        }
    }
}

/// Serializable lattice description: element names and cover pairs `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDescription {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

impl LatticeDescription {
    pub fn build(&self) -> Result<FiniteLattice, LatticeError> {
        let index: BTreeMap<&str, Elem> = self.elements.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let lookup = |n: &str| index.get(n).copied().ok_or_else(|| LatticeError::UnknownElement(n.to_string()));
        let covers = self
            .covers
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, LatticeError>>()?;
        FiniteLattice::from_covers(self.name.as_deref().unwrap_or("custom"), self.elements.clone(), &covers)
    }
}

/// The built-in catalog, restricted to lattices with at most `max_size` elements.
pub fn catalog(max_size: usize) -> Vec<FiniteLattice> {
    let mut out: Vec<FiniteLattice> = (2..=5).map(FiniteLattice::chain).collect();
    out.push(FiniteLattice::boolean(2));
    out.push(FiniteLattice::boolean(3));
    out.push(FiniteLattice::m3());
    out.push(FiniteLattice::n5());
    out.retain(|l| l.size() <= max_size);
    out
}
