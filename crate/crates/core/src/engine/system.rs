use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{Inequality, QuasiInequality, Term};

/// A pair `(S, ineq)` standing for the quasi-inequality `&S => ineq`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct System {
    pub s: Vec<Inequality>,
    pub ineq: Inequality,
}

impl System {
    pub fn new(ineq: Inequality) -> Self {
        System { s: Vec::new(), ineq }
    }

    pub fn members(&self) -> impl Iterator<Item = &Inequality> {
        self.s.iter().chain(std::iter::once(&self.ineq))
    }

    pub fn is_pure(&self) -> bool {
        self.members().all(|i| !i.has_letters())
    }

    pub fn letters(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for i in self.members() {
            for p in i.letters() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    pub fn nominals(&self) -> BTreeSet<u32> {
        self.members().flat_map(|i| i.nominals()).collect()
    }

    pub fn conominals(&self) -> BTreeSet<u32> {
        self.members().flat_map(|i| i.conominals()).collect()
    }

    /// The first nominal not occurring in the system.
    pub fn fresh_nominal(&self) -> Term {
        let used = self.nominals();
        Term::Nom((1..).find(|k| !used.contains(k)).expect("unbounded"))
    }

    pub fn fresh_conominal(&self) -> Term {
        let used = self.conominals();
        Term::CoNom((1..).find(|k| !used.contains(k)).expect("unbounded"))
    }

    pub fn to_quasi(&self) -> QuasiInequality {
        QuasiInequality::new(self.s.clone(), self.ineq.clone())
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_quasi())
    }
}

/// Printed form used in traces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemText(pub String);

impl From<&System> for SystemText {
    fn from(s: &System) -> Self {
        SystemText(s.to_string())
    }
}
