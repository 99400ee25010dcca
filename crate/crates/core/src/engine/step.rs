use std::fmt;

use serde::{Deserialize, Serialize};

use super::system::System;
use crate::syntax::{Inequality, Path, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "elim_monotone")]
    ElimMonotone,
    #[serde(rename = "distribute")]
    Distribute,
    #[serde(rename = "split")]
    Split,
    #[serde(rename = "star")]
    Star,
    #[serde(rename = "approx_L+")]
    ApproxLPlus,
    #[serde(rename = "approx_L-")]
    ApproxLMinus,
    #[serde(rename = "approx_R+")]
    ApproxRPlus,
    #[serde(rename = "approx_R-")]
    ApproxRMinus,
    #[serde(rename = "residuate")]
    Residuate,
    #[serde(rename = "ackermann_RA")]
    AckermannRA,
    #[serde(rename = "ackermann_LA")]
    AckermannLA,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::ElimMonotone => "elim_monotone",
            Rule::Distribute => "distribute",
            Rule::Split => "split",
            Rule::Star => "star",
            Rule::ApproxLPlus => "approx_L+",
            Rule::ApproxLMinus => "approx_L-",
            Rule::ApproxRPlus => "approx_R+",
            Rule::ApproxRMinus => "approx_R-",
            Rule::Residuate => "residuate",
            Rule::AckermannRA => "ackermann_RA",
            Rule::AckermannLA => "ackermann_LA",
        }
    }

    pub fn is_approximation(self) -> bool {
        matches!(self, Rule::ApproxLPlus | Rule::ApproxLMinus | Rule::ApproxRPlus | Rule::ApproxRMinus)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

impl Side {
    pub fn of(self, ineq: &Inequality) -> &Term {
        match self {
            Side::Lhs => &ineq.lhs,
            Side::Rhs => &ineq.rhs,
        }
    }

    pub fn of_mut(self, ineq: &mut Inequality) -> &mut Term {
        match self {
            Side::Lhs => &mut ineq.lhs,
            Side::Rhs => &mut ineq.rhs,
        }
    }
}

/// Where a rule fired. In preprocessing `index` selects an inequality of the
/// working list; in the reduction stage it selects a member of `S`, and nodes
/// (without an index) live in the goal inequality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Position {
    Letter {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
        letter: String,
    },
    Node {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
        side: Side,
        path: Path,
    },
    Item {
        index: usize,
    },
    Coordinate {
        index: usize,
        side: Side,
        coordinate: usize,
    },
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = |i: &Option<usize>| i.map(|i| format!("#{i} ")).unwrap_or_default();
        match self {
            Position::Letter { index, letter } => write!(f, "{}{letter}", idx(index)),
            Position::Node { index, side, path } => write!(f, "{}{side:?}{path:?}", idx(index)),
            Position::Item { index } => write!(f, "#{index}"),
            Position::Coordinate { index, side, coordinate } => write!(f, "#{index} {side:?}.{}", coordinate + 1),
        }
    }
}

/// One rule instance. Preprocessing steps act on lists of inequalities, encoded
/// as systems with empty `S`; reduction steps act on a single system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub rule: Rule,
    pub position: Position,
    pub before: Vec<System>,
    pub after: Vec<System>,
}
