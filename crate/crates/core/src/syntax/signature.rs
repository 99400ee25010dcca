//! Connective signatures and their tense expansion.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Monotonicity of a single coordinate: `1` (order-preserving) or `∂` (order-reversing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "1")]
    Pos,
    #[serde(rename = "d")]
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarity::Pos => '1',
            Polarity::Neg => 'd',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct OrderType(pub Vec<Polarity>);

impl OrderType {
    pub fn new(entries: Vec<Polarity>) -> Self {
        OrderType(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Polarity {
        self.0[i]
    }

    pub fn opposite(&self) -> Self {
        OrderType(self.0.iter().map(|p| p.flip()).collect())
    }

    /// Parses `(1, d)`, `(1d)` or `1,d`; `∂` is accepted for `d`.
    pub fn parse(text: &str) -> Result<Self, SignatureError> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let mut entries = Vec::new();
        for ch in inner.chars() {
            match ch {
                '1' => entries.push(Polarity::Pos),
                'd' | '∂' => entries.push(Polarity::Neg),
                ',' | ' ' | '\t' => {}
                other => return Err(SignatureError::BadOrderType(format!("unexpected `{other}` in `{text}`"))),
            }
        }
        Ok(OrderType(entries))
    }
}

impl fmt::Display for OrderType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", p.symbol())?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    F,
    G,
}

impl Family {
    pub fn dual(self) -> Self {
        match self {
            Family::F => Family::G,
            Family::G => Family::F,
        }
    }
}

/// Where a connective comes from: the base signature, or as the residual of a
/// base connective in one coordinate (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    Base,
    Residual { parent: String, coordinate: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Connective {
    pub name: String,
    pub family: Family,
    pub order_type: OrderType,
    pub origin: Origin,
}

impl Connective {
    pub fn base(name: impl Into<String>, family: Family, order_type: OrderType) -> Self {
        Connective { name: name.into(), family, order_type, origin: Origin::Base }
    }

    pub fn arity(&self) -> usize {
        self.order_type.len()
    }

    pub fn is_residual(&self) -> bool {
        matches!(self.origin, Origin::Residual { .. })
    }

    pub fn polarity(&self, coordinate: usize) -> Polarity {
        self.order_type.get(coordinate)
    }
}

pub type ConnRef = Arc<Connective>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate connective name `{0}`")]
    Duplicate(String),
    #[error("connective `{name}` declares arity {arity} but order-type has length {len}")]
    LengthMismatch { name: String, arity: usize, len: usize },
    #[error("signature is already tense-expanded")]
    AlreadyExpanded,
    #[error("residual name `{0}` collides with an existing connective")]
    ResidualCollision(String),
    #[error("malformed order-type: {0}")]
    BadOrderType(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid connective name `{0}`")]
    BadName(String),
}

/// A declaration row: `(name, family, arity, order_type)`.
pub type Declaration = (String, Family, usize, OrderType);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    base_f: Vec<ConnRef>,
    base_g: Vec<ConnRef>,
    residuals: Vec<ConnRef>,
    index: BTreeMap<String, ConnRef>,
}

impl Signature {
    pub fn declare(declarations: &[Declaration]) -> Result<Self, SignatureError> {
        let mut sig = Signature::default();
        for (name, family, arity, order_type) in declarations {
            if !valid_name(name) {
                return Err(SignatureError::BadName(name.clone()));
            }
            if order_type.len() != *arity {
                return Err(SignatureError::LengthMismatch {
                    name: name.clone(),
                    arity: *arity,
                    len: order_type.len(),
                });
            }
            if sig.index.contains_key(name) {
                return Err(SignatureError::Duplicate(name.clone()));
            }
            let conn = Arc::new(Connective::base(name.clone(), *family, order_type.clone()));
            match family {
                Family::F => sig.base_f.push(conn.clone()),
                Family::G => sig.base_g.push(conn.clone()),
            }
            sig.index.insert(name.clone(), conn);
        }
        Ok(sig)
    }

    /// One unary F-connective `f` and one unary G-connective `g`, both monotone.
    pub fn default_unary() -> Self {
        Signature::declare(&[
            ("f".into(), Family::F, 1, OrderType(vec![Polarity::Pos])),
            ("g".into(), Family::G, 1, OrderType(vec![Polarity::Pos])),
        ])
        .expect("default signature is well-formed")
    }

    /// Parses the line-oriented signature format
    /// `connective <name> : <F|G> / <arity> / (<1|d>...);`.
    pub fn parse_file(text: &str) -> Result<Self, SignatureError> {
        let mut decls = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| SignatureError::Syntax { line: lineno + 1, message: message.to_string() };
            let body = line
                .strip_prefix("connective")
                .ok_or_else(|| err("expected `connective`"))?
                .trim()
                .strip_suffix(';')
                .ok_or_else(|| err("missing `;`"))?;
            let (name, rest) = body.split_once(':').ok_or_else(|| err("missing `:`"))?;
            let parts: Vec<&str> = rest.split('/').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(err("expected `<F|G> / <arity> / (<order-type>)`"));
            }
            let family = match parts[0] {
                "F" => Family::F,
                "G" => Family::G,
                _ => return Err(err("family must be F or G")),
            };
            let arity: usize = parts[1].parse().map_err(|_| err("arity must be a natural number"))?;
            let order_type = OrderType::parse(parts[2])?;
            decls.push((name.trim().to_string(), family, arity, order_type));
        }
        Signature::declare(&decls)
    }

    /// Adds one residual per coordinate of every base connective.
    pub fn expand_tense(&self) -> Result<Self, SignatureError> {
        if self.is_expanded() {
            return Err(SignatureError::AlreadyExpanded);
        }
        let mut out = self.clone();
        for base in self.base_f.iter().chain(self.base_g.iter()) {
            for i in 0..base.arity() {
                let res = residual_of(base, i);
                if out.index.contains_key(&res.name) {
                    return Err(SignatureError::ResidualCollision(res.name));
                }
                let res = Arc::new(res);
                out.index.insert(res.name.clone(), res.clone());
                out.residuals.push(res);
            }
        }
        Ok(out)
    }

    /// Expands if not yet expanded.
    pub fn tense(&self) -> Result<Self, SignatureError> {
        if self.is_expanded() || self.base_count() == 0 || self.expected_residuals() == 0 {
            Ok(self.clone())
        } else {
            self.expand_tense()
        }
    }

    pub fn is_expanded(&self) -> bool {
        !self.residuals.is_empty()
    }

    fn base_count(&self) -> usize {
        self.base_f.len() + self.base_g.len()
    }

    fn expected_residuals(&self) -> usize {
        self.base().map(|c| c.arity()).sum()
    }

    pub fn base_f(&self) -> &[ConnRef] {
        &self.base_f
    }

    pub fn base_g(&self) -> &[ConnRef] {
        &self.base_g
    }

    pub fn residuals(&self) -> &[ConnRef] {
        &self.residuals
    }

    pub fn base(&self) -> impl Iterator<Item = &ConnRef> {
        self.base_f.iter().chain(self.base_g.iter())
    }

    pub fn all(&self) -> impl Iterator<Item = &ConnRef> {
        self.index.values()
    }

    pub fn get(&self, name: &str) -> Option<&ConnRef> {
        self.index.get(name)
    }

    /// The residual of `parent` in `coordinate` (0-based), if present.
    pub fn residual(&self, parent: &str, coordinate: usize) -> Option<&ConnRef> {
        let conn = self.index.get(parent)?;
        self.index.get(&residual_name(conn, coordinate))
    }

    /// Renders the signature in the line-oriented file format (base connectives only).
    pub fn to_file(&self) -> String {
        let mut out = String::new();
        for c in self.base() {
            let fam = match c.family {
                Family::F => "F",
                Family::G => "G",
            };
            let ot: String = c.order_type.0.iter().map(|p| p.symbol()).collect();
            out.push_str(&format!("connective {} : {} / {} / ({});\n", c.name, fam, c.arity(), ot));
        }
        out
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "bot" | "top" | "mu" | "nu" | "mu2" | "nu2")
}

/// Residual names: `f#<i>` for F-connectives, `gb<i>` for G-connectives (1-based index).
pub fn residual_name(base: &Connective, coordinate: usize) -> String {
    match base.family {
        Family::F => format!("{}#{}", base.name, coordinate + 1),
        Family::G => format!("{}b{}", base.name, coordinate + 1),
    }
}

/// Family and order-type of the residual of `base` at `coordinate`.
pub fn residual_of(base: &Connective, coordinate: usize) -> Connective {
    let own = base.polarity(coordinate);
    let family = match own {
        Polarity::Pos => base.family.dual(),
        Polarity::Neg => base.family,
    };
    let entries = base
        .order_type
        .0
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            if j == coordinate {
                own
            } else if own == Polarity::Pos {
                p.flip()
            } else {
                p
            }
        })
        .collect();
    Connective {
        name: residual_name(base, coordinate),
        family,
        order_type: OrderType(entries),
        origin: Origin::Residual { parent: base.name.clone(), coordinate },
    }
}
