//! The oracle corpus: catalog lattices equipped with canned and random normal operations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lattice::{catalog, Elem, FiniteLattice, LatticeDescription};
use super::le::{check_normal, tuples, AlgebraError, FiniteLE, OpTable};
use crate::syntax::{ConnRef, Connective, Family, OrderType, Polarity, Signature};

pub const DEFAULT_SEED: u64 = 0x5eed_a1ba;

/// Seed from `ALBA_SEED`, or the built-in default.
pub fn seed_from_env() -> u64 {
    std::env::var("ALBA_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// A random operation that is normal on distributive lattices by construction:
/// values are drawn on tuples of irreducibles and extended by joins (F) or meets (G).
pub fn random_operation(l: &FiniteLattice, conn: &ConnRef, rng: &mut impl Rng) -> Vec<Elem> {
    let n = l.size();
    let arity = conn.arity();
    if arity == 0 {
        return vec![rng.gen_range(0..n)];
    }
    let ji = l.join_irreducibles();
    let mi = l.meet_irreducibles();
    // The generators in each coordinate, with the relation to the argument they must satisfy.
    let gens: Vec<(&[Elem], bool)> = (0..arity)
        .map(|i| match (conn.family, conn.polarity(i)) {
            (Family::F, Polarity::Pos) => (ji.as_slice(), true),
            (Family::F, Polarity::Neg) => (mi.as_slice(), false),
            (Family::G, Polarity::Pos) => (mi.as_slice(), false),
            (Family::G, Polarity::Neg) => (ji.as_slice(), true),
        })
        .collect();
    let mut base: BTreeMap<Vec<Elem>, Elem> = BTreeMap::new();
    let sizes: Vec<usize> = gens.iter().map(|(g, _)| g.len()).collect();
    let total: usize = sizes.iter().product();
    for mut k in 0..total {
        let mut t = vec![0; arity];
        for i in (0..arity).rev() {
            t[i] = gens[i].0[k % sizes[i]];
            k /= sizes[i];
        }
        base.insert(t, rng.gen_range(0..n));
    }
    tuples(n, arity)
        .map(|args| {
            let below = base.iter().filter(|(t, _)| {
                t.iter().zip(&args).zip(&gens).all(|((&g, &a), &(_, under))| if under { l.leq(g, a) } else { l.leq(a, g) })
            });
            match conn.family {
                Family::F => l.join_all(below.map(|(_, &v)| v)),
                Family::G => l.meet_all(below.map(|(_, &v)| v)),
            }
        })
        .collect()
}

/// A random normal operation of arity at least two, normal on every lattice:
/// a join (F) or meet (G) of unary normal maps in one coordinate, each gated by
/// threshold tests on the other coordinates.
pub fn gated_operation(l: &FiniteLattice, conn: &ConnRef, rng: &mut impl Rng) -> Vec<Elem> {
    let n = l.size();
    let arity = conn.arity();
    let parts: Vec<(usize, Vec<Elem>, Vec<Elem>)> = (0..rng.gen_range(1..=2))
        .map(|_| {
            let i = rng.gen_range(0..arity);
            let unary: ConnRef = Arc::new(Connective::base(
                conn.name.clone(),
                conn.family,
                OrderType(vec![conn.polarity(i)]),
            ));
            let u = (0..20)
                .map(|_| random_operation(l, &unary, rng))
                .find(|u| check_normal(l, &unary, &OpTable { arity: 1, values: u.clone() }).is_ok())
                .unwrap_or_else(|| canned_operations(l, &unary).swap_remove(0));
            let gates = (0..arity).map(|_| rng.gen_range(0..n)).collect();
            (i, u, gates)
        })
        .collect();
    tuples(n, arity)
        .map(|args| {
            let values = parts.iter().map(|(i, u, gates)| {
                let open = (0..arity).filter(|j| j != i).all(|j| {
                    let (x, d) = (args[j], gates[j]);
                    match (conn.family, conn.polarity(j)) {
                        (Family::F, Polarity::Pos) | (Family::G, Polarity::Neg) => !l.leq(x, d),
                        (Family::F, Polarity::Neg) | (Family::G, Polarity::Pos) => !l.leq(d, x),
                    }
                });
                match (open, conn.family) {
                    (true, _) => u[args[*i]],
                    (false, Family::F) => l.bot(),
                    (false, Family::G) => l.top(),
                }
            });
            match conn.family {
                Family::F => l.join_all(values),
                Family::G => l.meet_all(values),
            }
        })
        .collect()
}

/// Canned operations: identity when unary (and order-preserving), otherwise the
/// normal constant (⊥ for F, ⊤ for G).
pub fn canned_operations(l: &FiniteLattice, conn: &ConnRef) -> Vec<Vec<Elem>> {
    let n = l.size();
    let arity = conn.arity();
    let constant = match conn.family {
        Family::F => l.bot(),
        Family::G => l.top(),
    };
    let mut out = Vec::new();
    if arity == 1 && conn.polarity(0) == Polarity::Pos {
        out.push(l.elements().collect());
    }
    out.push(vec![constant; n.pow(arity as u32)]);
    if arity == 1 && conn.polarity(0) == Polarity::Pos {
        // x ∧ c for F and x ∨ c for G, where normal.
        for c in l.elements() {
            let t: Vec<Elem> = l
                .elements()
                .map(|x| match conn.family {
                    Family::F => l.meet(x, c),
                    Family::G => l.join(x, c),
                })
                .collect();
            out.push(t);
        }
    }
    out.retain(|t| check_normal(l, conn, &OpTable { arity, values: t.clone() }).is_ok());
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusConfig {
    pub max_size: usize,
    /// Operation sets per lattice.
    pub budget: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { max_size: 8, budget: 20, seed: seed_from_env() }
    }
}

/// Algebras over the catalog with every base connective of `sig` interpreted.
/// Per lattice: the canned operation set first, then random distinct normal sets
/// until `budget` is reached or the rejection sampler gives up.
pub fn enumerate_les(sig: &Signature, cfg: CorpusConfig) -> Vec<FiniteLE> {
    let conns: Vec<ConnRef> = sig.base().cloned().collect();
    let mut out = Vec::new();
    for (li, lattice) in catalog(cfg.max_size).into_iter().enumerate() {
        let lattice = Arc::new(lattice);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (li as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let canned: Vec<Vec<Vec<Elem>>> = conns.iter().map(|c| canned_operations(&lattice, c)).collect();
        let mut seen: BTreeSet<Vec<Vec<Elem>>> = BTreeSet::new();
        let mut attempts = 0;
        let mut k = 0;
        while seen.len() < cfg.budget && attempts < 40 * cfg.budget.max(1) {
            attempts += 1;
            let tables: Vec<Vec<Elem>> = conns
                .iter()
                .enumerate()
                .map(|(ci, c)| {
                    // Walk through the canned combinations first, then go random.
                    if k < 4 && !canned[ci].is_empty() && rng.gen_bool(0.5) {
                        canned[ci][rng.gen_range(0..canned[ci].len())].clone()
                    } else if k == 0 {
                        canned[ci].first().cloned().unwrap_or_else(|| random_operation(&lattice, c, &mut rng))
                    } else if c.arity() >= 2 && rng.gen_bool(0.5) {
                        gated_operation(&lattice, c, &mut rng)
                    } else {
                        random_operation(&lattice, c, &mut rng)
                    }
                })
                .collect();
            k += 1;
            if seen.contains(&tables) {
                continue;
            }
            let mut le = FiniteLE::new(lattice.clone());
            let ok = conns.iter().zip(&tables).all(|(c, t)| le.attach_operation(c.clone(), t.clone()).is_ok());
            if ok {
                le.name = format!("{}#{}", lattice.name(), seen.len());
                seen.insert(tables);
                out.push(le);
            }
        }
    }
    out
}

/// The JSON algebra file: elements, cover pairs and flat row-major tables of element names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    #[serde(flatten)]
    pub lattice: LatticeDescription,
    pub operations: BTreeMap<String, Vec<String>>,
}

impl AlgebraFile {
    pub fn from_le(le: &FiniteLE) -> Self {
        let l = le.lattice();
        let mut lattice = l.to_description();
        lattice.name = Some(le.name.clone());
        let operations = le
            .connectives()
            .iter()
            .map(|c| {
                let t = le.table(&c.name).expect("attached");
                (c.name.clone(), t.values.iter().map(|&e| l.element_name(e).to_string()).collect())
            })
            .collect();
        AlgebraFile { lattice, operations }
    }

    pub fn build(&self, sig: &Signature) -> Result<FiniteLE, AlgebraError> {
        let lattice = Arc::new(self.lattice.build()?);
        let mut le = FiniteLE::new(lattice.clone());
        if let Some(name) = &self.lattice.name {
            le.name = name.clone();
        }
        for (name, cells) in &self.operations {
            let conn = sig.get(name).ok_or_else(|| AlgebraError::File(format!("unknown connective `{name}`")))?;
            let values = cells
                .iter()
                .map(|c| lattice.index(c).ok_or_else(|| AlgebraError::File(format!("unknown element `{c}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            le.attach_operation(conn.clone(), values)?;
        }
        le.covers_signature(sig.base())?;
        Ok(le)
    }

    pub fn parse(text: &str, sig: &Signature) -> Result<FiniteLE, AlgebraError> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| AlgebraError::File(e.to_string()))?;
        file.build(sig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(budget: usize) -> CorpusConfig {
        CorpusConfig { max_size: 8, budget, seed: DEFAULT_SEED }
    }

    #[test]
    fn random_operations_on_distributive_lattices_are_normal() {
        let sig = Signature::declare(&[
            ("h".into(), Family::F, 2, crate::syntax::OrderType::parse("(1,d)").unwrap()),
            ("k".into(), Family::G, 2, crate::syntax::OrderType::parse("(1,1)").unwrap()),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for l in [FiniteLattice::chain(4), FiniteLattice::boolean(2)] {
            for c in sig.base() {
                for _ in 0..10 {
                    let t = random_operation(&l, c, &mut rng);
                    check_normal(&l, c, &OpTable { arity: 2, values: t }).unwrap();
                }
            }
        }
    }

    #[test]
    fn gated_operations_are_normal_everywhere() {
        let sig = Signature::declare(&[
            ("h".into(), Family::F, 2, crate::syntax::OrderType::parse("(1,d)").unwrap()),
            ("k".into(), Family::G, 3, crate::syntax::OrderType::parse("(d,1,1)").unwrap()),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for l in catalog(8) {
            for c in sig.base() {
                for _ in 0..10 {
                    let t = gated_operation(&l, c, &mut rng);
                    let table = OpTable { arity: c.arity(), values: t };
                    assert!(check_normal(&l, c, &table).is_ok(), "{} on {}", c.name, l.name());
                }
            }
        }
    }

    #[test]
    fn corpus_has_identity_on_two_chain() {
        let sig = Signature::default_unary();
        let les = enumerate_les(&sig, CorpusConfig { max_size: 2, ..cfg(20) });
        assert!(les.iter().any(|le| le.table("f").unwrap().values == [0, 1] && le.table("g").unwrap().values == [0, 1]));
        // Only four normal (f, g) pairs exist on the 2-chain.
        assert_eq!(les.len(), 4);
    }

    #[test]
    fn corpus_reaches_budget_on_larger_lattices() {
        let sig = Signature::default_unary();
        let les = enumerate_les(&sig, cfg(20));
        for name in ["chain3", "chain4", "chain5", "2^2", "2^3", "M3", "N5"] {
            let count = les.iter().filter(|le| le.lattice().name() == name).count();
            assert!(count >= 20, "{name}: {count}");
        }
        for le in &les {
            le.check_adjunctions().unwrap();
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let sig = Signature::default_unary();
        let a: Vec<_> = enumerate_les(&sig, cfg(10)).iter().map(|le| le.fingerprint()).collect();
        let b: Vec<_> = enumerate_les(&sig, cfg(10)).iter().map(|le| le.fingerprint()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn algebra_file_round_trip() {
        let sig = Signature::default_unary();
        for le in enumerate_les(&sig, cfg(2)) {
            let text = serde_json::to_string(&AlgebraFile::from_le(&le)).unwrap();
            let back = AlgebraFile::parse(&text, &sig).unwrap();
            assert_eq!(back.fingerprint(), le.fingerprint());
            assert_eq!(back.lattice().element_names(), le.lattice().element_names());
            assert_eq!(back.lattice().covers(), le.lattice().covers());
            assert_eq!(back.name, le.name);
        }
    }
}
