use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::lattice::{Elem, FiniteLattice, LatticeError};
use crate::syntax::{residual_name, ConnRef, Family, Polarity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("table for `{name}` has {found} entries, expected {expected}")]
    TableSize { name: String, expected: usize, found: usize },
    #[error("`{name}` violates normality in coordinate {coordinate}: {witness}")]
    Normality { name: String, coordinate: usize, witness: String },
    #[error("`{0}` is a residual; attach its base connective instead")]
    Residual(String),
    #[error("operation `{0}` is attached twice")]
    Duplicate(String),
    #[error("no table for connective `{0}`")]
    MissingOperation(String),
    #[error("algebra file: {0}")]
    File(String),
}

/// A flat row-major operation table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpTable {
    pub arity: usize,
    pub values: Vec<Elem>,
}

impl OpTable {
    pub fn index(n: usize, args: &[Elem]) -> usize {
        args.iter().fold(0, |acc, &a| acc * n + a)
    }

    pub fn get(&self, n: usize, args: &[Elem]) -> Elem {
        self.values[Self::index(n, args)]
    }
}

/// Every tuple of length `arity` over `0..n`, in row-major order.
pub fn tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = n.pow(arity as u32);
    (0..total).map(move |mut k| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = k % n;
            k /= n;
        }
        t
    })
}

/// A finite normal lattice expansion together with the residual tables of its operations.
#[derive(Debug, Clone)]
pub struct FiniteLE {
    pub name: String,
    lattice: Arc<FiniteLattice>,
    connectives: Vec<ConnRef>,
    tables: BTreeMap<String, OpTable>,
}

impl FiniteLE {
    pub fn new(lattice: Arc<FiniteLattice>) -> Self {
        FiniteLE { name: lattice.name().to_string(), lattice, connectives: Vec::new(), tables: BTreeMap::new() }
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    /// Base connectives with attached tables.
    pub fn connectives(&self) -> &[ConnRef] {
        &self.connectives
    }

    pub fn table(&self, name: &str) -> Option<&OpTable> {
        self.tables.get(name)
    }

    pub fn apply(&self, name: &str, args: &[Elem]) -> Option<Elem> {
        self.tables.get(name).map(|t| t.get(self.lattice.size(), args))
    }

    /// Attaches a base operation after an exhaustive normality check, and
    /// computes the residual table of every coordinate.
    pub fn attach_operation(&mut self, conn: ConnRef, values: Vec<Elem>) -> Result<(), AlgebraError> {
        if conn.is_residual() {
            return Err(AlgebraError::Residual(conn.name.clone()));
        }
        if self.tables.contains_key(&conn.name) {
            return Err(AlgebraError::Duplicate(conn.name.clone()));
        }
        let n = self.lattice.size();
        let arity = conn.arity();
        let expected = n.pow(arity as u32);
        if values.len() != expected || values.iter().any(|&v| v >= n) {
            return Err(AlgebraError::TableSize { name: conn.name.clone(), expected, found: values.len() });
        }
        let table = OpTable { arity, values };
        check_normal(&self.lattice, &conn, &table)?;
        for i in 0..arity {
            let res = residual_table(&self.lattice, &conn, &table, i);
            self.tables.insert(residual_name(&conn, i), res);
        }
        self.tables.insert(conn.name.clone(), table);
        self.connectives.push(conn);
        Ok(())
    }

    /// Whether every base connective in `conns` has a table.
    pub fn covers_signature<'a>(&self, conns: impl IntoIterator<Item = &'a ConnRef>) -> Result<(), AlgebraError> {
        for c in conns {
            if !self.tables.contains_key(&c.name) {
                return Err(AlgebraError::MissingOperation(c.name.clone()));
            }
        }
        Ok(())
    }

    /// Exhaustive check of the residuation equivalences for every attached operation.
    pub fn check_adjunctions(&self) -> Result<(), String> {
        let l = &*self.lattice;
        let n = l.size();
        for conn in &self.connectives {
            let table = &self.tables[&conn.name];
            for i in 0..conn.arity() {
                let res = &self.tables[&residual_name(conn, i)];
                for args in tuples(n, conn.arity()) {
                    for b in l.elements() {
                        let mut rargs = args.clone();
                        rargs[i] = b;
                        let a = args[i];
                        let fa = table.get(n, &args);
                        let r = res.get(n, &rargs);
                        let ok = match (conn.family, conn.polarity(i)) {
                            (Family::F, Polarity::Pos) => l.leq(fa, b) == l.leq(a, r),
                            (Family::F, Polarity::Neg) => l.leq(fa, b) == l.leq(r, a),
                            (Family::G, Polarity::Pos) => l.leq(b, fa) == l.leq(r, a),
                            (Family::G, Polarity::Neg) => l.leq(b, fa) == l.leq(a, r),
                        };
                        if !ok {
                            return Err(format!("{} coordinate {} at {:?}, b = {}", conn.name, i + 1, args, b));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Coordinatewise monotonicity per order-type, checked on the tables directly.
    pub fn check_monotone(&self) -> Result<(), String> {
        let l = &*self.lattice;
        let n = l.size();
        for conn in &self.connectives {
            let table = &self.tables[&conn.name];
            for i in 0..conn.arity() {
                for args in tuples(n, conn.arity()) {
                    for b in l.elements() {
                        if !l.leq(args[i], b) {
                            continue;
                        }
                        let mut up = args.clone();
                        up[i] = b;
                        let (x, y) = (table.get(n, &args), table.get(n, &up));
                        let ok = match conn.polarity(i) {
                            Polarity::Pos => l.leq(x, y),
                            Polarity::Neg => l.leq(y, x),
                        };
                        if !ok {
                            return Err(format!("{} coordinate {} at {:?}", conn.name, i + 1, args));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// A compact identifier of the operation tables, for de-duplication.
    pub fn fingerprint(&self) -> Vec<(String, Vec<Elem>)> {
        self.connectives.iter().map(|c| (c.name.clone(), self.tables[&c.name].values.clone())).collect()
    }
}

/// Normality: F preserves finite joins (including the empty one) at `1`
/// coordinates and turns finite meets into joins at `∂` coordinates; G dually.
pub fn check_normal(l: &FiniteLattice, conn: &ConnRef, table: &OpTable) -> Result<(), AlgebraError> {
    let n = l.size();
    for i in 0..conn.arity() {
        let (unit, combine_in): (Elem, fn(&FiniteLattice, Elem, Elem) -> Elem) = match (conn.family, conn.polarity(i)) {
            (Family::F, Polarity::Pos) | (Family::G, Polarity::Neg) => (l.bot(), FiniteLattice::join),
            (Family::F, Polarity::Neg) | (Family::G, Polarity::Pos) => (l.top(), FiniteLattice::meet),
        };
        let (target_unit, combine_out): (Elem, fn(&FiniteLattice, Elem, Elem) -> Elem) = match conn.family {
            Family::F => (l.bot(), FiniteLattice::join),
            Family::G => (l.top(), FiniteLattice::meet),
        };
        let violation = |witness: String| AlgebraError::Normality { name: conn.name.clone(), coordinate: i + 1, witness };
        for args in tuples(n, conn.arity()) {
            if args[i] != 0 {
                continue;
            }
            let mut at = args.clone();
            at[i] = unit;
            if table.get(n, &at) != target_unit {
                return Err(violation(format!("empty case fails at {:?}", at)));
            }
            for a in l.elements() {
                for b in l.elements() {
                    let (mut x, mut y, mut z) = (args.clone(), args.clone(), args.clone());
                    x[i] = a;
                    y[i] = b;
                    z[i] = combine_in(l, a, b);
                    let lhs = table.get(n, &z);
                    let rhs = combine_out(l, table.get(n, &x), table.get(n, &y));
                    if lhs != rhs {
                        return Err(violation(format!("binary case fails at {:?} / {:?}", x, y)));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The residual of `table` in coordinate `i`, computed by exhaustive adjunction.
pub fn residual_table(l: &FiniteLattice, conn: &ConnRef, table: &OpTable, i: usize) -> OpTable {
    let n = l.size();
    let values = tuples(n, conn.arity())
        .map(|rargs| {
            let b = rargs[i];
            let candidates = l.elements().filter(|&x| {
                let mut args = rargs.clone();
                args[i] = x;
                let v = table.get(n, &args);
                match conn.family {
                    Family::F => l.leq(v, b),
                    Family::G => l.leq(b, v),
                }
            });
            let r = match (conn.family, conn.polarity(i)) {
                (Family::F, Polarity::Pos) | (Family::G, Polarity::Neg) => l.join_all(candidates),
                (Family::F, Polarity::Neg) | (Family::G, Polarity::Pos) => l.meet_all(candidates),
            };
            let mut args = rargs.clone();
            args[i] = r;
            let v = table.get(n, &args);
            assert!(
                match conn.family {
                    Family::F => l.leq(v, b),
                    Family::G => l.leq(b, v),
                },
                "residual of a normal operation must exist"
            );
            r
        })
        .collect();
    OpTable { arity: conn.arity(), values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Signature;

    fn unary() -> (ConnRef, ConnRef) {
        let s = Signature::default_unary();
        (s.get("f").unwrap().clone(), s.get("g").unwrap().clone())
    }

    #[test]
    fn identity_is_normal_and_self_residual() {
        let (f, g) = unary();
        for l in super::super::lattice::catalog(8) {
            let l = Arc::new(l);
            let id: Vec<Elem> = l.elements().collect();
            let mut le = FiniteLE::new(l.clone());
            le.attach_operation(f.clone(), id.clone()).unwrap();
            le.attach_operation(g.clone(), id.clone()).unwrap();
            assert_eq!(le.table("f#1").unwrap().values, id);
            assert_eq!(le.table("gb1").unwrap().values, id);
            le.check_adjunctions().unwrap();
        }
    }

    #[test]
    fn f_of_bottom_must_be_bottom() {
        let (f, _) = unary();
        let mut le = FiniteLE::new(Arc::new(FiniteLattice::chain(3)));
        let err = le.attach_operation(f, vec![1, 1, 2]).unwrap_err();
        assert!(matches!(err, AlgebraError::Normality { coordinate: 1, .. }));
    }

    #[test]
    fn meet_with_atom_is_not_join_preserving_on_m3() {
        let (f, _) = unary();
        let l = Arc::new(FiniteLattice::m3());
        let table: Vec<Elem> = l.elements().map(|x| l.meet(x, 1)).collect();
        assert!(FiniteLE::new(l).attach_operation(f, table).is_err());
    }

    #[test]
    fn binary_antitone_residuals() {
        let sig = Signature::declare(&[
            ("h".into(), Family::F, 2, crate::syntax::OrderType::parse("(1,d)").unwrap()),
            ("k".into(), Family::G, 2, crate::syntax::OrderType::parse("(d,1)").unwrap()),
        ])
        .unwrap();
        let l = Arc::new(FiniteLattice::boolean(2));
        let n = l.size();
        // h(x, y) = x ∧ ¬y, k(x, y) = ¬x ∨ y
        let h: Vec<Elem> = tuples(n, 2).map(|t| t[0] & !t[1] & 3).collect();
        let k: Vec<Elem> = tuples(n, 2).map(|t| (!t[0] & 3) | t[1]).collect();
        let mut le = FiniteLE::new(l);
        le.attach_operation(sig.get("h").unwrap().clone(), h).unwrap();
        le.attach_operation(sig.get("k").unwrap().clone(), k).unwrap();
        le.check_adjunctions().unwrap();
        le.check_monotone().unwrap();
    }
}
