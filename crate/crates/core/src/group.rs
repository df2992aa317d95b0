//! Finite groups as validated multiplication tables.

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Law, Result};
use crate::perm::{schreier_sims, Permutation};

/// Index of a group element; `0` is always the identity.
pub type Elem = usize;

pub const IDENTITY: Elem = 0;

/// Default cap on the order of any group built as a table.
pub const DEFAULT_MAX_ORDER: usize = 4096;

/// Orders up to this size get an exhaustive associativity check.
pub const EXHAUSTIVE_ASSOC_LIMIT: usize = 256;

const ASSOC_SPOT_CHECK_SEED: u64 = 0x6e69_6c70_726f_6221;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssocCheck {
    /// Exhaustive up to [`EXHAUSTIVE_ASSOC_LIMIT`], `10·n²` random triples above.
    #[default]
    Auto,
    Exhaustive,
}

/// A finite group given by its Cayley table.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    label: String,
}

impl std::fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupTable").field("label", &self.label).field("order", &self.order).finish()
    }
}

impl GroupTable {
    /// Validates `mul` (row-major, `n × n`) as a group with identity `0`.
    pub fn from_table(n: usize, mul: Vec<Vec<usize>>, label: impl Into<String>) -> Result<Self> {
        Self::from_table_with(n, mul, label, AssocCheck::Auto)
    }

    pub fn from_table_with(
        n: usize,
        mul: Vec<Vec<usize>>,
        label: impl Into<String>,
        assoc: AssocCheck,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedTable("order must be at least 1".into()));
        }
        if mul.len() != n || mul.iter().any(|row| row.len() != n) {
            return Err(Error::MalformedTable(format!("table is not {n}×{n}")));
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &mul {
            for &x in row {
                if x >= n {
                    return Err(Error::MalformedTable(format!("entry {x} out of range 0..{n}")));
                }
                flat.push(x as u32);
            }
        }
        let at = |a: usize, b: usize| flat[a * n + b] as usize;

        for g in 0..n {
            if at(0, g) != g || at(g, 0) != g {
                return Err(Error::NotAGroup { law: Law::Identity, witness: (0, g, 0) });
            }
        }
        let mut inv = vec![0u32; n];
        for (g, slot) in inv.iter_mut().enumerate() {
            match (0..n).find(|&h| at(g, h) == 0 && at(h, g) == 0) {
                Some(h) => *slot = h as u32,
                None => return Err(Error::NotAGroup { law: Law::Inverse, witness: (g, 0, 0) }),
            }
        }
        let assoc_fails = |a: usize, b: usize, c: usize| at(at(a, b), c) != at(a, at(b, c));
        if n <= EXHAUSTIVE_ASSOC_LIMIT || assoc == AssocCheck::Exhaustive {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if assoc_fails(a, b, c) {
                            return Err(Error::NotAGroup { law: Law::Associativity, witness: (a, b, c) });
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(ASSOC_SPOT_CHECK_SEED);
            for _ in 0..10 * n * n {
                let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                if assoc_fails(a, b, c) {
                    return Err(Error::NotAGroup { law: Law::Associativity, witness: (a, b, c) });
                }
            }
        }
        Ok(GroupTable { order: n, mul: flat, inv, label: label.into() })
    }

    /// Table from a closure known to be a group law with identity `0`.
    pub(crate) fn from_trusted(n: usize, label: String, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut mul = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                mul.push(f(a, b) as u32);
            }
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            if inv[a] != 0 || a == 0 {
                continue;
            }
            let b = (0..n).find(|&b| mul[a * n + b] == 0).expect("group element has an inverse");
            inv[a] = b as u32;
            inv[b] = a as u32;
        }
        GroupTable { order: n, mul, inv, label }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a] as usize
    }

    /// `a⁻¹ b⁻¹ a b`.
    #[inline]
    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    /// `g⁻¹ x g`.
    #[inline]
    pub fn conjugate(&self, x: Elem, g: Elem) -> Elem {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(|r| r.iter().map(|&x| x as usize).collect()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, g: Elem) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != IDENTITY {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Map from element order to number of elements of that order.
    pub fn order_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for g in self.elements() {
            *census.entry(self.element_order(g)).or_insert(0) += 1;
        }
        census
    }

    /// SHA-256 of the order and table; the key for cached results.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.order as u64).to_le_bytes());
        for &x in &self.mul {
            h.update(x.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Validates a table. See [`GroupTable::from_table`].
pub fn build_from_table(n: usize, mul: Vec<Vec<usize>>, label: &str) -> Result<GroupTable> {
    GroupTable::from_table(n, mul, label)
}

/// Enumerates the group generated by `gens` and returns its Cayley table.
///
/// Elements are sorted by their image arrays, so the identity is index 0.
/// The product `a·b` is "apply `a`, then `b`".
pub fn build_from_perm_gens(gens: &[Permutation], label: &str, max_order: usize) -> Result<GroupTable> {
    Ok(perm_group_elements(gens, label, max_order)?.0)
}

/// As [`build_from_perm_gens`], also returning the sorted element list.
pub fn perm_group_elements(
    gens: &[Permutation],
    label: &str,
    max_order: usize,
) -> Result<(GroupTable, Vec<Permutation>)> {
    let bsgs = schreier_sims(gens)?;
    let order = bsgs.order().to_u128().unwrap_or(u128::MAX);
    if order > max_order as u128 {
        return Err(Error::OrderExceeded { order_lower_bound: order, cap: max_order });
    }
    let degree = bsgs.degree();
    let gens: Vec<&Permutation> = gens.iter().filter(|g| !g.is_identity()).collect();

    // Breadth-first closure, remembering how each element was reached.
    let mut found: Vec<Permutation> = vec![Permutation::identity(degree)];
    let mut parent: Vec<(usize, usize)> = vec![(0, 0)];
    let mut index: HashMap<Permutation, usize> = HashMap::new();
    index.insert(found[0].clone(), 0);
    let mut i = 0;
    while i < found.len() {
        for (j, s) in gens.iter().enumerate() {
            let q = found[i].then(s);
            if !index.contains_key(&q) {
                index.insert(q.clone(), found.len());
                found.push(q);
                parent.push((i, j));
            }
        }
        i += 1;
    }
    let n = found.len();
    debug_assert_eq!(n as u128, order);

    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| found[a].cmp(&found[b]));
    let mut rank = vec![0usize; n];
    for (r, &d) in sorted.iter().enumerate() {
        rank[d] = r;
    }

    // right[a][j] = a·gens[j], in discovery indices
    let right: Vec<Vec<usize>> = found
        .iter()
        .map(|p| gens.iter().map(|s| index[&p.then(s)]).collect())
        .collect();

    // mul[a][b] over discovery indices, filled column by column in BFS order.
    let mut table = vec![0usize; n * n];
    for a in 0..n {
        table[a * n] = a;
    }
    for b in 1..n {
        let (p, j) = parent[b];
        for a in 0..n {
            table[a * n + b] = right[table[a * n + p]][j];
        }
    }
    let group = GroupTable::from_trusted(n, label.to_string(), |a, b| {
        rank[table[sorted[a] * n + sorted[b]]]
    });
    let elems = sorted.into_iter().map(|d| found[d].clone()).collect();
    Ok((group, elems))
}

/// `a × b`, with `(g, h)` at index `g·|b| + h`.
pub fn direct_product(a: &GroupTable, b: &GroupTable) -> Result<GroupTable> {
    direct_product_capped(a, b, DEFAULT_MAX_ORDER)
}

pub fn direct_product_capped(a: &GroupTable, b: &GroupTable, max_order: usize) -> Result<GroupTable> {
    let n = a.order() as u128 * b.order() as u128;
    if n > max_order as u128 {
        return Err(Error::OrderExceeded { order_lower_bound: n, cap: max_order });
    }
    let m = b.order();
    let label = format!("{}x{}", a.label(), b.label());
    Ok(GroupTable::from_trusted(n as usize, label, |x, y| {
        a.mul(x / m, y / m) * m + b.mul(x % m, y % m)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3_gens() -> Vec<Permutation> {
        vec![
            Permutation::from_cycles(3, &[&[0, 1]]).unwrap(),
            Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap(),
        ]
    }

    #[test]
    fn trivial_and_c2_tables() {
        let t = build_from_table(1, vec![vec![0]], "C(1)").unwrap();
        assert_eq!(t.order(), 1);
        let c2 = build_from_table(2, vec![vec![0, 1], vec![1, 0]], "C(2)").unwrap();
        assert_eq!(c2.inv(1), 1);
    }

    #[test]
    fn rejects_non_associative_table() {
        let err = build_from_table(3, vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]], "bad").unwrap_err();
        match err {
            Error::NotAGroup { law: Law::Associativity, witness: (a, b, c) } => {
                let m = [[0, 1, 2], [1, 0, 2], [2, 2, 0]];
                assert_ne!(m[m[a][b]][c], m[a][m[b][c]]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_identity_and_inverse_failures() {
        let e = build_from_table(2, vec![vec![1, 0], vec![0, 1]], "x").unwrap_err();
        assert!(matches!(e, Error::NotAGroup { law: Law::Identity, .. }));
        let e = build_from_table(2, vec![vec![0, 1], vec![1, 1]], "x").unwrap_err();
        assert!(matches!(e, Error::NotAGroup { law: Law::Inverse, .. }));
        assert!(build_from_table(2, vec![vec![0, 1], vec![1, 2]], "x").is_err());
        assert!(build_from_table(2, vec![vec![0, 1]], "x").is_err());
    }

    #[test]
    fn perm_closure_orders() {
        let c2 = build_from_perm_gens(&[Permutation::from_cycles(2, &[&[0, 1]]).unwrap()], "C2", 100).unwrap();
        assert_eq!(c2.order(), 2);
        let s3 = build_from_perm_gens(&s3_gens(), "S3", 100).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        let c5 = Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        assert!(matches!(
            build_from_perm_gens(&[c5], "C5", 4),
            Err(Error::OrderExceeded { order_lower_bound: 5, .. })
        ));
    }

    #[test]
    fn perm_table_matches_composition() {
        let (g, elems) = perm_group_elements(&s3_gens(), "S3", 100).unwrap();
        assert!(elems.windows(2).all(|w| w[0] < w[1]));
        assert!(elems[0].is_identity());
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(elems[g.mul(a, b)], elems[a].then(&elems[b]));
            }
        }
        // the closure table passes full validation
        GroupTable::from_table(g.order(), g.rows(), "S3").unwrap();
    }

    #[test]
    fn products() {
        let c2 = build_from_table(2, vec![vec![0, 1], vec![1, 0]], "C(2)").unwrap();
        let v4 = direct_product(&c2, &c2).unwrap();
        assert_eq!(v4.order(), 4);
        assert!(v4.elements().all(|g| v4.inv(g) == g));
        let s3 = build_from_perm_gens(&s3_gens(), "S3", 100).unwrap();
        let trivial = build_from_table(1, vec![vec![0]], "C(1)").unwrap();
        assert_eq!(direct_product(&s3, &trivial).unwrap().rows(), s3.rows());
        assert_eq!(direct_product(&s3, &s3).unwrap().order(), 36);
        assert!(matches!(direct_product_capped(&s3, &s3, 30), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn big_tables_use_spot_checks() {
        let s3 = build_from_perm_gens(&s3_gens(), "S3", 100).unwrap();
        let big = direct_product(&direct_product(&s3, &s3).unwrap(), &s3).unwrap();
        assert_eq!(big.order(), 216);
        let c2 = build_from_table(2, vec![vec![0, 1], vec![1, 0]], "C(2)").unwrap();
        let bigger = direct_product(&big, &c2).unwrap();
        GroupTable::from_table(bigger.order(), bigger.rows(), "x").unwrap();
        GroupTable::from_table_with(bigger.order(), bigger.rows(), "x", AssocCheck::Exhaustive).unwrap();
    }
}
