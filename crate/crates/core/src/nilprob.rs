//! Exact relative nilpotence probabilities.
//!
//! For a subgroup `H ≤ G` and shifts `x₁, …, x_{k+1} ∈ G`, `np(H; x)` is the
//! fraction of tuples `(y₁, …, y_{k+1}) ∈ H^{k+1}` whose left-normed
//! commutator `[x₁y₁, …, x_{k+1}y_{k+1}]` is trivial. A tuple of length one
//! (`k = 0`) counts `y` with `x₁y₁ = 1`.
//!
//! Two routes compute it: [`np_bruteforce`] walks every tuple, [`np_fast`]
//! propagates the distribution of partial commutators stage by stage.

use std::ops::{AddAssign, Mul};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Elem, GroupTable, IDENTITY};
use crate::par;
use crate::prob::ExactProb;
use crate::structure::{conjugacy_classes, SubgroupRef};

/// Work limits for the exact kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Cap on enumerated tuples (brute force) or DP operations (`k·|G|·|H|`).
    pub tuples: u128,
    /// Cap on shift tuples `[G:H]^{k+1}` in a supremum.
    pub shifts: u128,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { tuples: 1_000_000_000, shifts: 1_000_000 }
    }
}

/// Shifts `x₁, …, x_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShiftTuple(pub Vec<Elem>);

impl ShiftTuple {
    pub fn identity(len: usize) -> Self {
        ShiftTuple(vec![IDENTITY; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    Dp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpResult {
    pub value: ExactProb,
    pub method: Method,
    #[serde(with = "decimal")]
    pub counted: BigUint,
    #[serde(with = "decimal")]
    pub total: BigUint,
}

impl NpResult {
    fn new(counted: BigUint, total: BigUint, method: Method) -> Self {
        NpResult { value: ExactProb::from_counts(counted.clone(), total.clone()), method, counted, total }
    }
}

/// Big integers as decimal strings on the wire.
pub(crate) mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Counts `W_m(g)` of stage-`m` partial commutators equal to each `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorDistribution {
    pub stage: usize,
    pub counts: Vec<BigUint>,
}

impl CommutatorDistribution {
    pub fn mass(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Number of tuples whose partial commutator lies in `k`.
    pub fn mass_in(&self, k: &SubgroupRef) -> BigUint {
        k.elements().iter().map(|&g| &self.counts[g]).sum()
    }
}

/// Arithmetic the DP runs in: `u128` when a bound proves it safe, else `BigUint`.
trait Count: Clone + Send + Sync + Zero + for<'a> AddAssign<&'a Self> + Mul<Output = Self> + From<u64> + Into<BigUint> {}
impl<T> Count for T where T: Clone + Send + Sync + Zero + for<'a> AddAssign<&'a T> + Mul<Output = T> + From<u64> + Into<BigUint> {}

fn pow_big(base: usize, e: usize) -> BigUint {
    BigUint::from(base).pow(e as u32)
}

fn fits_u128(h_order: usize, len: usize) -> bool {
    // every partial sum is at most |H|^len
    pow_big(h_order, len) < (BigUint::one() << 126u32)
}

fn check_budget(what: &'static str, required: BigUint, budget: u128) -> Result<()> {
    if required > BigUint::from(budget) {
        let required = u128::try_from(&required).unwrap_or(u128::MAX);
        return Err(Error::BudgetExceeded { what, required, budget });
    }
    Ok(())
}

fn check_shifts(g: &GroupTable, s: &ShiftTuple, k: usize) -> Result<()> {
    if s.len() != k + 1 {
        return Err(Error::ShiftLength { expected: k + 1, got: s.len() });
    }
    if let Some(&x) = s.0.iter().find(|&&x| x >= g.order()) {
        return Err(Error::InvalidDefinition(format!("shift {x} is not an element of {}", g.label())));
    }
    Ok(())
}

/// `x·H` as a list.
fn coset(g: &GroupTable, h: &SubgroupRef, x: Elem) -> Vec<Elem> {
    h.elements().iter().map(|&y| g.mul(x, y)).collect()
}

/// Exhaustive count over `H^{k+1}`.
pub fn np_bruteforce(g: &GroupTable, h: &SubgroupRef, s: &ShiftTuple, k: usize, budgets: &Budgets) -> Result<NpResult> {
    check_shifts(g, s, k)?;
    let total = pow_big(h.order(), k + 1);
    check_budget("brute-force tuple enumeration", total.clone(), budgets.tuples)?;
    let cosets: Vec<Vec<Elem>> = s.0.iter().map(|&x| coset(g, h, x)).collect();

    fn descend(g: &GroupTable, cosets: &[Vec<Elem>], acc: Elem) -> u64 {
        match cosets.split_first() {
            None => u64::from(acc == IDENTITY),
            Some((level, rest)) => level.iter().map(|&z| descend(g, rest, g.commutator(acc, z))).sum(),
        }
    }
    let first = &cosets[0];
    let counted = par::map_reduce(first.len(), || 0u64, |i| descend(g, &cosets[1..], first[i]), |a, b| a + b);
    Ok(NpResult::new(BigUint::from(counted), total, Method::BruteForce))
}

/// `W₁`: one tuple per element of `x₁H`.
fn initial<T: Count>(g: &GroupTable, h: &SubgroupRef, x: Elem) -> Vec<T> {
    let mut w = vec![T::zero(); g.order()];
    let one = T::from(1);
    for z in coset(g, h, x) {
        w[z] += &one;
    }
    w
}

/// `W_{m+1}(c) = Σ_g W_m(g)·#{y ∈ H : [g, xy] = c}`.
fn step<T: Count>(g: &GroupTable, coset_x: &[Elem], w: &[T]) -> Vec<T> {
    let n = g.order();
    par::fold_chunks(
        n,
        || vec![T::zero(); n],
        |mut acc, a| {
            if !w[a].is_zero() {
                for &z in coset_x {
                    acc[g.commutator(a, z)] += &w[a];
                }
            }
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                *x += y;
            }
            a
        },
    )
}

/// `c_x(g) = |x⁻¹C_G(g) ∩ H|`, the number of `y ∈ H` with `[g, xy] = 1`.
fn closing_counts(g: &GroupTable, coset_x: &[Elem]) -> Vec<u64> {
    par::map_collect(g.order(), |a| {
        coset_x.iter().filter(|&&z| g.mul(a, z) == g.mul(z, a)).count() as u64
    })
}

fn finish<T: Count>(w: &[T], closing: &[u64]) -> T {
    let mut total = T::zero();
    for (wg, &c) in w.iter().zip(closing) {
        if c != 0 && !wg.is_zero() {
            total += &(wg.clone() * T::from(c));
        }
    }
    total
}

fn np_dp<T: Count>(g: &GroupTable, h: &SubgroupRef, s: &[Elem]) -> BigUint {
    let mut w: Vec<T> = initial(g, h, s[0]);
    if s.len() == 1 {
        return w.swap_remove(IDENTITY).into();
    }
    for &x in &s[1..s.len() - 1] {
        w = step(g, &coset(g, h, x), &w);
    }
    let closing = closing_counts(g, &coset(g, h, *s.last().expect("len ≥ 2")));
    finish(&w, &closing).into()
}

/// Stage-by-stage count; equal to [`np_bruteforce`].
pub fn np_fast(g: &GroupTable, h: &SubgroupRef, s: &ShiftTuple, k: usize, budgets: &Budgets) -> Result<NpResult> {
    check_shifts(g, s, k)?;
    let ops = BigUint::from(k.max(1)) * BigUint::from(g.order()) * BigUint::from(h.order());
    check_budget("stage-wise commutator count", ops, budgets.tuples)?;
    let total = pow_big(h.order(), k + 1);
    let counted = if fits_u128(h.order(), k + 1) {
        np_dp::<u128>(g, h, &s.0)
    } else {
        np_dp::<BigUint>(g, h, &s.0)
    };
    Ok(NpResult::new(counted, total, Method::Dp))
}

/// `np_k(G)`: `H = G`, trivial shifts.
pub fn np_k(g: &GroupTable, k: usize, budgets: &Budgets) -> Result<NpResult> {
    if k == 0 {
        return Err(Error::InvalidDefinition("k must be at least 1".into()));
    }
    np_fast(g, &SubgroupRef::whole(g), &ShiftTuple::identity(k + 1), k, budgets)
}

/// Commuting probability: classes over order.
pub fn cp(g: &GroupTable) -> ExactProb {
    let classes = conjugacy_classes(g).count();
    ExactProb::from_counts(BigUint::from(classes), BigUint::from(g.order()))
}

/// Commuting probability of a subgroup, as a group in its own right.
pub fn cp_subgroup(g: &GroupTable, h: &SubgroupRef) -> ExactProb {
    cp(&h.as_group(g, "H"))
}

/// `W_m` for the first `m` shifts.
pub fn commutator_distribution(
    g: &GroupTable,
    h: &SubgroupRef,
    s: &ShiftTuple,
    m: usize,
    budgets: &Budgets,
) -> Result<CommutatorDistribution> {
    if m == 0 || s.len() < m {
        return Err(Error::ShiftLength { expected: m.max(1), got: s.len() });
    }
    let ops = BigUint::from(m) * BigUint::from(g.order()) * BigUint::from(h.order());
    check_budget("commutator distribution", ops, budgets.tuples)?;
    let mut w: Vec<BigUint> = initial(g, h, s.0[0]);
    for &x in &s.0[1..m] {
        w = step(g, &coset(g, h, x), &w);
    }
    Ok(CommutatorDistribution { stage: m, counts: w })
}

/// `np(H; x)` for every tuple of canonical coset representatives.
///
/// Representatives are the least elements of the left cosets `xH`; tuples
/// are indexed in lexicographic order, first coordinate most significant.
#[derive(Debug, Clone)]
pub struct NpTable {
    pub reps: Vec<Elem>,
    pub len: usize,
    pub total: BigUint,
    pub counts: Vec<BigUint>,
}

impl NpTable {
    pub fn tuples(&self) -> usize {
        self.counts.len()
    }

    pub fn tuple(&self, mut index: usize) -> ShiftTuple {
        let r = self.reps.len();
        let mut out = vec![IDENTITY; self.len];
        for slot in out.iter_mut().rev() {
            *slot = self.reps[index % r];
            index /= r;
        }
        ShiftTuple(out)
    }

    pub fn value(&self, index: usize) -> ExactProb {
        ExactProb::from_counts(self.counts[index].clone(), self.total.clone())
    }
}

pub fn np_table(g: &GroupTable, h: &SubgroupRef, k: usize, budgets: &Budgets) -> Result<NpTable> {
    let (reps, _) = h.left_cosets(g);
    let len = k + 1;
    check_budget("shift tuples", pow_big(reps.len(), len), budgets.shifts)?;
    let ops = BigUint::from(k.max(1)) * BigUint::from(g.order()) * BigUint::from(h.order());
    check_budget("stage-wise commutator count", ops, budgets.tuples)?;
    let counts = if fits_u128(h.order(), len) {
        table_counts::<u128>(g, h, &reps, len)
    } else {
        table_counts::<BigUint>(g, h, &reps, len)
    };
    Ok(NpTable { reps, len, total: pow_big(h.order(), len), counts })
}

fn table_counts<T: Count>(g: &GroupTable, h: &SubgroupRef, reps: &[Elem], len: usize) -> Vec<BigUint> {
    let cosets: Vec<Vec<Elem>> = reps.iter().map(|&x| coset(g, h, x)).collect();
    if len == 1 {
        return reps.iter().map(|&x| BigUint::from(u64::from(h.contains(g.inv(x))))).collect();
    }
    let closing: Vec<Vec<u64>> = cosets.iter().map(|c| closing_counts(g, c)).collect();

    fn walk<T: Count>(
        g: &GroupTable,
        cosets: &[Vec<Elem>],
        closing: &[Vec<u64>],
        w: &[T],
        remaining: usize,
        out: &mut Vec<BigUint>,
    ) {
        if remaining == 1 {
            out.extend(closing.iter().map(|c| finish(w, c).into()));
            return;
        }
        for c in cosets {
            let next = step(g, c, w);
            walk(g, cosets, closing, &next, remaining - 1, out);
        }
    }
    let per_first = par::map_slice(reps, |&x| {
        let w: Vec<T> = initial(g, h, x);
        let mut out = Vec::new();
        walk(g, &cosets, &closing, &w, len - 1, &mut out);
        out
    });
    per_first.into_iter().flatten().collect()
}

/// Supremum of `np(H; x)` over shift tuples from `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpSup {
    pub value: ExactProb,
    /// Lexicographically least maximizing tuple of coset representatives.
    pub witness: ShiftTuple,
    /// Supremum with the last shift held in `H`.
    pub value_last_fixed: ExactProb,
    pub witness_last_fixed: ShiftTuple,
}

impl NpSup {
    pub fn readings_differ(&self) -> bool {
        self.value != self.value_last_fixed
    }
}

impl NpTable {
    pub fn sup(&self) -> NpSup {
        let r = self.reps.len();
        let argmax = |filter: &dyn Fn(usize) -> bool| -> usize {
            let mut best: Option<usize> = None;
            for i in (0..self.tuples()).filter(|&i| filter(i)) {
                if best.is_none_or(|b| self.counts[i] > self.counts[b]) {
                    best = Some(i);
                }
            }
            best.expect("at least one tuple")
        };
        let all = argmax(&|_| true);
        // reps[0] is the identity coset
        let fixed = argmax(&|i| i % r == 0);
        NpSup {
            value: self.value(all),
            witness: self.tuple(all),
            value_last_fixed: self.value(fixed),
            witness_last_fixed: self.tuple(fixed),
        }
    }
}

/// `np_{k,G}(H)`, maximized over all `k+1` shift coordinates.
pub fn np_sup(g: &GroupTable, h: &SubgroupRef, k: usize, budgets: &Budgets) -> Result<NpSup> {
    Ok(np_table(g, h, k, budgets)?.sup())
}
