//! Theorem harness: replays the nilpotence-probability inequalities over a
//! corpus of finite groups and collects outcomes, findings and equality
//! cases into a [`VerificationReport`].
//!
//! Every comparison is exact. The series bound `r < ln np_k(G) / ln c` is
//! decided through the equivalent `c^r > np_k(G)` (for `0 < c < 1`); the
//! logarithmic quotient is only reported.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cache::{cache_key, ResultCache};
use crate::catalog::default_corpus;
use crate::definition::{GroupDef, ResolveOptions};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupTable, DEFAULT_MAX_ORDER};
use crate::nilprob::{cp_subgroup, np_k, np_table, Budgets, NpSup, NpTable, ShiftTuple};
use crate::par;
use crate::prob::ExactProb;
use crate::structure::{
    center, cyclic_subgroups, lower_central_term, nilpotency_class_of, normal_subgroups_capped, quotient,
    SubgroupRef, DEFAULT_NORMAL_SUBGROUP_CAP,
};

/// Bound constants for `np_{k,G}(H)` when `H` has class greater than `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapBoundConstants;

impl GapBoundConstants {
    /// `1 − 3/2^{k+1}`, the constant as printed.
    pub fn stated(k: usize) -> ExactProb {
        ExactProb::one_minus_three_over_pow2(k as u32 + 1)
    }

    /// `1 − 3/2^{k+2}`, obtained by iterating the center recursion down to
    /// the 5/8 commuting-probability bound.
    pub fn derived(k: usize) -> ExactProb {
        ExactProb::one_minus_three_over_pow2(k as u32 + 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckKind {
    #[serde(rename = "npleqcp")]
    Npleqcp,
    #[serde(rename = "2_4n")]
    CenterRecursion,
    #[serde(rename = "nocamn")]
    Nocamn,
    #[serde(rename = "gap_bound")]
    GapBound,
    #[serde(rename = "submultiplicativity")]
    Submultiplicativity,
    #[serde(rename = "mtvv_monotonicity")]
    MtvvMonotonicity,
    #[serde(rename = "series_bound")]
    SeriesBound,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Npleqcp,
        CheckKind::CenterRecursion,
        CheckKind::Nocamn,
        CheckKind::GapBound,
        CheckKind::Submultiplicativity,
        CheckKind::MtvvMonotonicity,
        CheckKind::SeriesBound,
    ];
}

/// A number on either side of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Exact(ExactProb),
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Quantity {
    fn approx(&self) -> f64 {
        match self {
            Quantity::Exact(p) => p.to_f64(),
            Quantity::Int(i) => *i as f64,
            Quantity::Real(x) => *x,
            Quantity::Bool(b) => f64::from(u8::from(*b)),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Exact(p) => write!(f, "{p}"),
            Quantity::Int(i) => write!(f, "{i}"),
            Quantity::Real(x) => write!(f, "{x:.6}"),
            Quantity::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Identifies a subgroup within a corpus item.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubgroupTag {
    /// `normal` (index into the sorted normal subgroups), `cyclic`, or `subgroup`.
    pub source: String,
    pub index: Option<usize>,
    pub order: usize,
}

impl SubgroupTag {
    pub fn normal(index: usize, h: &SubgroupRef) -> Self {
        SubgroupTag { source: "normal".into(), index: Some(index), order: h.order() }
    }

    pub fn cyclic(index: usize, h: &SubgroupRef) -> Self {
        SubgroupTag { source: "cyclic".into(), index: Some(index), order: h.order() }
    }

    pub fn plain(h: &SubgroupRef) -> Self {
        SubgroupTag { source: "subgroup".into(), index: None, order: h.order() }
    }
}

impl fmt::Display for SubgroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.source.as_str() {
            "normal" => "N",
            "cyclic" => "Z",
            _ => "H",
        };
        match self.index {
            Some(i) => write!(f, "{prefix}{i}[{}]", self.order),
            None => write!(f, "{prefix}[{}]", self.order),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<SubgroupTag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<SubgroupTag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifts: Option<ShiftTuple>,
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(h) = &self.h {
            parts.push(format!("H={h}"));
        }
        if let Some(n) = &self.n {
            parts.push(format!("N={n}"));
        }
        if let Some(s) = &self.shifts {
            parts.push(format!("x={:?}", s.0));
        }
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check_id: String,
    pub group: String,
    pub params: Params,
    pub lhs: Quantity,
    pub rhs: Quantity,
    /// `<=`, `<`, or `iff`.
    pub relation: String,
    pub holds: bool,
    /// Both sides equal (the bound is attained).
    pub equality: bool,
    /// Failures of a must-hold check are violations; failures of the
    /// others are findings.
    pub must_hold: bool,
    /// Shift tuples summarized by this outcome.
    pub tuples_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl CheckOutcome {
    fn leq(check_id: &str, group: &str, params: Params, lhs: ExactProb, rhs: ExactProb, must_hold: bool) -> Self {
        CheckOutcome {
            check_id: check_id.into(),
            group: group.into(),
            params,
            holds: lhs <= rhs,
            equality: lhs == rhs,
            lhs: Quantity::Exact(lhs),
            rhs: Quantity::Exact(rhs),
            relation: "<=".into(),
            must_hold,
            tuples_checked: 1,
            witness: None,
        }
    }

    pub fn is_violation(&self) -> bool {
        self.must_hold && !self.holds
    }

    pub fn is_finding(&self) -> bool {
        !self.must_hold && !self.holds
    }

    fn slack(&self) -> f64 {
        self.rhs.approx() - self.lhs.approx()
    }

    fn is_trivial_equality(&self) -> bool {
        matches!((&self.lhs, &self.rhs), (Quantity::Exact(a), Quantity::Exact(b)) if a.is_one() && b.is_one())
    }
}

/// Folds per-tuple outcomes into one summary outcome (the tightest tuple),
/// keeping every violation and the first equality case.
#[derive(Debug, Default)]
pub struct Condenser {
    count: u64,
    tightest: Option<CheckOutcome>,
    failures: Vec<CheckOutcome>,
    equality: Option<CheckOutcome>,
}

/// Failing tuples kept per summarized check.
const MAX_KEPT_FAILURES: usize = 64;

impl Condenser {
    pub fn push(&mut self, o: CheckOutcome) {
        self.count += 1;
        if !o.holds && self.failures.len() < MAX_KEPT_FAILURES {
            self.failures.push(o.clone());
        }
        if o.equality && self.equality.is_none() {
            self.equality = Some(o.clone());
        }
        if self.tightest.as_ref().is_none_or(|t| o.slack() < t.slack()) {
            self.tightest = Some(o);
        }
    }

    /// Summary outcome, failing tuples, and an equality witness.
    pub fn finish(self) -> Option<(CheckOutcome, Vec<CheckOutcome>, Option<CheckOutcome>)> {
        let mut summary = self.tightest?;
        summary.tuples_checked = self.count;
        summary.holds = self.failures.is_empty();
        if let Some(e) = &self.equality {
            summary.equality = true;
            summary.witness = Some(serde_json::json!({ "equality_at": e.params.shifts }));
        }
        Some((summary, self.failures, self.equality))
    }
}

/// Longest normal series with every factor of class greater than `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub group: String,
    pub k: usize,
    /// Top index of `1 = G_{r+1} ≤ … ≤ G_0 = G`; `-1` when no such series exists.
    pub r: i64,
    pub factor_count: usize,
    /// Orders along the witness chain, from `1` up to `G`.
    pub chain_orders: Vec<usize>,
    #[serde(skip)]
    pub chain: Vec<SubgroupRef>,
}

impl SeriesReport {
    pub fn exists(&self) -> bool {
        self.r >= 0
    }
}

type TableKey = (String, Vec<Elem>, usize);

/// Check runner for one group, memoizing coset tables across checks.
pub struct Harness<'a> {
    g: &'a GroupTable,
    budgets: Budgets,
    normal_cap: usize,
    cache: Option<&'a ResultCache>,
    tables: Mutex<HashMap<TableKey, Arc<NpTable>>>,
    sups: Mutex<HashMap<TableKey, NpSup>>,
    sup_notes: Mutex<Vec<SupReading>>,
}

/// Records a subgroup where the two readings of the supremum disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupReading {
    pub group: String,
    pub subgroup_order: usize,
    pub k: usize,
    pub sup_all_shifts: ExactProb,
    pub sup_last_shift_fixed: ExactProb,
}

impl<'a> Harness<'a> {
    pub fn new(g: &'a GroupTable, budgets: Budgets) -> Self {
        Harness {
            g,
            budgets,
            normal_cap: DEFAULT_NORMAL_SUBGROUP_CAP,
            cache: None,
            tables: Mutex::new(HashMap::new()),
            sups: Mutex::new(HashMap::new()),
            sup_notes: Mutex::new(Vec::new()),
        }
    }

    pub fn with_cache(mut self, cache: Option<&'a ResultCache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn with_normal_cap(mut self, cap: usize) -> Self {
        self.normal_cap = cap;
        self
    }

    pub fn group(&self) -> &GroupTable {
        self.g
    }

    fn table_in(&self, g: &GroupTable, h: &SubgroupRef, k: usize) -> Result<Arc<NpTable>> {
        let key = (g.content_hash(), h.elements().to_vec(), k);
        if let Some(t) = self.tables.lock().expect("table memo").get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(np_table(g, h, k, &self.budgets)?);
        self.tables.lock().expect("table memo").insert(key, t.clone());
        Ok(t)
    }

    /// `np_{k,G}(H)` for an arbitrary ambient group `g`.
    pub fn sup_in(&self, g: &GroupTable, h: &SubgroupRef, k: usize) -> Result<NpSup> {
        let key = (g.content_hash(), h.elements().to_vec(), k);
        if let Some(s) = self.sups.lock().expect("sup memo").get(&key) {
            return Ok(s.clone());
        }
        let ckey = cache_key(g, h, None, k, "sup");
        let sup = match self.cache.and_then(|c| c.get::<NpSup>(&ckey)) {
            Some(s) => s,
            None => {
                let s = self.table_in(g, h, k)?.sup();
                if let Some(c) = self.cache {
                    c.put(&ckey, "sup", &s)?;
                }
                s
            }
        };
        if sup.readings_differ() {
            self.sup_notes.lock().expect("notes").push(SupReading {
                group: g.label().to_string(),
                subgroup_order: h.order(),
                k,
                sup_all_shifts: sup.value.clone(),
                sup_last_shift_fixed: sup.value_last_fixed.clone(),
            });
        }
        self.sups.lock().expect("sup memo").insert(key, sup.clone());
        Ok(sup)
    }

    pub fn sup(&self, h: &SubgroupRef, k: usize) -> Result<NpSup> {
        self.sup_in(self.g, h, k)
    }

    pub fn sup_reading_notes(&self) -> Vec<SupReading> {
        self.sup_notes.lock().expect("notes").clone()
    }

    /// `np(H; x, y) ≤ cp(H)` over coset-representative pairs.
    pub fn npleqcp(&self, h: &SubgroupRef, tag: &SubgroupTag, sink: &mut dyn FnMut(CheckOutcome)) -> Result<()> {
        let table = self.table_in(self.g, h, 1)?;
        let cp_h = cp_subgroup(self.g, h);
        for i in 0..table.tuples() {
            let params = Params { k: Some(1), h: Some(tag.clone()), n: None, shifts: Some(table.tuple(i)) };
            sink(CheckOutcome::leq("npleqcp", self.g.label(), params, table.value(i), cp_h.clone(), true));
        }
        Ok(())
    }

    /// `np(H; x₁…x_{k+1}) ≤ ½(1 + np(H/K; x̄₁…x̄_k))` with `K = Z(G) ∩ H`,
    /// the quotient side evaluated in `G/K`.
    ///
    /// The halving step needs `C_H(c) ≠ H` for every commutator value
    /// `c ∉ K`, guaranteed when `C_G(H) ≤ K`. Outside that hypothesis the
    /// check is a probe: `A3 ⊴ S3` at `k = 1` gives `1 > 2/3`.
    pub fn center_recursion(
        &self,
        h: &SubgroupRef,
        tag: &SubgroupTag,
        k: usize,
        sink: &mut dyn FnMut(CheckOutcome),
    ) -> Result<()> {
        let g = self.g;
        let z = center(g);
        let must_hold = centralizer_in_center(g, h, &z);
        let kernel = SubgroupRef::try_from(
            h.elements().iter().copied().filter(|&x| z.contains(x)).collect::<Vec<_>>(),
        )?;
        let q = quotient(g, &kernel)?;
        let h_bar = q.image(h);
        let lhs_table = self.table_in(g, h, k)?;
        let rhs_table = self.table_in(&q.target, &h_bar, k - 1)?;
        let (_, coset_of) = h_bar.left_cosets(&q.target);
        let r = rhs_table.reps.len();
        for i in 0..lhs_table.tuples() {
            let shifts = lhs_table.tuple(i);
            let j = shifts.0[..k].iter().fold(0usize, |acc, &x| acc * r + coset_of[q.project(x)]);
            let rhs = rhs_table.value(j).half_up();
            let params = Params { k: Some(k), h: Some(tag.clone()), n: None, shifts: Some(shifts) };
            sink(CheckOutcome::leq("2_4n", g.label(), params, lhs_table.value(i), rhs, must_hold));
        }
        Ok(())
    }

    /// `np_{k,G}(H) = 1  ⇔  class(H) ≤ k`.
    pub fn nocamn(&self, h: &SubgroupRef, tag: &SubgroupTag, k: usize) -> Result<CheckOutcome> {
        let sup = self.sup(h, k)?;
        let class = nilpotency_class_of(self.g, h);
        let lhs = sup.value.is_one();
        let rhs = class.is_some_and(|c| c <= k);
        Ok(CheckOutcome {
            check_id: "nocamn".into(),
            group: self.g.label().into(),
            params: Params { k: Some(k), h: Some(tag.clone()), n: None, shifts: None },
            lhs: Quantity::Bool(lhs),
            rhs: Quantity::Bool(rhs),
            relation: "iff".into(),
            holds: lhs == rhs,
            equality: false,
            must_hold: true,
            tuples_checked: 1,
            witness: Some(serde_json::json!({
                "np_sup": sup.value,
                "witness": sup.witness,
                "nilpotency_class": class,
            })),
        })
    }

    /// `np_{k,G}(H)` against both gap constants; `None` when `class(H) ≤ k`.
    pub fn gap_bound(&self, h: &SubgroupRef, tag: &SubgroupTag, k: usize) -> Result<Option<[CheckOutcome; 2]>> {
        if nilpotency_class_of(self.g, h).is_some_and(|c| c <= k) {
            return Ok(None);
        }
        let sup = self.sup(h, k)?;
        let params = Params { k: Some(k), h: Some(tag.clone()), n: None, shifts: Some(sup.witness.clone()) };
        let label = self.g.label();
        let derived =
            CheckOutcome::leq("gap_bound_derived", label, params.clone(), sup.value.clone(), GapBoundConstants::derived(k), true);
        let stated = CheckOutcome::leq("gap_bound_stated", label, params, sup.value, GapBoundConstants::stated(k), false);
        Ok(Some([derived, stated]))
    }

    /// `np_{k,G}(H) ≤ np_{k,G/N}(H/N) · np_{k,G}(N)` for `N ⊴ G`, `N ≤ H`.
    pub fn submultiplicativity(
        &self,
        n: &SubgroupRef,
        n_tag: &SubgroupTag,
        h: &SubgroupRef,
        h_tag: &SubgroupTag,
        k: usize,
    ) -> Result<CheckOutcome> {
        if !n.is_subset_of(h) {
            return Err(Error::NotASubgroup("N must be contained in H".into()));
        }
        let q = quotient(self.g, n)?;
        let lhs = self.sup(h, k)?;
        let top = self.sup_in(&q.target, &q.image(h), k)?;
        let bottom = self.sup(n, k)?;
        let rhs = &top.value * &bottom.value;
        let params = Params { k: Some(k), h: Some(h_tag.clone()), n: Some(n_tag.clone()), shifts: None };
        let mut o = CheckOutcome::leq("submultiplicativity", self.g.label(), params, lhs.value, rhs, true);
        o.witness = Some(serde_json::json!({ "quotient_sup": top.value, "kernel_sup": bottom.value }));
        Ok(o)
    }

    /// `np(N; x) ≤ np(N; 1, …, 1)` for `N ⊴ G`.
    pub fn mtvv(&self, n: &SubgroupRef, tag: &SubgroupTag, k: usize, sink: &mut dyn FnMut(CheckOutcome)) -> Result<()> {
        if !n.is_normal_in(self.g) {
            return Err(Error::NotNormal { element: 0, conjugator: 0 });
        }
        let table = self.table_in(self.g, n, k)?;
        let trivial = table.value(0);
        for i in 0..table.tuples() {
            let params = Params { k: Some(k), h: None, n: Some(tag.clone()), shifts: Some(table.tuple(i)) };
            sink(CheckOutcome::leq("mtvv_monotonicity", self.g.label(), params, table.value(i), trivial.clone(), true));
        }
        Ok(())
    }

    pub fn max_bad_series_length(&self, k: usize) -> Result<SeriesReport> {
        max_bad_series_length_capped(self.g, k, self.normal_cap)
    }

    /// Series length against both constants; `None` when no series exists.
    pub fn series_bound(&self, k: usize) -> Result<Option<(SeriesReport, [CheckOutcome; 2])>> {
        let series = self.max_bad_series_length(k)?;
        if !series.exists() {
            return Ok(None);
        }
        let np = np_k(self.g, k, &self.budgets)?.value;
        let outcome = |id: &str, c: ExactProb, must_hold: bool| {
            let power = c.pow(series.r as u32);
            let bound = np.to_f64().ln() / c.to_f64().ln();
            CheckOutcome {
                check_id: id.into(),
                group: self.g.label().into(),
                params: Params { k: Some(k), h: None, n: None, shifts: None },
                lhs: Quantity::Int(series.r),
                rhs: Quantity::Real(bound),
                relation: "<".into(),
                holds: power > np,
                equality: power == np,
                must_hold,
                tuples_checked: 1,
                witness: Some(serde_json::json!({
                    "np_k": np,
                    "constant": c,
                    "factor_count": series.factor_count,
                    "chain_orders": series.chain_orders,
                })),
            }
        };
        let derived = outcome("series_bound_derived", GapBoundConstants::derived(k), true);
        let stated = outcome("series_bound_stated", GapBoundConstants::stated(k), false);
        Ok(Some((series, [derived, stated])))
    }
}

/// `C_G(H) ≤ Z(G) ∩ H`, the hypothesis under which the center recursion
/// is proved. Holds for `H = G`.
pub fn centralizer_in_center(g: &GroupTable, h: &SubgroupRef, z: &SubgroupRef) -> bool {
    let hs = h.elements();
    g.elements().all(|c| (z.contains(c) && h.contains(c)) || hs.iter().any(|&a| g.mul(a, c) != g.mul(c, a)))
}

fn collect(f: impl FnOnce(&mut dyn FnMut(CheckOutcome)) -> Result<()>) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    f(&mut |o| out.push(o))?;
    Ok(out)
}

pub fn check_npleqcp(g: &GroupTable, h: &SubgroupRef, budgets: &Budgets) -> Result<Vec<CheckOutcome>> {
    let harness = Harness::new(g, *budgets);
    collect(|sink| harness.npleqcp(h, &SubgroupTag::plain(h), sink))
}

pub fn check_2_4n(g: &GroupTable, h: &SubgroupRef, k: usize, budgets: &Budgets) -> Result<Vec<CheckOutcome>> {
    if k == 0 {
        return Err(Error::InvalidDefinition("k must be at least 1".into()));
    }
    let harness = Harness::new(g, *budgets);
    collect(|sink| harness.center_recursion(h, &SubgroupTag::plain(h), k, sink))
}

pub fn check_nocamn(g: &GroupTable, h: &SubgroupRef, k: usize, budgets: &Budgets) -> Result<CheckOutcome> {
    Harness::new(g, *budgets).nocamn(h, &SubgroupTag::plain(h), k)
}

pub fn check_gap_bound(g: &GroupTable, h: &SubgroupRef, k: usize, budgets: &Budgets) -> Result<Option<[CheckOutcome; 2]>> {
    Harness::new(g, *budgets).gap_bound(h, &SubgroupTag::plain(h), k)
}

pub fn check_submultiplicativity(
    g: &GroupTable,
    n: &SubgroupRef,
    h: &SubgroupRef,
    k: usize,
    budgets: &Budgets,
) -> Result<CheckOutcome> {
    Harness::new(g, *budgets).submultiplicativity(n, &SubgroupTag::plain(n), h, &SubgroupTag::plain(h), k)
}

pub fn check_mtvv_monotonicity(g: &GroupTable, n: &SubgroupRef, k: usize, budgets: &Budgets) -> Result<Vec<CheckOutcome>> {
    let harness = Harness::new(g, *budgets);
    collect(|sink| harness.mtvv(n, &SubgroupTag::plain(n), k, sink))
}

pub fn check_series_bound(g: &GroupTable, k: usize, budgets: &Budgets) -> Result<Option<(SeriesReport, [CheckOutcome; 2])>> {
    Harness::new(g, *budgets).series_bound(k)
}

pub fn max_bad_series_length(g: &GroupTable, k: usize) -> Result<SeriesReport> {
    max_bad_series_length_capped(g, k, DEFAULT_NORMAL_SUBGROUP_CAP)
}

/// Longest chain `1 = G_{r+1} < … < G_0 = G` of normal subgroups of `G`
/// whose factors `G_i/G_{i+1}` all have class greater than `k`.
/// A factor has class at most `k` exactly when `γ_{k+1}(G_i) ≤ G_{i+1}`.
pub fn max_bad_series_length_capped(g: &GroupTable, k: usize, cap: usize) -> Result<SeriesReport> {
    let ns = normal_subgroups_capped(g, cap)?;
    let gammas: Vec<SubgroupRef> = ns.iter().map(|a| lower_central_term(g, a, k + 1)).collect();
    // best[i]: most bad factors from 1 up to ns[i], with the next step down
    let mut best: Vec<Option<(usize, Option<usize>)>> = vec![None; ns.len()];
    best[0] = Some((0, None));
    for i in 1..ns.len() {
        for j in 0..i {
            if ns[j].order() >= ns[i].order() || !ns[j].is_subset_of(&ns[i]) {
                continue;
            }
            if gammas[i].is_subset_of(&ns[j]) {
                continue;
            }
            if let Some((len, _)) = best[j] {
                if best[i].is_none_or(|(b, _)| len + 1 > b) {
                    best[i] = Some((len + 1, Some(j)));
                }
            }
        }
    }
    let top = ns.len() - 1;
    let (factors, chain) = match best[top] {
        Some((len, _)) if len > 0 => {
            let mut chain = vec![ns[top].clone()];
            let mut cur = top;
            while let Some((_, Some(next))) = best[cur] {
                chain.push(ns[next].clone());
                cur = next;
            }
            chain.reverse();
            (len, chain)
        }
        _ => (0, Vec::new()),
    };
    Ok(SeriesReport {
        group: g.label().to_string(),
        k,
        r: factors as i64 - 1,
        factor_count: factors,
        chain_orders: chain.iter().map(|s| s.order()).collect(),
        chain,
    })
}

/// A corpus entry: a catalog name or a full definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorpusEntry {
    Name(String),
    Definition(GroupDef),
}

impl CorpusEntry {
    pub fn definition(&self) -> GroupDef {
        match self {
            CorpusEntry::Name(n) => GroupDef::catalog(n),
            CorpusEntry::Definition(d) => d.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub groups: Vec<CorpusEntry>,
    pub k_values: Vec<usize>,
    /// Largest group order at which a given `k` is run; absent means no limit.
    pub k_order_limits: BTreeMap<usize, usize>,
    pub budgets: Budgets,
    pub checks: Vec<CheckKind>,
    /// Also use every cyclic subgroup as `H`.
    pub cyclic_subgroups: bool,
    pub max_order: usize,
    pub normal_subgroup_cap: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            groups: default_corpus().into_iter().map(CorpusEntry::Name).collect(),
            k_values: vec![1, 2, 3],
            k_order_limits: BTreeMap::from([(3, 24)]),
            budgets: Budgets::default(),
            checks: CheckKind::ALL.to_vec(),
            cyclic_subgroups: false,
            max_order: DEFAULT_MAX_ORDER,
            normal_subgroup_cap: DEFAULT_NORMAL_SUBGROUP_CAP,
            seed: 0,
        }
    }
}

impl CorpusConfig {
    pub fn with_groups(names: &[&str]) -> Self {
        CorpusConfig { groups: names.iter().map(|s| CorpusEntry::Name(s.to_string())).collect(), ..Default::default() }
    }

    fn runs(&self, check: CheckKind) -> bool {
        self.checks.contains(&check)
    }

    fn k_applies(&self, k: usize, order: usize) -> bool {
        k >= 1 && self.k_order_limits.get(&k).is_none_or(|&lim| order <= lim)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub group: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub groups: usize,
    pub checks: usize,
    pub passed: usize,
    pub violations: usize,
    pub findings: usize,
    pub skipped: usize,
    pub sharpness: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub budgets: Budgets,
    pub version: String,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTiming {
    pub group: String,
    pub millis: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub summary: Summary,
    pub outcomes: Vec<CheckOutcome>,
    pub violations: Vec<CheckOutcome>,
    pub findings: Vec<CheckOutcome>,
    pub sharpness: Vec<CheckOutcome>,
    pub series: Vec<SeriesReport>,
    pub sup_readings: Vec<SupReading>,
    pub skipped: Vec<SkipRecord>,
    pub environment: Environment,
    pub timing: Vec<GroupTiming>,
}

impl VerificationReport {
    /// True when no must-hold check failed.
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// The report with run-dependent timing removed.
    pub fn without_timing(&self) -> VerificationReport {
        VerificationReport { timing: Vec::new(), ..self.clone() }
    }
}

#[derive(Default)]
struct GroupRun {
    outcomes: Vec<CheckOutcome>,
    violations: Vec<CheckOutcome>,
    sharpness: Vec<CheckOutcome>,
    series: Vec<SeriesReport>,
    sup_readings: Vec<SupReading>,
    skipped: Vec<SkipRecord>,
    millis: u128,
}

impl GroupRun {
    fn record(&mut self, o: CheckOutcome) {
        if o.is_violation() {
            self.violations.push(o.clone());
        }
        if o.must_hold && o.equality && !o.is_trivial_equality() {
            self.sharpness.push(o.clone());
        }
        self.outcomes.push(o);
    }

    fn record_condensed(&mut self, c: Condenser) {
        if let Some((summary, failures, equality)) = c.finish() {
            if summary.must_hold {
                self.violations.extend(failures);
            }
            if let Some(e) = equality.filter(|e| e.must_hold && !e.is_trivial_equality()) {
                self.sharpness.push(e);
            }
            self.outcomes.push(summary);
        }
    }

    fn skip(&mut self, group: &str, check: &str, params: Option<Params>, err: &Error) {
        self.skipped.push(SkipRecord {
            group: group.into(),
            check: Some(check.into()),
            params,
            reason: err.to_string(),
        });
    }
}

fn run_group(entry: &CorpusEntry, config: &CorpusConfig, cache: Option<&ResultCache>) -> GroupRun {
    let start = Instant::now();
    let def = entry.definition();
    let label = def.label();
    let mut run = GroupRun::default();
    let opts = ResolveOptions { max_order: config.max_order, ..Default::default() };
    let g = match def.resolve_with(&opts) {
        Ok(g) => g,
        Err(e) => {
            run.skipped.push(SkipRecord { group: label, check: None, params: None, reason: e.to_string() });
            return run;
        }
    };
    let ns = match normal_subgroups_capped(&g, config.normal_subgroup_cap) {
        Ok(ns) => ns,
        Err(e) => {
            run.skipped.push(SkipRecord { group: label, check: None, params: None, reason: e.to_string() });
            return run;
        }
    };
    let harness = Harness::new(&g, config.budgets).with_cache(cache).with_normal_cap(config.normal_subgroup_cap);
    let mut subgroups: Vec<(SubgroupRef, SubgroupTag)> =
        ns.iter().enumerate().map(|(i, n)| (n.clone(), SubgroupTag::normal(i, n))).collect();
    if config.cyclic_subgroups {
        for (i, c) in cyclic_subgroups(&g).into_iter().enumerate() {
            if !c.is_normal_in(&g) {
                let tag = SubgroupTag::cyclic(i, &c);
                subgroups.push((c, tag));
            }
        }
    }

    let hp = |tag: &SubgroupTag, k: Option<usize>| Some(Params { k, h: Some(tag.clone()), ..Default::default() });

    if config.runs(CheckKind::Npleqcp) {
        for (h, tag) in &subgroups {
            let mut c = Condenser::default();
            match harness.npleqcp(h, tag, &mut |o| c.push(o)) {
                Ok(()) => run.record_condensed(c),
                Err(e) => run.skip(&label, "npleqcp", hp(tag, Some(1)), &e),
            }
        }
    }

    for &k in &config.k_values {
        if !config.k_applies(k, g.order()) {
            continue;
        }
        for (h, tag) in &subgroups {
            if config.runs(CheckKind::CenterRecursion) {
                let mut c = Condenser::default();
                match harness.center_recursion(h, tag, k, &mut |o| c.push(o)) {
                    Ok(()) => run.record_condensed(c),
                    Err(e) => run.skip(&label, "2_4n", hp(tag, Some(k)), &e),
                }
            }
            if config.runs(CheckKind::Nocamn) {
                match harness.nocamn(h, tag, k) {
                    Ok(o) => run.record(o),
                    Err(e) => run.skip(&label, "nocamn", hp(tag, Some(k)), &e),
                }
            }
            if config.runs(CheckKind::GapBound) {
                match harness.gap_bound(h, tag, k) {
                    Ok(Some(pair)) => pair.into_iter().for_each(|o| run.record(o)),
                    Ok(None) => run.skipped.push(SkipRecord {
                        group: label.clone(),
                        check: Some("gap_bound".into()),
                        params: hp(tag, Some(k)),
                        reason: format!("H has nilpotency class at most {k}"),
                    }),
                    Err(e) => run.skip(&label, "gap_bound", hp(tag, Some(k)), &e),
                }
            }
            if config.runs(CheckKind::MtvvMonotonicity) && tag.source == "normal" {
                let mut c = Condenser::default();
                match harness.mtvv(h, tag, k, &mut |o| c.push(o)) {
                    Ok(()) => run.record_condensed(c),
                    Err(e) => run.skip(&label, "mtvv_monotonicity", hp(tag, Some(k)), &e),
                }
            }
            if config.runs(CheckKind::Submultiplicativity) {
                for (i, n) in ns.iter().enumerate() {
                    if !n.is_subset_of(h) {
                        continue;
                    }
                    let n_tag = SubgroupTag::normal(i, n);
                    match harness.submultiplicativity(n, &n_tag, h, tag, k) {
                        Ok(o) => run.record(o),
                        Err(e) => {
                            let params = Params { k: Some(k), h: Some(tag.clone()), n: Some(n_tag), shifts: None };
                            run.skip(&label, "submultiplicativity", Some(params), &e)
                        }
                    }
                }
            }
        }
        if config.runs(CheckKind::SeriesBound) {
            let params = Some(Params { k: Some(k), ..Default::default() });
            match harness.series_bound(k) {
                Ok(Some((series, pair))) => {
                    run.series.push(series);
                    pair.into_iter().for_each(|o| run.record(o));
                }
                Ok(None) => run.skipped.push(SkipRecord {
                    group: label.clone(),
                    check: Some("series_bound".into()),
                    params,
                    reason: "no normal series with all factors of class greater than k".into(),
                }),
                Err(e) => run.skip(&label, "series_bound", params, &e),
            }
        }
    }
    run.sup_readings = harness.sup_reading_notes();
    run.millis = start.elapsed().as_millis();
    run
}

fn sort_key(o: &CheckOutcome) -> (String, String, Params) {
    (o.group.clone(), o.check_id.clone(), o.params.clone())
}

/// Runs every selected check over every corpus group.
pub fn run_corpus(config: &CorpusConfig) -> VerificationReport {
    run_corpus_cached(config, None)
}

pub fn run_corpus_cached(config: &CorpusConfig, cache: Option<&ResultCache>) -> VerificationReport {
    let runs = par::map_slice(&config.groups, |entry| run_group(entry, config, cache));
    let mut outcomes = Vec::new();
    let mut violations = Vec::new();
    let mut sharpness = Vec::new();
    let mut series = Vec::new();
    let mut sup_readings = Vec::new();
    let mut skipped = Vec::new();
    let mut timing = Vec::new();
    for (entry, run) in config.groups.iter().zip(runs) {
        timing.push(GroupTiming { group: entry.definition().label(), millis: run.millis });
        outcomes.extend(run.outcomes);
        violations.extend(run.violations);
        sharpness.extend(run.sharpness);
        series.extend(run.series);
        sup_readings.extend(run.sup_readings);
        skipped.extend(run.skipped);
    }
    outcomes.sort_by_key(sort_key);
    violations.sort_by_key(sort_key);
    sharpness.sort_by_key(sort_key);
    series.sort_by(|a, b| (&a.group, a.k).cmp(&(&b.group, b.k)));
    sup_readings.sort_by(|a, b| {
        (&a.group, a.k, a.subgroup_order, a.sup_all_shifts.to_string())
            .cmp(&(&b.group, b.k, b.subgroup_order, b.sup_all_shifts.to_string()))
    });
    sup_readings.dedup();
    skipped.sort_by(|a, b| (&a.group, &a.check, &a.params).cmp(&(&b.group, &b.check, &b.params)));
    let findings: Vec<CheckOutcome> = outcomes.iter().filter(|o| o.is_finding()).cloned().collect();
    let summary = Summary {
        groups: config.groups.len(),
        checks: outcomes.len(),
        passed: outcomes.iter().filter(|o| o.holds).count(),
        violations: violations.len(),
        findings: findings.len(),
        skipped: skipped.len(),
        sharpness: sharpness.len(),
    };
    VerificationReport {
        summary,
        outcomes,
        violations,
        findings,
        sharpness,
        series,
        sup_readings,
        skipped,
        environment: Environment {
            seed: config.seed,
            budgets: config.budgets,
            version: env!("CARGO_PKG_VERSION").to_string(),
            parallel: cfg!(feature = "parallel"),
        },
        timing,
    }
}
