//! Commutators, centralizers, conjugacy classes, subgroups, quotients and
//! the lower central series of a [`GroupTable`].

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Elem, GroupTable, IDENTITY};

/// Default cap on the order of groups whose normal subgroups are enumerated.
pub const DEFAULT_NORMAL_SUBGROUP_CAP: usize = 512;

/// A subgroup, as the sorted list of its element indices in the parent.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct SubgroupRef {
    elements: Vec<Elem>,
}

impl std::fmt::Debug for SubgroupRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SubgroupRef(order {}: {:?})", self.elements.len(), self.elements)
    }
}

impl From<SubgroupRef> for Vec<usize> {
    fn from(s: SubgroupRef) -> Self {
        s.elements
    }
}

impl TryFrom<Vec<usize>> for SubgroupRef {
    type Error = Error;
    fn try_from(mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.first() != Some(&IDENTITY) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        Ok(SubgroupRef { elements })
    }
}

impl SubgroupRef {
    pub fn whole(g: &GroupTable) -> Self {
        SubgroupRef { elements: g.elements().collect() }
    }

    pub fn trivial() -> Self {
        SubgroupRef { elements: vec![IDENTITY] }
    }

    /// Checks closure under products and inverses in `g`.
    pub fn from_elements(g: &GroupTable, elements: Vec<Elem>) -> Result<Self> {
        if let Some(&bad) = elements.iter().find(|&&x| x >= g.order()) {
            return Err(Error::NotASubgroup(format!("element {bad} out of range")));
        }
        let s = SubgroupRef::try_from(elements)?;
        let mask = s.mask(g.order());
        for &a in &s.elements {
            if !mask[g.inv(a)] {
                return Err(Error::NotASubgroup(format!("inverse of {a} missing")));
            }
            for &b in &s.elements {
                if !mask[g.mul(a, b)] {
                    return Err(Error::NotASubgroup(format!("product {a}·{b} missing")));
                }
            }
        }
        Ok(s)
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subset_of(&self, other: &SubgroupRef) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// Membership bitmap over the parent's elements.
    pub fn mask(&self, parent_order: usize) -> Vec<bool> {
        let mut m = vec![false; parent_order];
        for &x in &self.elements {
            m[x] = true;
        }
        m
    }

    pub fn is_normal_in(&self, g: &GroupTable) -> bool {
        self.normality_witness(g).is_none()
    }

    fn normality_witness(&self, g: &GroupTable) -> Option<(Elem, Elem)> {
        let mask = self.mask(g.order());
        for &x in &self.elements {
            for c in g.elements() {
                if !mask[g.conjugate(x, c)] {
                    return Some((x, c));
                }
            }
        }
        None
    }

    /// The subgroup as a group in its own right; element `i` of the result
    /// is `self.elements()[i]`.
    pub fn as_group(&self, g: &GroupTable, label: impl Into<String>) -> GroupTable {
        let pos = |x: Elem| self.elements.binary_search(&x).expect("closed subgroup");
        GroupTable::from_trusted(self.order(), label.into(), |a, b| {
            pos(g.mul(self.elements[a], self.elements[b]))
        })
    }

    /// Left cosets `xH`, ordered by their least element; returns the least
    /// elements and, for every element of `g`, the index of its coset.
    pub fn left_cosets(&self, g: &GroupTable) -> (Vec<Elem>, Vec<usize>) {
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for x in g.elements() {
            if coset_of[x] != usize::MAX {
                continue;
            }
            for &h in &self.elements {
                coset_of[g.mul(x, h)] = reps.len();
            }
            reps.push(x);
        }
        (reps, coset_of)
    }
}

/// Conjugacy-class data for a group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassData {
    pub class_of: Vec<usize>,
    /// Least element of each class.
    pub reps: Vec<Elem>,
    pub sizes: Vec<usize>,
    pub centralizer_order: Vec<usize>,
}

impl ClassData {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// A quotient `G/N` together with the projection.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub kernel: SubgroupRef,
    pub target: GroupTable,
    pub project: Vec<Elem>,
}

/// Wire form of a [`QuotientMap`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct QuotientSpec {
    pub kernel: SubgroupRef,
    pub projection: Vec<Elem>,
}

impl QuotientMap {
    pub fn spec(&self) -> QuotientSpec {
        QuotientSpec { kernel: self.kernel.clone(), projection: self.project.clone() }
    }

    pub fn project(&self, x: Elem) -> Elem {
        self.project[x]
    }

    /// Image of a subgroup of the source.
    pub fn image(&self, h: &SubgroupRef) -> SubgroupRef {
        let set: BTreeSet<Elem> = h.elements().iter().map(|&x| self.project[x]).collect();
        SubgroupRef { elements: set.into_iter().collect() }
    }
}

pub fn commutator(g: &GroupTable, a: Elem, b: Elem) -> Elem {
    g.commutator(a, b)
}

/// `[[x₁, x₂], …, x_m]`; a single element is returned unchanged.
pub fn left_normed_commutator(g: &GroupTable, xs: &[Elem]) -> Result<Elem> {
    let (&first, rest) = xs.split_first().ok_or(Error::EmptyInput("commutator list"))?;
    Ok(rest.iter().fold(first, |acc, &x| g.commutator(acc, x)))
}

pub fn centralizer(g: &GroupTable, x: Elem) -> SubgroupRef {
    SubgroupRef { elements: g.elements().filter(|&a| g.mul(a, x) == g.mul(x, a)).collect() }
}

pub fn center(g: &GroupTable) -> SubgroupRef {
    SubgroupRef {
        elements: g
            .elements()
            .filter(|&z| g.elements().all(|a| g.mul(a, z) == g.mul(z, a)))
            .collect(),
    }
}

pub fn conjugacy_classes(g: &GroupTable) -> ClassData {
    let n = g.order();
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for x in g.elements() {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        let mut size = 0;
        for c in g.elements() {
            let y = g.conjugate(x, c);
            if class_of[y] == usize::MAX {
                class_of[y] = id;
                size += 1;
            }
        }
        reps.push(x);
        sizes.push(size);
    }
    let centralizer_order = sizes.iter().map(|s| n / s).collect();
    ClassData { class_of, reps, sizes, centralizer_order }
}

/// Smallest subgroup containing `seeds`.
pub fn subgroup_closure(g: &GroupTable, seeds: &[Elem]) -> SubgroupRef {
    extend_closure(g, &[IDENTITY], seeds)
}

/// Closure of `base ∪ gens`, where `base` is already a subgroup or `{1}`.
fn extend_closure(g: &GroupTable, base: &[Elem], gens: &[Elem]) -> SubgroupRef {
    let mut gens: Vec<Elem> = gens.iter().copied().filter(|&x| x != IDENTITY).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut seen = vec![false; g.order()];
    let mut queue: VecDeque<Elem> = VecDeque::new();
    for &b in base {
        if !seen[b] {
            seen[b] = true;
            queue.push_back(b);
        }
    }
    let mut all_gens = gens.clone();
    if base.len() > 1 {
        all_gens.extend(base.iter().copied().filter(|&x| x != IDENTITY));
    }
    while let Some(x) = queue.pop_front() {
        for &s in &all_gens {
            let y = g.mul(x, s);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    SubgroupRef { elements: (0..g.order()).filter(|&x| seen[x]).collect() }
}

/// All normal subgroups, sorted by order then elements.
pub fn normal_subgroups(g: &GroupTable) -> Result<Vec<SubgroupRef>> {
    normal_subgroups_capped(g, DEFAULT_NORMAL_SUBGROUP_CAP)
}

/// Every normal subgroup is a join of normal closures of single classes, so
/// joining class closures onto known normal subgroups until nothing new
/// appears reaches all of them.
pub fn normal_subgroups_capped(g: &GroupTable, cap: usize) -> Result<Vec<SubgroupRef>> {
    if g.order() > cap {
        return Err(Error::OrderExceeded { order_lower_bound: g.order() as u128, cap });
    }
    let classes = conjugacy_classes(g);
    let mut class_members: Vec<Vec<Elem>> = vec![Vec::new(); classes.count()];
    for x in g.elements() {
        class_members[classes.class_of[x]].push(x);
    }
    let mut minimal: Vec<SubgroupRef> = Vec::new();
    for members in class_members.iter().skip(1) {
        let c = subgroup_closure(g, members);
        if !minimal.contains(&c) {
            minimal.push(c);
        }
    }
    let mut found: HashSet<SubgroupRef> = HashSet::new();
    found.insert(SubgroupRef::trivial());
    let mut queue: VecDeque<SubgroupRef> = VecDeque::new();
    for m in &minimal {
        if found.insert(m.clone()) {
            queue.push_back(m.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        let mask = x.mask(g.order());
        for m in &minimal {
            if m.elements.iter().all(|&e| mask[e]) {
                continue;
            }
            let gens: Vec<Elem> = m.elements.iter().copied().filter(|&e| !mask[e]).collect();
            let joined = extend_closure(g, &x.elements, &gens);
            if found.insert(joined.clone()) {
                queue.push_back(joined);
            }
        }
    }
    let mut out: Vec<SubgroupRef> = found.into_iter().collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(out)
}

/// Cyclic subgroups `⟨x⟩`, deduplicated and sorted like [`normal_subgroups`].
pub fn cyclic_subgroups(g: &GroupTable) -> Vec<SubgroupRef> {
    let set: BTreeSet<SubgroupRef> = g.elements().map(|x| subgroup_closure(g, &[x])).collect();
    let mut out: Vec<SubgroupRef> = set.into_iter().collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    out
}

/// `G/N`, with cosets ordered by least element (identity coset first).
pub fn quotient(g: &GroupTable, n: &SubgroupRef) -> Result<QuotientMap> {
    if let Some((element, conjugator)) = n.normality_witness(g) {
        return Err(Error::NotNormal { element, conjugator });
    }
    let (reps, project) = n.left_cosets(g);
    let label = if n.is_trivial() {
        g.label().to_string()
    } else {
        format!("{}/N{}", g.label(), n.order())
    };
    let target = GroupTable::from_trusted(reps.len(), label, |a, b| project[g.mul(reps[a], reps[b])]);
    Ok(QuotientMap { kernel: n.clone(), target, project })
}

/// Lower central series of the subgroup `h` of `g`.
///
/// The chain ends at the first trivial term, or repeats the stable term
/// once when the series stops above `1`.
pub fn lower_central_series_of(g: &GroupTable, h: &SubgroupRef) -> Vec<SubgroupRef> {
    let mut chain = vec![h.clone()];
    loop {
        let last = chain.last().expect("nonempty");
        if last.is_trivial() {
            break;
        }
        let mut comms: Vec<Elem> = Vec::new();
        let mut seen = vec![false; g.order()];
        for &a in last.elements() {
            for &b in h.elements() {
                let c = g.commutator(a, b);
                if !seen[c] {
                    seen[c] = true;
                    comms.push(c);
                }
            }
        }
        let next = subgroup_closure(g, &comms);
        let stable = &next == last;
        chain.push(next);
        if stable {
            break;
        }
    }
    chain
}

pub fn lower_central_series(g: &GroupTable) -> Vec<SubgroupRef> {
    lower_central_series_of(g, &SubgroupRef::whole(g))
}

/// Nilpotency class of `h ≤ g`, `None` if `h` is not nilpotent.
pub fn nilpotency_class_of(g: &GroupTable, h: &SubgroupRef) -> Option<usize> {
    let chain = lower_central_series_of(g, h);
    chain.last().expect("nonempty").is_trivial().then(|| chain.len() - 1)
}

pub fn nilpotency_class(g: &GroupTable) -> Option<usize> {
    nilpotency_class_of(g, &SubgroupRef::whole(g))
}

/// The `c`-th lower central term `γ_c(h)`, `c ≥ 1`.
pub fn lower_central_term(g: &GroupTable, h: &SubgroupRef, c: usize) -> SubgroupRef {
    let chain = lower_central_series_of(g, h);
    chain.get(c - 1).unwrap_or_else(|| chain.last().expect("nonempty")).clone()
}

/// `|y·C_G(x) ∩ H|`, always `0` or `|C_H(x)|`.
pub fn coset_intersection_size(g: &GroupTable, h: &SubgroupRef, y: Elem, x: Elem) -> usize {
    let mask = h.mask(g.order());
    g.elements()
        .filter(|&c| g.mul(c, x) == g.mul(x, c) && mask[g.mul(y, c)])
        .count()
}
