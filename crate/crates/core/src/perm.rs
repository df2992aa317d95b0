//! Permutations and Schreier–Sims stabilizer chains.
//!
//! Composition is left to right: `p.then(&q)` applies `p` first and `q`
//! second, so `p.then(&q).apply(x) == q.apply(p.apply(x))`. Group tables
//! built from permutations use the same convention for their product.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `{0, …, degree − 1}`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    image: Vec<u32>,
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let image = Vec::<usize>::deserialize(d)?;
        Permutation::from_images(image).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut any = false;
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { image: (0..degree as u32).collect() }
    }

    pub fn from_images(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "{image:?} is not a bijection on 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { image: image.into_iter().map(|x| x as u32).collect() })
    }

    /// Builds a permutation of the given degree from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut image: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                if a >= degree || b >= degree || touched[a] {
                    return Err(Error::InvalidPermutation(format!(
                        "cycles {cycles:?} are not disjoint cycles on 0..{degree}"
                    )));
                }
                touched[a] = true;
                image[a] = b;
            }
        }
        Permutation::from_images(image)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.image.iter().map(|&x| x as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.images().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Smallest point moved by `self`.
    pub fn first_moved(&self) -> Option<usize> {
        self.image.iter().enumerate().position(|(i, &x)| i as u32 != x)
    }

    /// Apply `self`, then `other`. Panics on a degree mismatch; see [`compose`].
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation { image: self.image.iter().map(|&x| other.image[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0u32; self.degree()];
        for (i, &x) in self.image.iter().enumerate() {
            image[x as usize] = i as u32;
        }
        Permutation { image }
    }

    /// `a⁻¹ b⁻¹ a b` in the left-to-right convention.
    pub fn commutator(&self, other: &Permutation) -> Permutation {
        self.inverse().then(&other.inverse()).then(self).then(other)
    }
}

/// Checked composition: apply `p`, then `q`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation> {
    if p.degree() != q.degree() {
        return Err(Error::DegreeMismatch { left: p.degree(), right: q.degree() });
    }
    Ok(p.then(q))
}

pub fn inverse(p: &Permutation) -> Permutation {
    p.inverse()
}

/// Left-normed commutator `[[x₁, x₂], …, x_m]` of permutations.
pub fn left_normed_commutator(xs: &[Permutation]) -> Result<Permutation> {
    let (first, rest) = xs.split_first().ok_or(Error::EmptyInput("commutator list"))?;
    let mut acc = first.clone();
    for x in rest {
        if x.degree() != acc.degree() {
            return Err(Error::DegreeMismatch { left: acc.degree(), right: x.degree() });
        }
        acc = acc.commutator(x);
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
struct Level {
    point: usize,
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    /// `trans[β]` maps the base point to `β`.
    trans: Vec<Option<Permutation>>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut level = Level { point, gens: Vec::new(), orbit: Vec::new(), trans: vec![None; degree] };
        level.rebuild(degree);
        level
    }

    fn rebuild(&mut self, degree: usize) {
        self.trans = vec![None; degree];
        self.trans[self.point] = Some(Permutation::identity(degree));
        self.orbit = vec![self.point];
        let mut i = 0;
        while i < self.orbit.len() {
            let beta = self.orbit[i];
            for s in &self.gens {
                let gamma = s.apply(beta);
                if self.trans[gamma].is_none() {
                    let u = self.trans[beta].as_ref().expect("orbit point has a transversal").then(s);
                    self.trans[gamma] = Some(u);
                    self.orbit.push(gamma);
                }
            }
            i += 1;
        }
    }
}

/// A permutation group with a base and strong generating set.
#[derive(Debug, Clone)]
pub struct PermGroupBSGS {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
    order: BigUint,
}

impl PermGroupBSGS {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Strong generators, deduplicated, in order of first appearance.
    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut out: Vec<Permutation> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    /// Orbit sizes of the stabilizer chain, one per base point.
    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Sifts `p` from level `from`; returns the residue and the level at
    /// which sifting stopped (`levels.len()` if it passed every level).
    fn sift_from(&self, mut p: Permutation, from: usize) -> (Permutation, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let beta = p.apply(level.point);
            match &level.trans[beta] {
                Some(u) => p = p.then(&u.inverse()),
                None => return (p, i),
            }
        }
        (p, self.levels.len())
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch { left: self.degree, right: p.degree() });
        }
        let (residue, level) = self.sift_from(p.clone(), 0);
        Ok(level == self.levels.len() && residue.is_identity())
    }

    /// Exactly uniform element: one independently uniform coset
    /// representative per level, composed deepest level first.
    pub fn random_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let picks: Vec<usize> = self
            .levels
            .iter()
            .map(|l| l.orbit[rng.random_range(0..l.orbit.len())])
            .collect();
        let mut g = Permutation::identity(self.degree);
        for (level, &beta) in self.levels.iter().zip(&picks).rev() {
            g = g.then(level.trans[beta].as_ref().expect("orbit point"));
        }
        g
    }

    /// Every group element, in no particular order. Intended for small groups.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &beta in &level.orbit {
                let u = level.trans[beta].as_ref().expect("orbit point");
                for g in &out {
                    next.push(g.then(u));
                }
            }
            out = next;
        }
        out
    }
}

/// Deterministic Schreier–Sims. Base points are the smallest points moved
/// by the generator that forced a new level.
pub fn schreier_sims(gens: &[Permutation]) -> Result<PermGroupBSGS> {
    let first = gens.first().ok_or(Error::EmptyInput("generator list"))?;
    let degree = first.degree();
    for g in gens {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch { left: degree, right: g.degree() });
        }
    }
    let generators: Vec<Permutation> = gens.to_vec();
    let mut levels: Vec<Level> = Vec::new();
    for g in generators.iter().filter(|g| !g.is_identity()) {
        let fixes_base = levels.iter().all(|l| g.apply(l.point) == l.point);
        if fixes_base {
            let point = g.first_moved().expect("non-identity");
            levels.push(Level::new(point, degree));
        }
    }
    for i in 0..levels.len() {
        let prefix: Vec<usize> = levels[..i].iter().map(|l| l.point).collect();
        levels[i].gens = generators
            .iter()
            .filter(|g| !g.is_identity() && prefix.iter().all(|&b| g.apply(b) == b))
            .cloned()
            .collect();
        levels[i].rebuild(degree);
    }

    let mut bsgs = PermGroupBSGS { degree, generators, levels, order: BigUint::from(1u32) };
    let mut i = bsgs.levels.len();
    'outer: while i > 0 {
        let lvl = i - 1;
        let orbit = bsgs.levels[lvl].orbit.clone();
        let gens_here = bsgs.levels[lvl].gens.clone();
        for &beta in &orbit {
            let u_beta = bsgs.levels[lvl].trans[beta].clone().expect("orbit point");
            for s in &gens_here {
                let gamma = s.apply(beta);
                let u_beta_s = u_beta.then(s);
                let u_gamma = bsgs.levels[lvl].trans[gamma].as_ref().expect("orbit closed");
                if &u_beta_s == u_gamma {
                    continue;
                }
                let schreier = u_beta_s.then(&u_gamma.inverse());
                let (residue, stop) = bsgs.sift_from(schreier, lvl + 1);
                if residue.is_identity() && stop == bsgs.levels.len() {
                    continue;
                }
                if stop == bsgs.levels.len() {
                    let point = residue.first_moved().expect("non-identity residue");
                    bsgs.levels.push(Level::new(point, degree));
                }
                for l in lvl + 1..=stop {
                    bsgs.levels[l].gens.push(residue.clone());
                    bsgs.levels[l].rebuild(degree);
                }
                i = stop + 1;
                continue 'outer;
            }
        }
        i -= 1;
    }
    bsgs.order = bsgs.levels.iter().map(|l| BigUint::from(l.orbit.len())).product();
    Ok(bsgs)
}
