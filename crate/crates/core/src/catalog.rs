//! Built-in groups, each defined by fixed permutation generators.
//!
//! | name       | order  | generators                                                     |
//! |------------|--------|----------------------------------------------------------------|
//! | `C(n)`     | n      | `(0 1 … n−1)` on n points                                      |
//! | `D(2n)`    | 2n     | n ≥ 3: rotation `(0 1 … n−1)`, reflection `i ↦ −i mod n`;       |
//! |            |        | `D(2) = ⟨(0 1)⟩`, `D(4) = ⟨(0 1), (2 3)⟩`                        |
//! | `Dic(n)`   | 4n     | left-regular action on `a^i x^j`: `a` and `x` with `x² = aⁿ`    |
//! | `Q8`       | 8      | same as `Dic(2)`                                               |
//! | `S(n)`     | n!     | `(0 1)`, `(0 1 … n−1)`, n ≤ 8                                  |
//! | `A(n)`     | n!/2   | `(0 1 i)` for i = 2 … n−1, n ≤ 8                               |
//! | `Heis(p)`  | p³     | unitriangular `E₁₂`, `E₂₃` acting on row vectors of `F_p³`      |
//! | `SL(2,3)`  | 24     | `[[1,1],[0,1]]`, `[[1,0],[1,1]]` on nonzero vectors of `F_3²`   |
//!
//! Products are written `A x B` (or `A × B`) and built with
//! [`direct_product`], left-associated.

use crate::error::{Error, Result};
use crate::group::{build_from_perm_gens, direct_product_capped, GroupTable, DEFAULT_MAX_ORDER};
use crate::perm::Permutation;

/// One catalog family, for listings.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CatalogFamily {
    pub pattern: &'static str,
    pub order: &'static str,
    pub description: &'static str,
}

pub fn families() -> Vec<CatalogFamily> {
    vec![
        CatalogFamily { pattern: "C(n)", order: "n", description: "cyclic group, n ≥ 1" },
        CatalogFamily { pattern: "D(2n)", order: "2n", description: "dihedral group of order 2n, n ≥ 1" },
        CatalogFamily { pattern: "Q8", order: "8", description: "quaternion group" },
        CatalogFamily { pattern: "Dic(n)", order: "4n", description: "dicyclic group, n ≥ 1" },
        CatalogFamily { pattern: "S(n)", order: "n!", description: "symmetric group, 1 ≤ n ≤ 8" },
        CatalogFamily { pattern: "A(n)", order: "n!/2", description: "alternating group, 1 ≤ n ≤ 8" },
        CatalogFamily { pattern: "Heis(p)", order: "p³", description: "Heisenberg group, p ∈ {2, 3, 5}" },
        CatalogFamily { pattern: "SL(2,3)", order: "24", description: "special linear group over F_3" },
        CatalogFamily { pattern: "G x H", order: "|G|·|H|", description: "direct product of catalog groups" },
    ]
}

/// Largest order in the default verification corpus.
pub const DEFAULT_CORPUS_MAX_ORDER: usize = 64;

/// Direct products included in the default corpus.
pub const DEFAULT_PRODUCTS: &[&str] = &[
    "C(2)xC(2)", "C(2)xC(4)", "C(2)xC(2)xC(2)", "C(3)xC(3)", "C(2)xC(6)", "C(4)xC(4)", "C(2)xC(8)",
    "C(2)xC(2)xC(4)", "C(2)xC(2)xC(2)xC(2)", "D(8)xC(2)", "Q8xC(2)", "S(3)xC(3)", "S(3)xC(2)xC(2)",
    "S(3)xS(3)", "A(4)xC(2)", "A(4)xC(3)", "Q8xC(3)", "D(8)xC(3)", "S(4)xC(2)", "SL(2,3)xC(2)",
    "Q8xC(2)xC(2)", "D(8)xC(2)xC(2)", "D(8)xS(3)", "Q8xS(3)", "A(4)xC(4)", "Heis(3)xC(2)",
    "Q8xQ8", "D(8)xD(8)", "D(8)xQ8", "Q8xC(8)",
];

/// Catalog names of the default verification corpus: every non-product
/// catalog name of order at most 64 (isomorphic aliases included), then
/// [`DEFAULT_PRODUCTS`].
pub fn default_corpus() -> Vec<String> {
    let max = DEFAULT_CORPUS_MAX_ORDER;
    let mut names: Vec<String> = (1..=max).map(|n| format!("C({n})")).collect();
    names.extend((1..=max / 2).map(|n| format!("D({})", 2 * n)));
    names.push("Q8".into());
    names.extend((1..=max / 4).map(|n| format!("Dic({n})")));
    names.extend((1..=4).map(|n| format!("S({n})")));
    names.extend((1..=5).map(|n| format!("A({n})")));
    names.extend(["Heis(2)", "Heis(3)", "SL(2,3)"].map(String::from));
    names.extend(DEFAULT_PRODUCTS.iter().map(|s| s.to_string()));
    names
}

fn canonical(name: &str) -> String {
    name.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('×', "x")
}

/// Splits a product expression at top-level `x`.
fn split_product(name: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in name.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            'x' if depth == 0 => {
                parts.push(&name[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&name[start..]);
    parts
}

fn parse_call<'a>(name: &'a str, head: &str) -> Option<&'a str> {
    name.strip_prefix(head)?.strip_prefix('(')?.strip_suffix(')')
}

fn parse_arg(name: &str, head: &str) -> Option<usize> {
    parse_call(name, head)?.parse().ok()
}

fn cycle(degree: usize, points: impl IntoIterator<Item = usize>) -> Permutation {
    let pts: Vec<usize> = points.into_iter().collect();
    Permutation::from_cycles(degree, &[&pts]).expect("catalog cycle")
}

fn from_fn(degree: usize, f: impl Fn(usize) -> usize) -> Permutation {
    Permutation::from_images((0..degree).map(f).collect()).expect("catalog permutation")
}

fn cyclic(n: usize) -> Vec<Permutation> {
    if n == 1 {
        return vec![Permutation::identity(1)];
    }
    vec![cycle(n, 0..n)]
}

fn dihedral(order: usize) -> Option<Vec<Permutation>> {
    if order == 0 || !order.is_multiple_of(2) {
        return None;
    }
    let n = order / 2;
    Some(match n {
        1 => vec![cycle(2, [0, 1])],
        2 => vec![cycle(4, [0, 1]), cycle(4, [2, 3])],
        _ => vec![cycle(n, 0..n), from_fn(n, |i| (n - i) % n)],
    })
}

fn dicyclic(n: usize) -> Option<Vec<Permutation>> {
    if n == 0 {
        return None;
    }
    let m = 2 * n;
    // point a^i x^j lives at i + m·j
    let a = from_fn(2 * m, |p| {
        let (i, j) = (p % m, p / m);
        (i + 1) % m + m * j
    });
    let x = from_fn(2 * m, |p| {
        let (i, j) = (p % m, p / m);
        if j == 0 {
            (m - i) % m + m
        } else {
            (n + m - i) % m
        }
    });
    Some(vec![a, x])
}

fn symmetric(n: usize) -> Option<Vec<Permutation>> {
    match n {
        0 => None,
        1 => Some(vec![Permutation::identity(1)]),
        2 => Some(vec![cycle(2, [0, 1])]),
        3..=8 => Some(vec![cycle(n, [0, 1]), cycle(n, 0..n)]),
        _ => None,
    }
}

fn alternating(n: usize) -> Option<Vec<Permutation>> {
    match n {
        0 => None,
        1 | 2 => Some(vec![Permutation::identity(n)]),
        3..=8 => Some((2..n).map(|i| cycle(n, [0, 1, i])).collect()),
        _ => None,
    }
}

fn heisenberg(p: usize) -> Option<Vec<Permutation>> {
    if ![2, 3, 5].contains(&p) {
        return None;
    }
    let idx = |a: usize, b: usize, c: usize| a + p * b + p * p * c;
    let split = |v: usize| (v % p, (v / p) % p, v / (p * p));
    let e12 = from_fn(p * p * p, |v| {
        let (a, b, c) = split(v);
        idx(a, (a + b) % p, c)
    });
    let e23 = from_fn(p * p * p, |v| {
        let (a, b, c) = split(v);
        idx(a, b, (b + c) % p)
    });
    Some(vec![e12, e23])
}

fn sl23() -> Vec<Permutation> {
    // nonzero (a, b) ∈ F_3² at index a + 3b − 1
    let split = |v: usize| ((v + 1) % 3, (v + 1) / 3);
    let idx = |a: usize, b: usize| a + 3 * b - 1;
    let upper = from_fn(8, |v| {
        let (a, b) = split(v);
        idx((a + b) % 3, b)
    });
    let lower = from_fn(8, |v| {
        let (a, b) = split(v);
        idx(a, (a + b) % 3)
    });
    vec![upper, lower]
}

fn atomic_gens(name: &str) -> Option<Vec<Permutation>> {
    if name == "Q8" {
        return dicyclic(2);
    }
    if name == "SL(2,3)" {
        return Some(sl23());
    }
    if let Some(n) = parse_arg(name, "C") {
        return (n >= 1).then(|| cyclic(n));
    }
    if let Some(n) = parse_arg(name, "D") {
        return dihedral(n);
    }
    if let Some(n) = parse_arg(name, "Dic") {
        return dicyclic(n);
    }
    if let Some(n) = parse_arg(name, "S") {
        return symmetric(n);
    }
    if let Some(n) = parse_arg(name, "A") {
        return alternating(n);
    }
    if let Some(p) = parse_arg(name, "Heis") {
        return heisenberg(p);
    }
    None
}

/// Permutation generators for a catalog name. Products act on the
/// disjoint union of the factors' points.
pub fn catalog_perm_gens(name: &str) -> Result<Vec<Permutation>> {
    let name = canonical(name);
    let mut out: Vec<Permutation> = Vec::new();
    let mut offset = 0;
    let factors: Vec<Vec<Permutation>> = split_product(&name)
        .into_iter()
        .map(|f| atomic_gens(f).ok_or_else(|| Error::UnknownCatalogName(name.clone())))
        .collect::<Result<_>>()?;
    let total: usize = factors.iter().map(|f| f[0].degree()).sum();
    for gens in factors {
        let d = gens[0].degree();
        for g in &gens {
            out.push(from_fn(total, |p| {
                if (offset..offset + d).contains(&p) {
                    offset + g.apply(p - offset)
                } else {
                    p
                }
            }));
        }
        offset += d;
    }
    Ok(out)
}

pub fn catalog_get(name: &str) -> Result<GroupTable> {
    catalog_get_capped(name, DEFAULT_MAX_ORDER)
}

pub fn catalog_get_capped(name: &str, max_order: usize) -> Result<GroupTable> {
    let name = canonical(name);
    let mut factors = split_product(&name).into_iter().map(|f| {
        let gens = atomic_gens(f).ok_or_else(|| Error::UnknownCatalogName(name.clone()))?;
        build_from_perm_gens(&gens, f, max_order)
    });
    let mut acc = factors.next().expect("at least one factor")?;
    for f in factors {
        acc = direct_product_capped(&acc, &f?, max_order)?;
    }
    Ok(acc.with_label(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn census(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn orders() {
        for (name, n) in [
            ("C(1)", 1),
            ("C(7)", 7),
            ("D(2)", 2),
            ("D(4)", 4),
            ("D(8)", 8),
            ("D(10)", 10),
            ("Q8", 8),
            ("Dic(1)", 4),
            ("Dic(3)", 12),
            ("S(1)", 1),
            ("S(4)", 24),
            ("A(2)", 1),
            ("A(5)", 60),
            ("A(7)", 2520),
            ("Heis(2)", 8),
            ("Heis(3)", 27),
            ("Heis(5)", 125),
            ("SL(2,3)", 24),
            ("S(3) x S(3)", 36),
            ("C(2)×C(2)×C(2)", 8),
        ] {
            assert_eq!(catalog_get(name).unwrap().order(), n, "{name}");
        }
    }

    #[test]
    fn documented_censuses() {
        let table = [
            ("Q8", census(&[(1, 1), (2, 1), (4, 6)])),
            ("S(3)", census(&[(1, 1), (2, 3), (3, 2)])),
            ("D(8)", census(&[(1, 1), (2, 5), (4, 2)])),
            ("Heis(2)", census(&[(1, 1), (2, 5), (4, 2)])),
            ("A(4)", census(&[(1, 1), (2, 3), (3, 8)])),
            ("S(4)", census(&[(1, 1), (2, 9), (3, 8), (4, 6)])),
            ("A(5)", census(&[(1, 1), (2, 15), (3, 20), (5, 24)])),
            ("SL(2,3)", census(&[(1, 1), (2, 1), (3, 8), (4, 6), (6, 8)])),
            ("Heis(3)", census(&[(1, 1), (3, 26)])),
            ("Dic(3)", census(&[(1, 1), (2, 1), (3, 2), (4, 6), (6, 2)])),
            ("C(6)", census(&[(1, 1), (2, 1), (3, 2), (6, 2)])),
        ];
        for (name, expected) in table {
            assert_eq!(catalog_get(name).unwrap().order_census(), expected, "{name}");
        }
    }

    #[test]
    fn rejects_unknown_names() {
        for bad in ["X(3)", "S(9)", "C(0)", "D(7)", "Heis(7)", "Q8xZ", "", "S(3"] {
            assert!(matches!(catalog_get(bad), Err(Error::UnknownCatalogName(_))), "{bad}");
        }
        assert!(matches!(catalog_get("S(8)"), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn product_generators_are_disjoint() {
        let gens = catalog_perm_gens("S(3)xC(2)").unwrap();
        let g = build_from_perm_gens(&gens, "p", 100).unwrap();
        assert_eq!(g.order(), 12);
        assert_eq!(catalog_perm_gens("S(8)").unwrap().len(), 2);
    }

    #[test]
    fn default_corpus_resolves() {
        let names = default_corpus();
        for name in &names {
            let g = catalog_get(name).unwrap();
            assert!(g.order() <= DEFAULT_CORPUS_MAX_ORDER, "{name}");
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }
}
