use nilprob_core::catalog::catalog_get;
use nilprob_core::group::{direct_product, Elem, GroupTable};
use nilprob_core::nilprob::{
    commutator_distribution, cp, cp_subgroup, np_bruteforce, np_fast, np_k, np_table, Budgets, ShiftTuple,
};
use nilprob_core::prob::ExactProb;
use nilprob_core::structure::{center, cyclic_subgroups, normal_subgroups, quotient, SubgroupRef};
use nilprob_core::verify::centralizer_in_center;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SMALL: &[&str] = &[
    "C(1)", "C(2)", "C(4)", "C(2)xC(2)", "C(6)", "S(3)", "D(8)", "Q8", "D(10)", "Dic(3)", "A(4)", "D(12)",
    "C(2)xC(2)xC(2)", "D(16)", "Dic(4)", "Q8xC(2)", "D(8)xC(2)", "S(3)xC(3)", "S(4)", "SL(2,3)",
];

fn b() -> Budgets {
    Budgets::default()
}

/// Fraction of `y ∈ H^{len}` with trivial left-normed `[x₁y₁, …]`, by odometer.
fn oracle(g: &GroupTable, h: &SubgroupRef, shifts: &[Elem]) -> ExactProb {
    let hs = h.elements();
    let len = shifts.len();
    let mut idx = vec![0usize; len];
    let mut hits = 0u64;
    let mut total = 0u64;
    loop {
        let mut acc = g.mul(shifts[0], hs[idx[0]]);
        for i in 1..len {
            let b = g.mul(shifts[i], hs[idx[i]]);
            acc = g.mul(g.mul(g.inv(acc), g.inv(b)), g.mul(acc, b));
        }
        total += 1;
        hits += u64::from(acc == 0);
        let mut pos = len;
        loop {
            if pos == 0 {
                return ExactProb::new(hits, total).unwrap();
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < hs.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn subgroups(g: &GroupTable) -> Vec<SubgroupRef> {
    let mut all = normal_subgroups(g).unwrap();
    all.extend(cyclic_subgroups(g));
    all.sort();
    all.dedup();
    all
}

#[test]
fn dp_matches_enumeration_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in SMALL {
        let g = catalog_get(name).unwrap();
        for h in subgroups(&g) {
            for k in 1..=3usize {
                if h.order().pow(k as u32 + 1) > 400_000 {
                    continue;
                }
                for _ in 0..3 {
                    let s: Vec<Elem> = (0..=k).map(|_| rng.random_range(0..g.order())).collect();
                    let want = oracle(&g, &h, &s);
                    let shifts = ShiftTuple(s);
                    assert_eq!(np_fast(&g, &h, &shifts, k, &b()).unwrap().value, want, "{name} {shifts:?}");
                    assert_eq!(np_bruteforce(&g, &h, &shifts, k, &b()).unwrap().value, want, "{name} {shifts:?}");
                }
            }
        }
    }
}

#[test]
fn shift_invariance_for_whole_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in SMALL {
        let g = catalog_get(name).unwrap();
        let whole = SubgroupRef::whole(&g);
        for k in 1..=2usize {
            let base = np_k(&g, k, &b()).unwrap().value;
            for _ in 0..50 {
                let s = ShiftTuple((0..=k).map(|_| rng.random_range(0..g.order())).collect());
                assert_eq!(np_bruteforce(&g, &whole, &s, k, &b()).unwrap().value, base, "{name} {s:?}");
            }
        }
    }
}

#[test]
fn values_depend_on_cosets_only() {
    for name in ["S(3)", "D(8)", "A(4)", "Dic(3)", "S(4)"] {
        let g = catalog_get(name).unwrap();
        for h in subgroups(&g) {
            let table = np_table(&g, &h, 1, &b()).unwrap();
            for i in 0..table.tuples() {
                let reps = table.tuple(i);
                let want = table.value(i);
                for &y in h.elements() {
                    for slot in 0..2 {
                        let mut s = reps.clone();
                        s.0[slot] = g.mul(s.0[slot], y);
                        assert_eq!(np_bruteforce(&g, &h, &s, 1, &b()).unwrap().value, want);
                    }
                }
            }
        }
    }
}

#[test]
fn pairs_bounded_by_commuting_probability() {
    for name in SMALL {
        let g = catalog_get(name).unwrap();
        for h in subgroups(&g) {
            let bound = cp_subgroup(&g, &h);
            let table = np_table(&g, &h, 1, &b()).unwrap();
            for i in 0..table.tuples() {
                assert!(table.value(i) <= bound, "{name} |H|={} {:?}", h.order(), table.tuple(i));
            }
        }
    }
}

#[test]
fn center_recursion_under_its_hypothesis() {
    for name in SMALL {
        let g = catalog_get(name).unwrap();
        let z = center(&g);
        for h in subgroups(&g).into_iter().filter(|h| centralizer_in_center(&g, h, &z)) {
            let kernel = SubgroupRef::from_elements(
                &g,
                h.elements().iter().copied().filter(|&x| z.contains(x)).collect(),
            )
            .unwrap();
            let q = quotient(&g, &kernel).unwrap();
            let h_bar = q.image(&h);
            for k in 1..=3usize {
                let lhs = np_table(&g, &h, k, &b()).unwrap();
                for i in 0..lhs.tuples() {
                    let s = lhs.tuple(i);
                    let projected: Vec<Elem> = s.0[..k].iter().map(|&x| q.project(x)).collect();
                    let rhs = oracle(&q.target, &h_bar, &projected).half_up();
                    assert!(lhs.value(i) <= rhs, "{name} |H|={} k={k} {s:?}", h.order());
                }
            }
        }
    }
}

#[test]
fn whole_group_satisfies_hypothesis() {
    for name in SMALL {
        let g = catalog_get(name).unwrap();
        assert!(centralizer_in_center(&g, &SubgroupRef::whole(&g), &center(&g)));
    }
}

#[test]
fn direct_products_multiply() {
    let pairs = [("S(3)", "S(3)"), ("S(3)", "Q8"), ("D(8)", "C(3)"), ("A(4)", "C(2)")];
    for (a, c) in pairs {
        let ga = catalog_get(a).unwrap();
        let gc = catalog_get(c).unwrap();
        let prod = direct_product(&ga, &gc).unwrap();
        for k in 1..=3 {
            let lhs = np_k(&prod, k, &b()).unwrap().value;
            let rhs = &np_k(&ga, k, &b()).unwrap().value * &np_k(&gc, k, &b()).unwrap().value;
            assert_eq!(lhs, rhs, "{a} x {c} k={k}");
        }
    }
    let s3s3 = catalog_get("S(3)xS(3)").unwrap();
    assert_eq!(np_k(&s3s3, 2, &b()).unwrap().value, "9/16".parse().unwrap());
    assert_eq!(cp(&s3s3), "1/4".parse().unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distribution_mass_is_conserved(gi in 0usize..SMALL.len(), seed in any::<u64>(), k in 1usize..4) {
        let g = catalog_get(SMALL[gi]).unwrap();
        let hs = subgroups(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = &hs[rng.random_range(0..hs.len())];
        let s = ShiftTuple((0..=k).map(|_| rng.random_range(0..g.order())).collect());
        for m in 1..=k {
            let d = commutator_distribution(&g, h, &s, m, &b()).unwrap();
            prop_assert_eq!(d.mass(), BigUint::from(h.order()).pow(m as u32));
        }
    }

    #[test]
    fn fast_and_brute_force_agree(gi in 0usize..SMALL.len(), seed in any::<u64>(), k in 1usize..4) {
        let g = catalog_get(SMALL[gi]).unwrap();
        let hs = subgroups(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = &hs[rng.random_range(0..hs.len())];
        prop_assume!(h.order().pow(k as u32 + 1) <= 400_000);
        let s = ShiftTuple((0..=k).map(|_| rng.random_range(0..g.order())).collect());
        let fast = np_fast(&g, h, &s, k, &b()).unwrap();
        let slow = np_bruteforce(&g, h, &s, k, &b()).unwrap();
        prop_assert_eq!(fast.value, slow.value);
        prop_assert_eq!(fast.counted, slow.counted);
    }

    #[test]
    fn np_is_monotone_in_k(gi in 0usize..SMALL.len(), k in 1usize..4) {
        let g = catalog_get(SMALL[gi]).unwrap();
        prop_assert!(np_k(&g, k, &b()).unwrap().value <= np_k(&g, k + 1, &b()).unwrap().value);
    }
}
