use nilprob_core::catalog::{catalog_get, catalog_perm_gens};
use nilprob_core::montecarlo::{estimate_np, estimate_np_chunked, DEFAULT_Z};
use nilprob_core::nilprob::{np_k, Budgets};
use nilprob_core::perm::schreier_sims;

#[test]
fn estimates_track_exact_values() {
    let names = ["S(3)", "D(8)", "Q8", "A(4)", "S(4)", "SL(2,3)", "D(8)xS(3)", "A(5)", "S(5)", "Heis(5)"];
    for (i, name) in names.iter().enumerate() {
        let exact_group = catalog_get(name).unwrap();
        let bsgs = schreier_sims(&catalog_perm_gens(name).unwrap()).unwrap();
        for k in 1..=2 {
            let exact = np_k(&exact_group, k, &Budgets::default()).unwrap().value.to_f64();
            let samples = 20_000u64;
            let r = estimate_np(&bsgs, k, samples, 1000 + i as u64, DEFAULT_Z).unwrap();
            let tol = 4.0 * (exact * (1.0 - exact) / samples as f64).sqrt();
            assert!((r.point - exact).abs() <= tol.max(1e-12), "{name} k={k}: {} vs {exact}", r.point);
        }
    }
}

#[cfg(feature = "parallel")]
#[test]
fn hits_do_not_depend_on_thread_count() {
    let g = schreier_sims(&catalog_perm_gens("S(4)").unwrap()).unwrap();
    let reference = estimate_np(&g, 1, 30_000, 5, DEFAULT_Z).unwrap();
    for threads in [1, 2, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let r = pool.install(|| estimate_np(&g, 1, 30_000, 5, DEFAULT_Z).unwrap());
        assert_eq!(r, reference);
    }
}

#[test]
fn chunk_plan_is_reported_and_reproducible() {
    let g = schreier_sims(&catalog_perm_gens("S(4)").unwrap()).unwrap();
    let a = estimate_np_chunked(&g, 1, 30_000, 5, DEFAULT_Z, 1000).unwrap();
    let b = estimate_np_chunked(&g, 1, 30_000, 5, DEFAULT_Z, 1000).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.chunk_size, 1000);
    assert_eq!(estimate_np(&g, 1, 30_000, 5, DEFAULT_Z).unwrap().chunk_size, 4096);
}

#[test]
fn calibration_on_s3() {
    let g = schreier_sims(&catalog_perm_gens("S(3)").unwrap()).unwrap();
    let covered = (0..200u64).filter(|&seed| estimate_np(&g, 1, 10_000, seed, DEFAULT_Z).unwrap().covers(0.5)).count();
    assert!(covered >= 180, "{covered} of 200");
}
