//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use nilprob_core::catalog::{catalog_get, catalog_perm_gens, default_corpus, DEFAULT_CORPUS_MAX_ORDER};
use nilprob_core::montecarlo::{estimate_np, DEFAULT_Z};
use nilprob_core::nilprob::{cp, np_bruteforce, np_fast, np_k, np_table, Budgets, ShiftTuple};
use nilprob_core::perm::{schreier_sims, Permutation};
use nilprob_core::prob::ExactProb;
use nilprob_core::structure::{normal_subgroups, SubgroupRef};
use nilprob_core::verify::{CheckOutcome, Quantity, VerificationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn nilprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilprob")).args(args).output().expect("binary runs")
}

fn p(s: &str) -> ExactProb {
    s.parse().unwrap()
}

/// Fraction of `(y₀, …, y_k) ∈ G^{k+1}` with trivial left-normed commutator,
/// evaluated on permutations.
fn perm_oracle(name: &str, k: usize) -> ExactProb {
    let elements: Vec<Permutation> = schreier_sims(&catalog_perm_gens(name).unwrap()).unwrap().elements();
    let n = elements.len();
    let mut hits = 0u64;
    let mut total = 0u64;
    let mut idx = vec![0usize; k + 1];
    'outer: loop {
        let mut acc = elements[idx[0]].clone();
        for &i in &idx[1..] {
            let b = &elements[i];
            acc = acc.inverse().then(&b.inverse()).then(&acc).then(b);
        }
        total += 1;
        hits += u64::from(acc.is_identity());
        for slot in (0..=k).rev() {
            idx[slot] += 1;
            if idx[slot] < n {
                continue 'outer;
            }
            idx[slot] = 0;
        }
        break;
    }
    ExactProb::new(hits, total).unwrap()
}

fn exact_values() -> Vec<(String, ExactProb)> {
    let b = Budgets::default();
    let mut out = Vec::new();
    for name in ["S(3)", "Q8", "D(8)", "S(4)"] {
        out.push((format!("cp({name})"), cp(&catalog_get(name).unwrap())));
    }
    for (name, k) in [("S(3)", 2), ("S(3)", 3), ("Q8", 2), ("D(8)", 2), ("S(3)xS(3)", 2)] {
        out.push((format!("np_{k}({name})"), np_k(&catalog_get(name).unwrap(), k, &b).unwrap().value));
    }
    out
}

fn criterion_1() -> Verdict {
    let b = Budgets::default();
    let expected = [
        ("S(3)", 1, "1/2"),
        ("Q8", 1, "5/8"),
        ("D(8)", 1, "5/8"),
        ("S(4)", 1, "5/24"),
        ("S(3)", 2, "3/4"),
        ("S(3)", 3, "7/8"),
        ("Q8", 2, "1"),
        ("D(8)", 2, "1"),
        ("S(3)xS(3)", 2, "9/16"),
    ];
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for (name, k, want) in expected {
        let start = Instant::now();
        let g = catalog_get(name).unwrap();
        let whole = SubgroupRef::whole(&g);
        let shifts = ShiftTuple::identity(k + 1);
        let fast = np_fast(&g, &whole, &shifts, k, &b).unwrap().value;
        let brute = np_bruteforce(&g, &whole, &shifts, k, &b).unwrap().value;
        let classes = if k == 1 { Some(cp(&g)) } else { None };
        slowest = slowest.max(start.elapsed());
        let oracle = perm_oracle(name, k);
        let want = p(want);
        let agree = fast == want && brute == want && oracle == want && classes.is_none_or(|c| c == want);
        if !agree {
            failures.push(format!("{name} k={k}: dp {fast}, enumeration {brute}, oracle {oracle}, want {want}"));
        }
    }
    let fast_enough = slowest < Duration::from_secs(1);
    if !fast_enough {
        failures.push(format!("slowest value took {slowest:?}"));
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("9 exact values match the permutation oracle; slowest {slowest:?}")
        } else {
            failures.join("; ")
        },
    )
}

fn oracle_equivalence() -> (usize, usize, usize, Vec<String>, Vec<String>) {
    let b = Budgets::default();
    let mut groups = 0;
    let mut subgroups = 0;
    let mut tuples = 0;
    let mut mismatches = Vec::new();
    let mut digest = Vec::new();
    for name in default_corpus() {
        let g = catalog_get(&name).unwrap();
        if g.order() > 16 {
            continue;
        }
        groups += 1;
        for h in normal_subgroups(&g).unwrap() {
            subgroups += 1;
            for k in 1..=3 {
                let table = np_table(&g, &h, k, &b).unwrap();
                for i in 0..table.tuples() {
                    let s = table.tuple(i);
                    let fast = np_fast(&g, &h, &s, k, &b).unwrap();
                    let brute = np_bruteforce(&g, &h, &s, k, &b).unwrap();
                    tuples += 1;
                    if fast.value != brute.value || fast.counted != brute.counted || table.value(i) != brute.value {
                        mismatches.push(format!("{name} |H|={} k={k} {:?}", h.order(), s.0));
                    }
                    digest.push(brute.value.to_string());
                }
            }
        }
    }
    (groups, subgroups, tuples, mismatches, digest)
}

fn criterion_2() -> Verdict {
    let (groups, subgroups, tuples, mismatches, _) = oracle_equivalence();
    verdict(
        mismatches.is_empty() && groups > 0,
        if mismatches.is_empty() {
            format!("{tuples} shift tuples over {subgroups} normal subgroups of {groups} groups, k = 1..3, all equal")
        } else {
            format!("{} mismatches, first {}", mismatches.len(), mismatches[0])
        },
    )
}

fn run_verify(dir: &Path, file: &str, extra: &[&str]) -> (Output, String) {
    let path = dir.join(file);
    let path_str = path.to_str().unwrap();
    let mut args = vec!["verify", "--no-cache", "--no-timing", "--format", "table", "--report", path_str];
    args.extend_from_slice(extra);
    let out = nilprob(&args);
    let report = std::fs::read_to_string(&path).unwrap_or_default();
    (out, report)
}

fn is(o: &CheckOutcome, check: &str, group: &str, k: usize, h_order: Option<usize>) -> bool {
    o.check_id == check
        && o.group == group
        && o.params.k == Some(k)
        && h_order.is_none_or(|n| o.params.h.as_ref().is_some_and(|h| h.order == n))
}

fn criterion_3(report: &VerificationReport, exit: Option<i32>, elapsed: Duration) -> Verdict {
    let must_hold = [
        "npleqcp",
        "2_4n",
        "nocamn",
        "gap_bound_derived",
        "submultiplicativity",
        "mtvv_monotonicity",
        "series_bound_derived",
    ];
    let present: Vec<&str> =
        must_hold.iter().copied().filter(|c| report.outcomes.iter().any(|o| o.check_id == *c)).collect();
    let coverage_ok = present.len() == must_hold.len()
        && report.summary.groups == default_corpus().len()
        && report.skipped.iter().all(|s| s.check.is_some());
    let suite_ok = report.violations.is_empty() && exit == Some(0) && coverage_ok && elapsed < Duration::from_secs(1800);
    // the center recursion as literally stated, on every normal subgroup
    let literal: Vec<&CheckOutcome> =
        report.findings.iter().filter(|o| o.check_id == "2_4n").collect();
    let example = report
        .findings
        .iter()
        .find(|o| is(o, "2_4n", "S(3)", 1, Some(3)))
        .map(|o| format!("{} H={} k=1: {} > {}", o.group, o.params.h.as_ref().unwrap(), o.lhs, o.rhs))
        .unwrap_or_default();
    let detail = format!(
        "{} groups (order ≤ {DEFAULT_CORPUS_MAX_ORDER}), {} checks, {} must-hold violations, exit {:?}, {:.1?}; \
         center recursion fails as stated on {} (group, H, k) cases where C_G(H) is not inside Z(G)∩H, e.g. {example}",
        report.summary.groups,
        report.summary.checks,
        report.violations.len(),
        exit,
        elapsed,
        literal.len(),
    );
    verdict(suite_ok && literal.is_empty(), detail)
}

fn criterion_4(report: &VerificationReport) -> Verdict {
    let q8 = report.sharpness.iter().find(|o| {
        is(o, "gap_bound_derived", "Q8", 1, Some(8)) && o.lhs == Quantity::Exact(p("5/8")) && o.equality
    });
    let d8 = report.sharpness.iter().find(|o| {
        is(o, "gap_bound_derived", "D(8)", 1, Some(8)) && o.lhs == Quantity::Exact(p("5/8")) && o.equality
    });
    let s3 = report.sharpness.iter().find(|o| {
        is(o, "2_4n", "S(3)", 2, Some(6))
            && o.lhs == Quantity::Exact(p("3/4"))
            && o.rhs == Quantity::Exact(p("3/4"))
            && o.params.shifts.as_ref().is_some_and(|s| s.0 == vec![0, 0, 0])
    });
    verdict(
        q8.is_some() && d8.is_some() && s3.is_some(),
        format!(
            "cp(Q8) = 5/8 = derived(1): {}; cp(D8) = 5/8: {}; np_2(S3) = 3/4 = ½(1 + cp(S3)): {}",
            q8.is_some(),
            d8.is_some(),
            s3.is_some()
        ),
    )
}

fn criterion_5(report: &VerificationReport, exit: Option<i32>) -> Verdict {
    let gap = report.findings.iter().find(|o| {
        is(o, "gap_bound_stated", "S(3)", 2, Some(6))
            && o.lhs == Quantity::Exact(p("3/4"))
            && o.rhs == Quantity::Exact(p("5/8"))
    });
    let series = report
        .findings
        .iter()
        .find(|o| is(o, "series_bound_stated", "S(3)xS(3)", 1, None) && o.lhs == Quantity::Int(1));
    let bound = series.map(|o| o.rhs.to_string()).unwrap_or_default();
    verdict(
        gap.is_some() && series.is_some() && exit == Some(0),
        format!(
            "np_2(S3) = 3/4 > 5/8 recorded: {}; S3xS3 r = 1 vs printed bound {bound} recorded: {}; exit {:?}",
            gap.is_some(),
            series.is_some(),
            exit
        ),
    )
}

fn criterion_6() -> Verdict {
    let b = Budgets::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut groups = 0;
    let mut failures = Vec::new();
    for name in default_corpus() {
        let g = catalog_get(&name).unwrap();
        if g.order() > 24 {
            continue;
        }
        groups += 1;
        let whole = SubgroupRef::whole(&g);
        for k in 1..=2 {
            let base = np_k(&g, k, &b).unwrap().value;
            for _ in 0..50 {
                let s = ShiftTuple((0..=k).map(|_| rng.random_range(0..g.order())).collect());
                let v = np_bruteforce(&g, &whole, &s, k, &b).unwrap().value;
                if v != base {
                    failures.push(format!("{name} k={k} {:?}: {v} vs {base}", s.0));
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{groups} groups of order ≤ 24, k = 1, 2, 50 tuples each: all equal np_k(G)")
        } else {
            failures.join("; ")
        },
    )
}

fn estimate_cli(dir: &Path) -> Output {
    let gens = dir.join("s5.json");
    std::fs::write(&gens, r#"{"kind": "perm_gens", "label": "S5", "gens": [[1,0,2,3,4],[1,2,3,4,0]]}"#).unwrap();
    let gens = gens.to_str().unwrap().to_string();
    nilprob(&[
        "estimate",
        "--gens-file",
        &gens,
        "--k",
        "1",
        "--samples",
        "100000",
        "--seed",
        "42",
        "--format",
        "json",
    ])
}

fn criterion_7(dir: &Path) -> Verdict {
    let start = Instant::now();
    let out = estimate_cli(dir);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    let (lo, hi) = (json["ci_low"].as_f64().unwrap_or(1.0), json["ci_high"].as_f64().unwrap_or(0.0));
    let target = 7.0 / 120.0;
    let s5_ok = out.status.success() && lo <= target && target <= hi;
    let s3 = schreier_sims(&catalog_perm_gens("S(3)").unwrap()).unwrap();
    let covered = (0..200u64).filter(|&seed| estimate_np(&s3, 1, 10_000, seed, DEFAULT_Z).unwrap().covers(0.5)).count();
    let elapsed = start.elapsed();
    verdict(
        s5_ok && covered >= 180 && elapsed < Duration::from_secs(60),
        format!(
            "S5 k=1 interval [{lo:.5}, {hi:.5}] contains 7/120: {}; S3 coverage {covered}/200; {elapsed:.1?}",
            lo <= target && target <= hi
        ),
    )
}

fn criterion_8(dir: &Path, first_report: &str) -> Verdict {
    let values_again = exact_values() == exact_values();
    let (_, _, _, _, d1) = oracle_equivalence();
    let (_, _, _, _, d2) = oracle_equivalence();
    let (_, second) = run_verify(dir, "report-again.json", &[]);
    let (_, single) = run_verify(dir, "report-1-thread.json", &["--threads", "1"]);
    let reports_same = !first_report.is_empty() && first_report == second && first_report == single;
    let e1 = estimate_cli(dir);
    let e2 = estimate_cli(dir);
    let estimates_same = e1.status.success() && e1.stdout == e2.stdout;
    let s3 = schreier_sims(&catalog_perm_gens("S(3)").unwrap()).unwrap();
    let hits = |seed| estimate_np(&s3, 1, 10_000, seed, DEFAULT_Z).unwrap().hits;
    let calibration_same = (0..20u64).all(|seed| hits(seed) == hits(seed));
    verdict(
        values_again && d1 == d2 && reports_same && estimates_same && calibration_same,
        format!(
            "exact values {values_again}; oracle sweep {}; verify reports (incl. 1 thread) byte-identical {reports_same}; \
             estimate output {estimates_same}; calibration hits {calibration_same}",
            d1 == d2
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    results.push((1, "exact values", criterion_1()));
    results.push((2, "oracle equivalence", criterion_2()));

    let start = Instant::now();
    let (out, report_text) = run_verify(dir.path(), "report.json", &[]);
    let elapsed = start.elapsed();
    let exit = out.status.code();
    match serde_json::from_str::<VerificationReport>(&report_text) {
        Ok(report) => {
            results.push((3, "theorem suite", criterion_3(&report, exit, elapsed)));
            results.push((4, "sharpness witnesses", criterion_4(&report)));
            results.push((5, "stated-constant findings", criterion_5(&report, exit)));
        }
        Err(e) => {
            let stderr = String::from_utf8_lossy(&out.stderr).to_string();
            for (n, name) in [(3, "theorem suite"), (4, "sharpness witnesses"), (5, "stated-constant findings")] {
                results.push((n, name, verdict(false, format!("no report ({e}); exit {exit:?}; {stderr}"))));
            }
        }
    }
    results.push((6, "shift invariance", criterion_6()));
    results.push((7, "monte carlo", criterion_7(dir.path())));
    results.push((8, "determinism", criterion_8(dir.path(), &report_text)));

    let mut failed = 0;
    for (n, name, v) in &results {
        println!("criterion {n} [{name}]: {} - {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
