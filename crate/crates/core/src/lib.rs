//! Exact and sampled nilpotence probabilities of finite groups.
//!
//! For a subgroup `H ≤ G` and shifts `x₁, …, x_{k+1} ∈ G`,
//! `np(H; x₁, …, x_{k+1})` is the fraction of `(y₁, …, y_{k+1}) ∈ H^{k+1}`
//! with `[x₁y₁, …, x_{k+1}y_{k+1}] = 1`, where `[a, b] = a⁻¹b⁻¹ab` and longer
//! commutators are left-normed. `np_{k,G}(H)` is the supremum over shifts.
//!
//! ```
//! use nilprob_core::{catalog_get, np_k, Budgets};
//!
//! let s3 = catalog_get("S(3)").unwrap();
//! assert_eq!(np_k(&s3, 2, &Budgets::default()).unwrap().value.to_string(), "3/4");
//! ```

pub mod cache;
pub mod catalog;
pub mod definition;
pub mod error;
pub mod group;
pub mod montecarlo;
pub mod nilprob;
pub mod par;
pub mod perm;
pub mod prob;
pub mod structure;
pub mod verify;

pub use cache::{cache_key, ResultCache};
pub use catalog::{catalog_get, catalog_get_capped, catalog_perm_gens, default_corpus};
pub use definition::{GroupDef, ResolveOptions};
pub use error::{Error, Result};
pub use group::{build_from_perm_gens, build_from_table, direct_product, Elem, GroupTable, IDENTITY};
pub use montecarlo::{estimate_np, wilson_ci, EstimateResult};
pub use nilprob::{cp, np_bruteforce, np_fast, np_k, np_sup, np_table, Budgets, NpResult, NpSup, ShiftTuple};
pub use perm::{schreier_sims, PermGroupBSGS, Permutation};
pub use prob::ExactProb;
pub use structure::{
    center, centralizer, conjugacy_classes, lower_central_series, nilpotency_class, normal_subgroups, quotient,
    SubgroupRef,
};
pub use verify::{run_corpus, CheckOutcome, CorpusConfig, VerificationReport};
