//! Exact coefficients of `P(q)^r`, where `P(q) = prod_{k>=1} 1/(1 - q^k)` is the
//! partition generating function and `r` is rational, together with checks of
//! Ramanujan's mod-5 congruences `P_r(5m + 4) = 0 (mod 5)` for `r = 1 (mod 5)`
//! and their companions.
//!
//! `P_1(n)` is the partition number `p(n)` and `P_{-24}(n)` is `tau(n + 1)`.

pub mod arith;
pub mod cli;
pub mod congruence;
pub mod error;
pub mod expand;
pub mod output;
pub mod report;
pub mod series;

pub use arith::{reduce_mod, sigma, triangular, Rational, Residue};
pub use congruence::{
    companion_presets, scan_family, trace_proof_step, CaseLabel, CongruenceFamily, ProofTrace,
    TraceTerm,
};
pub use error::{Error, Result};
pub use expand::{
    expand_lemma, expand_oracle, expand_sparse, jacobi_coefficient, jacobi_expansion,
    partition_expansion, sparse_term_count, tau, tau_values, verify_jacobi_identity,
    verify_lemma_identity, verify_sigma_identity, verify_tau_partition_identity, Engine,
    SeriesExpansion,
};
pub use report::{Counterexample, Observed, VerificationReport};
pub use series::{partition_series_oracle, product_power_oracle, TruncatedSeries};
