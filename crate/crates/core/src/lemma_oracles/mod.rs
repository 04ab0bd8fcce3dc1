//! Exact checks of the combinatorial facts behind the lower bounds.
//!
//! * sums of i.i.d. signs: `√n/5 ≤ E|E_n| ≤ √n`;
//! * partial sums `A_{m,k} = E_{m−1} + (k/K)·τ_m` of a balanced random sign
//!   arrangement: absolute-value sandwich and sign probabilities;
//! * monotonicity of the function `T(d)`;
//! * the second-moment recursion of SFL on the `±ζ` quadratic instance.
//!
//! Small cases are enumerated exhaustively with integer arithmetic; larger
//! ones fall back to seeded Monte Carlo with a standard error.

mod partial_sums;
mod permutations;
mod recursion;
mod suite;

use thiserror::Error;

pub use partial_sums::{
    exact_abs_partial_sum_iid, exact_abs_partial_sum_iid_ratio, mc_abs_partial_sum_iid, MAX_EXACT_N,
};
pub use permutations::{
    balanced_arrangements, exact_perm_stats, mc_perm_stats, McEstimate, PermStats, MAX_EXACT_M,
};
pub use recursion::{
    exhaustive_second_moment, second_moment_recursion, t_function, t_function_excess,
    RecursionInput,
};
pub use suite::{
    check_full_sum_zero, check_iid_sandwich, check_perm_sandwich, check_perm_signs,
    check_recursion, check_t_monotone, run_suite, CheckOutcome,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("n = {0} is beyond the exact range (n ≤ {MAX_EXACT_N})")]
    TooLargeN(usize),
    #[error("M = {0} must be even")]
    OddM(usize),
    #[error("M = {0} is beyond the exact range (M ≤ {MAX_EXACT_M})")]
    TooLargeM(usize),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("d = {0} must lie in (0, 1)")]
    DOutOfRange(f64),
    #[error("simulation failed: {0}")]
    Simulation(String),
}
