//! Solver toolkit for the 0/1 multidimensional knapsack problem.
//!
//! The pipeline: parse or generate an [`Instance`], run a subgradient pass
//! to estimate Lagrange multipliers ([`compute_multipliers`]), turn them
//! into per-object utility ratios ([`compute_ratios`]), and hand those to
//! either the one-shot greedy constructor ([`greedy_construct`]) or the
//! genetic algorithm ([`evolve`]), whose crossover rebuilds offspring
//! greedily from the union of two parents so every individual it creates
//! is feasible. [`solve_exact`] provides a branch-and-bound reference for
//! small instances and [`run_benchmark`] drives repeated trials across a
//! worker pool.

pub mod bench;
pub mod ga;
pub mod greedy;
pub mod instance;
pub mod multipliers;
pub mod oracle;
mod util;

pub use bench::{emit_report, emit_trials_csv, run_benchmark, BenchReport, BenchRow, GapReference, ReportFormat, RowOutcome, TrialRecord};
pub use ga::{evolve, fitness_rank, greedy_crossover, init_population, mutate, select_parent, ConfigError, GaConfig, GaResult, Individual};
pub use greedy::{greedy_construct, greedy_estimate};
pub use instance::{parse_orlib, parse_weing, random_instance, Instance, InstanceError, ParseError, Selection};
pub use multipliers::{
    compute_multipliers, compute_ratios, init_multipliers, relaxation_bound, relaxed_selection,
    update_multipliers, Multipliers, UtilityRatios, EPSILON_FLOOR,
};
pub use oracle::{percent_gap, solve_exact, solve_exact_unguarded, GapError, OracleError, GUARD_LIMIT};
