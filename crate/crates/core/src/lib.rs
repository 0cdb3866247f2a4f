//! Solver and verification toolkit for a two-faction collective stopping
//! game under Poisson learning.
//!
//! A committee of two factions must jointly approve a project whose hidden
//! type determines which faction benefits. While the decision is delayed, a
//! public signal may arrive and reveal the type, after which the losing
//! faction blocks approval forever; absent a signal the common belief drifts
//! against faction A. The crate computes the Markov equilibrium of this game
//! in closed form, the ex-ante approval probability and faction payoffs,
//! comparative-statics sweeps, welfare-optimal deadlines, and a numerical
//! extension to general (non-exponential) signal-time distributions, plus a
//! reproducible Monte Carlo harness that cross-validates every closed form.

pub mod analysis;
pub mod equilibrium;
pub mod error;
pub mod general;
pub mod model;
pub mod numerics;
pub mod simulate;
pub mod welfare;

pub use analysis::{
    approval_probability, approval_probability_factored, approval_report, ex_ante_payoffs,
    left_open_grid, open_grid, sweep_cost, sweep_prior, write_sweep_csv, ApprovalReport, SweepAxis,
    SweepTable,
};
pub use equilibrium::{
    c_bar, p_star, solve_equilibrium, switch_value_b, unrestricted_switch_time, EquilibriumOutcome,
    Regime,
};
pub use error::{ModelError, Result};
pub use general::{
    belief_general, best_switch_time, check_mlr, cutoff_time_a, equilibrium_general,
    ArrivalProcess, CutoffTime, GeneralEquilibrium, MlrCheck, MonotoneTable, ProcessConfig,
    ProcessSpec, SurvivalFn,
};
pub use model::{belief_at, deviation_value_a, myopic_payoffs, time_to_reach, Belief, ModelParams};
pub use simulate::{
    compare_closed_form, compare_estimates, run_sim, ClosedFormComparison, SimConfig, SimResult,
    SimRule,
};
pub use welfare::{alpha_bar, feasible_window, optimal_rule, welfare_at, RuleClass, WelfarePolicy};
