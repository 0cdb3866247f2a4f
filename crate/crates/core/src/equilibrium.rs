//! The Markov equilibrium of the approval game.
//!
//! Faction A supports the project whenever its myopic payoff is weakly
//! positive (beliefs in `[c, 1]`). Faction B solves an optimal stopping
//! problem: wait for the belief to fall, at the risk of the type being
//! revealed, subject to switching no later than the belief at which A's
//! support disappears.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{time_to_reach, ModelParams};

/// Which of the three equilibrium outcomes obtains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "never")]
    NeverApproved,
    #[serde(rename = "immediate")]
    ImmediateApproval,
    #[serde(rename = "delayed")]
    DelayedApproval,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::NeverApproved => "never",
            Regime::ImmediateApproval => "immediate",
            Regime::DelayedApproval => "delayed",
        })
    }
}

/// Equilibrium description: regime, the cost threshold separating interior
/// from corner stopping, and (when approval happens) the approval belief and
/// the approval time absent a signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumOutcome {
    pub regime: Regime,
    pub c_bar: f64,
    /// Belief at which approval occurs: `p0` for immediate approval, the
    /// stopping belief for delayed approval, absent when never approved.
    pub p_star: Option<f64>,
    /// Approval time if no signal arrives; zero for immediate approval.
    pub t_star: Option<f64>,
}

/// Cost threshold `sqrt(lambda_b + r) / (sqrt(lambda_a + r) + sqrt(lambda_b + r))`.
///
/// Below it faction B stops at an interior belief; above it B is forced to
/// the corner `p* = c`.
pub fn c_bar(params: &ModelParams) -> f64 {
    let sa = (params.lambda_a() + params.r()).sqrt();
    let sb = (params.lambda_b() + params.r()).sqrt();
    if sa == 0.0 {
        // No discounting and no learning at all; B's stopping problem is
        // degenerate and the interior branch extends to the whole range.
        return 0.5;
    }
    sb / (sa + sb)
}

fn p_star_unchecked(params: &ModelParams, c_bar: f64) -> f64 {
    let c = params.c();
    if c > c_bar {
        return c;
    }
    let num = params.lambda_a() + params.r();
    let den = params.lambda_b() + params.r();
    if num == 0.0 {
        // lambda_a = lambda_b = r = 0: the intensity ratio degenerates to 1.
        return 1.0 - c;
    }
    1.0 / (1.0 + (num / den) * (c / (1.0 - c)))
}

/// Belief at which the project is approved when `p0` lies above it:
/// `1 / (1 + ((lambda_a + r)/(lambda_b + r)) c/(1-c))` for `c <= c_bar`,
/// otherwise the corner `c`.
pub fn p_star(params: &ModelParams) -> Result<f64> {
    if params.c() > 0.5 || params.p0() < params.c() {
        return Err(ModelError::NotApprovable);
    }
    Ok(p_star_unchecked(params, c_bar(params)))
}

/// Faction B's ex-ante value of switching to approval at time `t`:
/// `-p0 c e^{-(lambda_a + r) t} + (1-p0)(1-c) e^{-(lambda_b + r) t}`.
pub fn switch_value_b(params: &ModelParams, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let (p0, c) = (params.p0(), params.c());
    -p0 * c * (-(params.lambda_a() + params.r()) * t).exp()
        + (1.0 - p0) * (1.0 - c) * (-(params.lambda_b() + params.r()) * t).exp()
}

/// Maximiser of B's unrestricted stopping problem:
/// `(1/(lambda_a - lambda_b)) ln(((lambda_a + r)/(lambda_b + r)) (p0/(1-p0)) (c/(1-c)))`.
///
/// Only meaningful when the prior is above the stopping belief; it may land
/// where the belief is already below `c`, which is the corner case.
pub fn unrestricted_switch_time(params: &ModelParams) -> Result<f64> {
    if params.is_static() {
        return Err(ModelError::StaticBelief);
    }
    let ps = p_star(params)?;
    if params.p0() <= ps {
        return Err(ModelError::ImmediateRegime);
    }
    let c = params.c();
    let log_ratio = (params.lambda_a() + params.r()).ln() - (params.lambda_b() + params.r()).ln();
    Ok((log_ratio + params.prior_log_odds() + (c / (1.0 - c)).ln()) / params.intensity_gap())
}

/// The equilibrium outcome for any valid parameters.
///
/// Never approved when `c > 1/2` or `p0 < c`; with a static belief, approved
/// immediately iff `p0` lies in `[c, 1-c]`; otherwise immediately iff
/// `p0 <= p*`, and at the belief `p*` (time `t*`) when `p0 > p*`.
pub fn solve_equilibrium(params: &ModelParams) -> EquilibriumOutcome {
    let cb = c_bar(params);
    let (p0, c) = (params.p0(), params.c());
    let never = EquilibriumOutcome {
        regime: Regime::NeverApproved,
        c_bar: cb,
        p_star: None,
        t_star: None,
    };
    if c > 0.5 || p0 < c {
        return never;
    }
    if params.is_static() {
        if p0 <= 1.0 - c {
            return EquilibriumOutcome {
                regime: Regime::ImmediateApproval,
                c_bar: cb,
                p_star: Some(p0),
                t_star: Some(0.0),
            };
        }
        return never;
    }
    let ps = p_star_unchecked(params, cb);
    if p0 <= ps {
        EquilibriumOutcome {
            regime: Regime::ImmediateApproval,
            c_bar: cb,
            p_star: Some(p0),
            t_star: Some(0.0),
        }
    } else {
        let ts = time_to_reach(params, ps).expect("stopping belief is below the prior");
        EquilibriumOutcome {
            regime: Regime::DelayedApproval,
            c_bar: cb,
            p_star: Some(ps),
            t_star: Some(ts),
        }
    }
}
