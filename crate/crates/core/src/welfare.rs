//! Utilitarian welfare of imposed decision rules.
//!
//! Any deadline or minimum-waiting-time rule reduces to a single time `T` at
//! which the project is approved if no signal has arrived. This module
//! evaluates welfare over the feasible range of `T`, locates the optimum in
//! closed form, and classifies whether intervening beats the equilibrium.

use serde::Serialize;

use crate::equilibrium::{c_bar, solve_equilibrium, Regime};
use crate::model::{time_to_reach, ModelParams};

/// How the welfare-optimal rule relates to equilibrium play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleClass {
    /// The equilibrium time is already optimal.
    NoInterventionOptimal,
    /// Forcing an earlier decision strictly improves welfare.
    DeadlineOptimal,
    /// The committee decides immediately anyway; rules are moot.
    NoEffect,
    /// No approval time is feasible at all.
    NeverApprovable,
}

/// Welfare-optimal decision rule for a given faction-A weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelfarePolicy {
    pub alpha: f64,
    /// Optimal approval time, absent when the project is never approvable.
    #[serde(rename = "T_opt")]
    pub t_opt: Option<f64>,
    pub classification: RuleClass,
    #[serde(rename = "W_opt")]
    pub w_opt: f64,
    /// Weight threshold below which no intervention is optimal; present only
    /// in the corner region `c > c_bar`.
    pub alpha_bar: Option<f64>,
    /// Equilibrium approval time, for comparison.
    pub t_star: Option<f64>,
}

/// Two optimal times within this distance are treated as the same rule; both
/// are logarithms of rational expressions and coincide only structurally.
pub const T_EQ_TOL: f64 = 1e-10;

/// Utilitarian welfare of approving at time `T` (if no signal arrives):
/// `p0 (alpha - c) e^{-(lambda_a + r) T} + (1-p0)(1 - alpha - c) e^{-(lambda_b + r) T}`.
pub fn welfare_at(params: &ModelParams, alpha: f64, t: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&alpha));
    debug_assert!(t >= 0.0);
    let (p0, c) = (params.p0(), params.c());
    p0 * (alpha - c) * (-(params.lambda_a() + params.r()) * t).exp()
        + (1.0 - p0) * (1.0 - alpha - c) * (-(params.lambda_b() + params.r()) * t).exp()
}

/// Range of approval times at which both factions consent, i.e. the belief
/// stays within `[c, min(1-c, p0)]`. `None` when no time is feasible
/// (`p0 < c` or `c > 1/2`, or a static belief stuck outside the band). For a
/// static belief inside the band every time is feasible and the upper end is
/// infinite.
pub fn feasible_window(params: &ModelParams) -> Option<(f64, f64)> {
    let (p0, c) = (params.p0(), params.c());
    if c > 0.5 || p0 < c {
        return None;
    }
    if params.is_static() {
        return if p0 <= 1.0 - c {
            Some((0.0, f64::INFINITY))
        } else {
            None
        };
    }
    let t_hi = time_to_reach(params, c).expect("c <= p0 was checked");
    let t_lo = if p0 <= 1.0 - c {
        0.0
    } else {
        time_to_reach(params, 1.0 - c).expect("1 - c < p0 in this branch")
    };
    Some((t_lo, t_hi))
}

/// Weight threshold `alpha_bar` solving
/// `(1-c)/c = ((lambda_a + r)/(lambda_b + r)) (c - a)/(1 - c - a)`,
/// i.e. `a = (K c^2 - (1-c)^2) / (K c - (1-c))` with `K` the intensity ratio.
///
/// Defined only in the corner region `c_bar < c <= 1/2`; elsewhere a deadline
/// is optimal for every weight (or the project is never approvable) and the
/// threshold does not apply. At `c = c_bar` the threshold's limit is zero.
pub fn alpha_bar(params: &ModelParams) -> Option<f64> {
    let c = params.c();
    if c > 0.5 || c <= c_bar(params) {
        return None;
    }
    let den = params.lambda_b() + params.r();
    if den == 0.0 {
        // K is unbounded: the defining equation forces the threshold to the
        // boundary c, so no weight below c makes a deadline optimal.
        return Some(c);
    }
    let k = (params.lambda_a() + params.r()) / den;
    Some((k * c * c - (1.0 - c) * (1.0 - c)) / (k * c - (1.0 - c)))
}

/// Welfare-maximising rule over the feasible window, by the closed-form case
/// split on `alpha`, plus its classification against equilibrium play.
///
/// For `alpha >= c` welfare falls with `T` throughout the window, so the
/// earliest feasible time wins. For `alpha < c` welfare rises until the
/// stationary time `e^{(la-lb)T} = K (p0/(1-p0)) (c-alpha)/(1-c-alpha)`,
/// which is clamped into the window.
pub fn optimal_rule(params: &ModelParams, alpha: f64) -> WelfarePolicy {
    debug_assert!((0.0..=1.0).contains(&alpha));
    let eq = solve_equilibrium(params);
    let bar = alpha_bar(params);
    let Some((t_lo, t_hi)) = feasible_window(params) else {
        return WelfarePolicy {
            alpha,
            t_opt: None,
            classification: RuleClass::NeverApprovable,
            w_opt: 0.0,
            alpha_bar: bar,
            t_star: None,
        };
    };
    let t_star = eq.t_star.expect("nonempty window implies an approval time");
    let (t_opt, classification) = if eq.regime == Regime::ImmediateApproval {
        (t_lo, RuleClass::NoEffect)
    } else {
        let c = params.c();
        let t_opt = if alpha < c {
            let log_ratio =
                (params.lambda_a() + params.r()).ln() - (params.lambda_b() + params.r()).ln();
            let stationary =
                (log_ratio + params.prior_log_odds() + ((c - alpha) / (1.0 - c - alpha)).ln())
                    / params.intensity_gap();
            stationary.clamp(t_lo, t_hi)
        } else {
            t_lo
        };
        if (t_opt - t_star).abs() <= T_EQ_TOL {
            (t_star, RuleClass::NoInterventionOptimal)
        } else {
            debug_assert!(t_opt < t_star);
            (t_opt, RuleClass::DeadlineOptimal)
        }
    };
    WelfarePolicy {
        alpha,
        t_opt: Some(t_opt),
        classification,
        w_opt: welfare_at(params, alpha, t_opt),
        alpha_bar: bar,
        t_star: Some(t_star),
    }
}
