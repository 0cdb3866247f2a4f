//! Model primitives: validated parameters, belief dynamics, and per-faction
//! payoffs from immediate approval.
//!
//! Payoffs are reported from the time-zero perspective throughout: the common
//! discount factor on a decision taken at time `t` never changes the sign of
//! a faction's payoff, so it enters only ex-ante quantities.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::numerics::{log_odds, logistic};

/// Primitives of the two-faction approval game.
///
/// * `p0` - prior probability that the project benefits faction A,
/// * `c` - cost borne by each faction on approval (benefit normalised to 1),
/// * `r` - exponential discount rate,
/// * `lambda_a`, `lambda_b` - intensity of the revealing signal when the
///   project is of type `a` respectively `b`.
///
/// `lambda_a >= lambda_b` is required: faction identity is payoff-relevant
/// downstream, so the constructor rejects reversed intensities instead of
/// silently relabelling. Equal intensities are accepted and routed to the
/// static branch where the belief never moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelParams")]
pub struct ModelParams {
    p0: f64,
    c: f64,
    r: f64,
    lambda_a: f64,
    lambda_b: f64,
}

#[derive(Deserialize)]
struct RawModelParams {
    p0: f64,
    c: f64,
    r: f64,
    lambda_a: f64,
    lambda_b: f64,
}

impl TryFrom<RawModelParams> for ModelParams {
    type Error = ModelError;

    fn try_from(raw: RawModelParams) -> Result<Self> {
        ModelParams::new(raw.p0, raw.c, raw.r, raw.lambda_a, raw.lambda_b)
    }
}

fn check_range(field: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::OutOfRange {
            field,
            value,
            expected,
        })
    }
}

impl ModelParams {
    pub fn new(p0: f64, c: f64, r: f64, lambda_a: f64, lambda_b: f64) -> Result<Self> {
        check_range("p0", p0, p0 > 0.0 && p0 < 1.0, "(0, 1)")?;
        check_range("c", c, c > 0.0 && c < 1.0, "(0, 1)")?;
        check_range("r", r, r >= 0.0, "[0, inf)")?;
        check_range("lambda_a", lambda_a, lambda_a >= 0.0, "[0, inf)")?;
        check_range("lambda_b", lambda_b, lambda_b >= 0.0, "[0, inf)")?;
        if lambda_a < lambda_b {
            return Err(ModelError::RequiresLambdaOrder { lambda_a, lambda_b });
        }
        Ok(Self {
            p0,
            c,
            r,
            lambda_a,
            lambda_b,
        })
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }

    /// True when the signal intensities coincide and the belief never moves.
    pub fn is_static(&self) -> bool {
        self.lambda_a == self.lambda_b
    }

    /// The case the analysis focuses on: `c <= min(p0, 1/2)`, where the
    /// project is approvable by both factions at some belief.
    pub fn is_interesting_case(&self) -> bool {
        self.c <= self.p0.min(0.5)
    }

    /// `lambda_a - lambda_b`.
    pub fn intensity_gap(&self) -> f64 {
        self.lambda_a - self.lambda_b
    }

    /// `ln(p0 / (1 - p0))`.
    pub fn prior_log_odds(&self) -> f64 {
        log_odds(self.p0)
    }

    /// Copy with the cost replaced; used by the cost sweep.
    pub(crate) fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.p0, c, self.r, self.lambda_a, self.lambda_b)
    }

    /// Copy with the prior replaced; used by the prior sweep.
    pub(crate) fn with_p0(&self, p0: f64) -> Result<Self> {
        Self::new(p0, self.c, self.r, self.lambda_a, self.lambda_b)
    }
}

/// Common posterior probability that the project is of type `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Belief(f64);

impl Belief {
    pub fn value(&self) -> f64 {
        self.0
    }
}

impl From<Belief> for f64 {
    fn from(b: Belief) -> f64 {
        b.0
    }
}

/// Belief at time `t` given that no signal has arrived:
/// `1 / (1 + ((1-p0)/p0) e^{(lambda_a - lambda_b) t})`, evaluated in
/// log-odds space so extreme intensity ratios do not overflow.
pub fn belief_at(params: &ModelParams, t: f64) -> Result<Belief> {
    if t < 0.0 || t.is_nan() {
        return Err(ModelError::NegativeTime(t));
    }
    if t == 0.0 || params.is_static() {
        return Ok(Belief(params.p0));
    }
    Ok(Belief(logistic(
        params.prior_log_odds() - params.intensity_gap() * t,
    )))
}

/// Time at which the no-signal belief reaches `p_target <= p0`:
/// `(1/(lambda_a - lambda_b)) ln((p0/(1-p0)) ((1-p)/p))`.
pub fn time_to_reach(params: &ModelParams, p_target: f64) -> Result<f64> {
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(ModelError::OutOfRange {
            field: "p_target",
            value: p_target,
            expected: "(0, 1)",
        });
    }
    if p_target > params.p0 {
        return Err(ModelError::TargetAbovePrior {
            target: p_target,
            prior: params.p0,
        });
    }
    if p_target == params.p0 {
        return Ok(0.0);
    }
    if params.is_static() {
        return Err(ModelError::StaticBelief);
    }
    Ok((params.prior_log_odds() - log_odds(p_target)) / params.intensity_gap())
}

/// Myopic payoffs `(u_A, u_B) = (p - c, 1 - c - p)` from approving at belief
/// `p`, stated at the moment of approval.
pub fn myopic_payoffs(params: &ModelParams, p: f64) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&p));
    (p - params.c, 1.0 - params.c - p)
}

/// Faction A's value, at belief `p`, of blocking for `tau` units of time and
/// then approving if no signal has arrived:
/// `p (1-c) e^{-(lambda_a + r) tau} - (1-p) c e^{-(lambda_b + r) tau}`.
///
/// An infinite `tau` means the project is never approved and is worth zero.
pub fn deviation_value_a(params: &ModelParams, p: f64, tau: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    debug_assert!(tau >= 0.0);
    if tau.is_infinite() {
        return 0.0;
    }
    let c = params.c;
    p * (1.0 - c) * (-(params.lambda_a + params.r) * tau).exp()
        - (1.0 - p) * c * (-(params.lambda_b + params.r) * tau).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline(c: f64) -> ModelParams {
        ModelParams::new(0.6, c, 1.0, 35.0, 3.0).unwrap()
    }

    #[test]
    fn accepts_baseline_parameters() {
        let p = baseline(0.1);
        assert!(p.is_interesting_case());
        assert!(!p.is_static());
    }

    #[test]
    fn rejects_reversed_intensities() {
        let err = ModelParams::new(0.6, 0.1, 1.0, 3.0, 35.0).unwrap_err();
        assert!(matches!(err, ModelError::RequiresLambdaOrder { .. }));
    }

    #[test]
    fn rejects_out_of_range_prior() {
        let err = ModelParams::new(1.2, 0.1, 1.0, 35.0, 3.0).unwrap_err();
        assert!(matches!(err, ModelError::OutOfRange { field: "p0", .. }));
    }

    #[test]
    fn equal_intensities_are_valid_and_static() {
        let p = ModelParams::new(0.6, 0.1, 1.0, 5.0, 5.0).unwrap();
        assert!(p.is_static());
    }

    #[test]
    fn belief_at_zero_is_the_prior() {
        assert_eq!(belief_at(&baseline(0.1), 0.0).unwrap().value(), 0.6);
    }

    #[test]
    fn belief_is_constant_for_equal_intensities() {
        let p = ModelParams::new(0.6, 0.1, 1.0, 5.0, 5.0).unwrap();
        assert_eq!(belief_at(&p, 7.0).unwrap().value(), 0.6);
    }

    #[test]
    fn belief_hits_one_half_at_the_derived_time() {
        // ln(1.5)/32: the belief's odds fall from 3/2 to 1.
        let t = 1.5f64.ln() / 32.0;
        let b = belief_at(&baseline(0.1), t).unwrap().value();
        assert!((b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn belief_rejects_negative_time() {
        assert!(matches!(
            belief_at(&baseline(0.1), -1.0),
            Err(ModelError::NegativeTime(_))
        ));
    }

    #[test]
    fn time_to_reach_own_prior_is_zero() {
        assert_eq!(time_to_reach(&baseline(0.1), 0.6).unwrap(), 0.0);
    }

    #[test]
    fn time_to_reach_matches_log_formula() {
        let t = time_to_reach(&baseline(0.1), 0.5).unwrap();
        assert!((t - 1.5f64.ln() / 32.0).abs() < 1e-15);
    }

    #[test]
    fn time_to_reach_rejects_targets_above_prior() {
        assert!(matches!(
            time_to_reach(&baseline(0.1), 0.7),
            Err(ModelError::TargetAbovePrior { .. })
        ));
    }

    #[test]
    fn time_to_reach_static_is_an_error() {
        let p = ModelParams::new(0.6, 0.1, 1.0, 5.0, 5.0).unwrap();
        assert!(matches!(
            time_to_reach(&p, 0.5),
            Err(ModelError::StaticBelief)
        ));
    }

    #[test]
    fn myopic_payoffs_match_examples() {
        assert_eq!(myopic_payoffs(&baseline(0.1), 0.5), (0.4, 0.4));
        let (ua, ub) = myopic_payoffs(&baseline(0.1), 0.1);
        assert!(ua.abs() < 1e-15 && (ub - 0.8).abs() < 1e-15);
        let half = ModelParams::new(0.6, 0.5, 1.0, 35.0, 3.0).unwrap();
        assert_eq!(myopic_payoffs(&half, 0.5), (0.0, 0.0));
    }

    #[test]
    fn deviation_value_edges() {
        let p = baseline(0.1);
        let (ua, _) = myopic_payoffs(&p, 0.4);
        assert!((deviation_value_a(&p, 0.4, 0.0) - ua).abs() < 1e-15);
        assert_eq!(deviation_value_a(&p, 0.4, f64::INFINITY), 0.0);
    }

    #[test]
    fn deviation_value_matches_direct_evaluation() {
        // 0.45 e^{-0.36} - 0.05 e^{-0.04}, frozen from direct evaluation.
        let v = deviation_value_a(&baseline(0.1), 0.5, 0.01);
        assert!((v - 0.265_914_874_774_347_83).abs() < 1e-15);
    }
}
