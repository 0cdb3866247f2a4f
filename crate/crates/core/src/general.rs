//! Equilibrium computation under general signal-time distributions.
//!
//! The arrival process is described by a pair of survival functions
//! `S_a, S_b` (built-in exponential or Weibull families, or tabulated curves
//! under monotone cubic interpolation). Provided the survival ratio
//! `S_a / S_b` is strictly decreasing (monotone likelihood ratio), faction A
//! behaves exactly as in the baseline: it supports the project until the
//! belief reaches `c`. Faction B's stopping problem loses its closed form, so
//! it is solved numerically: a global grid scan, golden-section refinement,
//! and a derivative-sign bisection polish.

use serde::{Deserialize, Serialize};

use crate::equilibrium::Regime;
use crate::error::{ModelError, Result};
use crate::model::ModelParams;
use crate::numerics::{
    bisect, golden_section_max, hermite_value_deriv, log_odds, logistic, pchip_tangents,
};

/// Survival probability below which a type is treated as fully revealed when
/// choosing the default horizon.
const HORIZON_EPS: f64 = 1e-9;
/// Fallback horizon when a survival function never decays below the
/// threshold (e.g. a zero-rate exponential).
const HORIZON_CAP: f64 = 1e4;

/// Tabulated survival curve with monotonicity-preserving piecewise-cubic
/// interpolation between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    ts: Vec<f64>,
    values: Vec<f64>,
    tangents: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(ts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let invalid = |msg: &str| ModelError::InvalidProcess(msg.into());
        if ts.len() < 2 || ts.len() != values.len() {
            return Err(invalid(
                "table needs at least two (t, S) knots of equal length",
            ));
        }
        if ts[0] != 0.0 {
            return Err(invalid("table must start at t = 0"));
        }
        if values[0] != 1.0 {
            return Err(invalid("table must start at S(0) = 1"));
        }
        for w in ts.windows(2) {
            if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) {
                return Err(invalid("table times must be strictly increasing"));
            }
        }
        for w in values.windows(2) {
            if w[1] > w[0] || w[1].is_nan() {
                return Err(invalid("table survival values must be non-increasing"));
            }
        }
        if values.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
            return Err(invalid("table survival values must lie in (0, 1]"));
        }
        let tangents = pchip_tangents(&ts, &values);
        Ok(Self {
            ts,
            values,
            tangents,
        })
    }

    fn segment(&self, t: f64) -> usize {
        self.ts
            .partition_point(|&x| x <= t)
            .clamp(1, self.ts.len() - 1)
            - 1
    }

    fn value_deriv(&self, t: f64) -> (f64, f64) {
        let k = self.segment(t);
        hermite_value_deriv(
            self.ts[k],
            self.ts[k + 1],
            self.values[k],
            self.values[k + 1],
            self.tangents[k],
            self.tangents[k + 1],
            t,
        )
    }

    pub fn last_knot(&self) -> f64 {
        *self.ts.last().expect("table has knots")
    }
}

/// A survival function `S(t) = P(signal later than t)` for one project type.
#[derive(Debug, Clone, PartialEq)]
pub enum SurvivalFn {
    /// `S(t) = e^{-rate t}`; `rate = 0` means the type is never revealed.
    Exponential {
        rate: f64,
    },
    /// `S(t) = e^{-(t/scale)^shape}`.
    Weibull {
        scale: f64,
        shape: f64,
    },
    Table(MonotoneTable),
}

impl SurvivalFn {
    fn validate(&self) -> Result<()> {
        match self {
            SurvivalFn::Exponential { rate } => {
                if !(rate.is_finite() && *rate >= 0.0) {
                    return Err(ModelError::InvalidProcess(format!(
                        "exponential rate must be finite and non-negative, got {rate}"
                    )));
                }
            }
            SurvivalFn::Weibull { scale, shape } => {
                if !(scale.is_finite() && *scale > 0.0 && shape.is_finite() && *shape > 0.0) {
                    return Err(ModelError::InvalidProcess(format!(
                        "weibull scale and shape must be finite and positive, got ({scale}, {shape})"
                    )));
                }
            }
            SurvivalFn::Table(_) => {} // validated at construction
        }
        Ok(())
    }

    /// `ln S(t)`, exact for the built-in families; avoids underflow in the
    /// likelihood-ratio and belief computations.
    pub fn log_value(&self, t: f64) -> f64 {
        match self {
            SurvivalFn::Exponential { rate } => -rate * t,
            SurvivalFn::Weibull { scale, shape } => -(t / scale).powf(*shape),
            SurvivalFn::Table(table) => table.value_deriv(t).0.ln(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            SurvivalFn::Table(table) => table.value_deriv(t).0,
            _ => self.log_value(t).exp(),
        }
    }

    /// `dS/dt`.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            SurvivalFn::Exponential { rate } => -rate * (-rate * t).exp(),
            SurvivalFn::Weibull { scale, shape } => {
                if t == 0.0 {
                    if *shape > 1.0 {
                        0.0
                    } else if *shape == 1.0 {
                        -1.0 / scale
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    -(shape / scale) * (t / scale).powf(shape - 1.0) * self.value(t)
                }
            }
            SurvivalFn::Table(table) => table.value_deriv(t).1,
        }
    }

    /// Smallest `t` with `S(t) < eps`, when the family reaches it.
    fn horizon_hint(&self, eps: f64) -> Option<f64> {
        match self {
            SurvivalFn::Exponential { rate } => (*rate > 0.0).then(|| (1.0 / eps).ln() / rate),
            SurvivalFn::Weibull { scale, shape } => {
                Some(scale * (1.0 / eps).ln().powf(1.0 / shape))
            }
            SurvivalFn::Table(table) => Some(
                table
                    .ts
                    .iter()
                    .zip(&table.values)
                    .find(|(_, &v)| v < eps)
                    .map(|(&t, _)| t)
                    .unwrap_or_else(|| table.last_knot()),
            ),
        }
    }

    fn domain_end(&self) -> Option<f64> {
        match self {
            SurvivalFn::Table(table) => Some(table.last_knot()),
            _ => None,
        }
    }
}

/// A pair of survival functions plus the horizon bounding all numerical work.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalProcess {
    pub survival_a: SurvivalFn,
    pub survival_b: SurvivalFn,
    pub horizon: f64,
}

impl ArrivalProcess {
    /// Build a process, choosing the horizon if none is given: the smallest
    /// time at which both survivals drop below 1e-9, capped at 1e4 and at the
    /// domain of any tabulated curve.
    pub fn new(
        survival_a: SurvivalFn,
        survival_b: SurvivalFn,
        horizon: Option<f64>,
    ) -> Result<Self> {
        survival_a.validate()?;
        survival_b.validate()?;
        let domain_end = match (survival_a.domain_end(), survival_b.domain_end()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        };
        let horizon = match horizon {
            Some(h) => {
                if !(h.is_finite() && h > 0.0) {
                    return Err(ModelError::InvalidProcess(format!(
                        "horizon must be finite and positive, got {h}"
                    )));
                }
                if let Some(end) = domain_end {
                    if h > end {
                        return Err(ModelError::InvalidProcess(format!(
                            "horizon {h} exceeds the tabulated domain end {end}"
                        )));
                    }
                }
                h
            }
            None => {
                let hint_a = survival_a.horizon_hint(HORIZON_EPS);
                let hint_b = survival_b.horizon_hint(HORIZON_EPS);
                let hint = match (hint_a, hint_b) {
                    (Some(a), Some(b)) => a.max(b),
                    _ => HORIZON_CAP,
                };
                let mut h = hint.min(HORIZON_CAP);
                if let Some(end) = domain_end {
                    h = h.min(end);
                }
                h
            }
        };
        Ok(Self {
            survival_a,
            survival_b,
            horizon,
        })
    }

    pub fn exponential(lambda_a: f64, lambda_b: f64) -> Result<Self> {
        Self::new(
            SurvivalFn::Exponential { rate: lambda_a },
            SurvivalFn::Exponential { rate: lambda_b },
            None,
        )
    }

    /// `ln(S_a(t) / S_b(t))`, the log likelihood ratio of "no signal yet".
    fn log_ratio(&self, t: f64) -> f64 {
        self.survival_a.log_value(t) - self.survival_b.log_value(t)
    }
}

/// Serializable description of an arrival process (the CLI config format).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProcessSpec {
    Exponential {
        lambda_a: f64,
        lambda_b: f64,
    },
    Weibull {
        scale_a: f64,
        shape_a: f64,
        scale_b: f64,
        shape_b: f64,
    },
    Table {
        t: Vec<f64>,
        s_a: Vec<f64>,
        s_b: Vec<f64>,
    },
}

/// Process spec plus an optional horizon override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    #[serde(flatten)]
    pub spec: ProcessSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

impl ProcessConfig {
    pub fn build(&self) -> Result<ArrivalProcess> {
        let (a, b) = match &self.spec {
            ProcessSpec::Exponential { lambda_a, lambda_b } => (
                SurvivalFn::Exponential { rate: *lambda_a },
                SurvivalFn::Exponential { rate: *lambda_b },
            ),
            ProcessSpec::Weibull {
                scale_a,
                shape_a,
                scale_b,
                shape_b,
            } => (
                SurvivalFn::Weibull {
                    scale: *scale_a,
                    shape: *shape_a,
                },
                SurvivalFn::Weibull {
                    scale: *scale_b,
                    shape: *shape_b,
                },
            ),
            ProcessSpec::Table { t, s_a, s_b } => (
                SurvivalFn::Table(MonotoneTable::new(t.clone(), s_a.clone())?),
                SurvivalFn::Table(MonotoneTable::new(t.clone(), s_b.clone())?),
            ),
        };
        ArrivalProcess::new(a, b, self.horizon)
    }
}

/// Result of the monotone-likelihood-ratio check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MlrCheck {
    Pass,
    /// First grid interval on which the survival ratio failed to decrease.
    Fail {
        interval: (f64, f64),
    },
}

impl MlrCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, MlrCheck::Pass)
    }
}

/// Verify that `S_a / S_b` is strictly decreasing across a uniform grid of
/// `grid_size` points on `[0, horizon]`.
pub fn check_mlr(process: &ArrivalProcess, grid_size: usize) -> MlrCheck {
    let n = grid_size.max(2);
    let mut prev_t = 0.0;
    let mut prev = process.log_ratio(0.0);
    for i in 1..n {
        let t = process.horizon * i as f64 / (n - 1) as f64;
        let cur = process.log_ratio(t);
        if cur >= prev {
            return MlrCheck::Fail {
                interval: (prev_t, t),
            };
        }
        prev_t = t;
        prev = cur;
    }
    MlrCheck::Pass
}

/// Posterior that the project is of type `a` given no signal by `t`:
/// `p0 S_a(t) / (p0 S_a(t) + (1-p0) S_b(t))`.
pub fn belief_general(process: &ArrivalProcess, p0: f64, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(ModelError::NegativeTime(t));
    }
    if t > process.horizon {
        return Err(ModelError::HorizonExceeded {
            t,
            horizon: process.horizon,
        });
    }
    if t == 0.0 {
        return Ok(p0);
    }
    Ok(logistic(log_odds(p0) + process.log_ratio(t)))
}

/// Where faction A's support ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CutoffTime {
    /// Time at which the belief reaches `c`.
    Binds(f64),
    /// The belief has levelled off above `c` within the horizon.
    NeverBinds,
}

/// Time at which the belief reaches `c` (faction A's support ends), located
/// by bracketing bisection run to machine resolution (well inside 1e-12 in
/// `t`; full precision matters in the corner regime where the switching
/// value still has slope at the cutoff).
///
/// If the belief is still above `c` at the horizon, the call distinguishes a
/// levelled-off belief (`NeverBinds`) from one still visibly falling, which
/// is reported as `HorizonTooShort`.
pub fn cutoff_time_a(process: &ArrivalProcess, params: &ModelParams) -> Result<CutoffTime> {
    let (p0, c) = (params.p0(), params.c());
    if p0 < c {
        return Err(ModelError::NotApprovable);
    }
    if p0 == c {
        return Ok(CutoffTime::Binds(0.0));
    }
    let belief = |t: f64| logistic(log_odds(p0) + process.log_ratio(t));
    let at_horizon = belief(process.horizon);
    if at_horizon > c {
        let near = belief(0.99 * process.horizon);
        return if near - at_horizon <= 1e-12 {
            Ok(CutoffTime::NeverBinds)
        } else {
            Err(ModelError::HorizonTooShort {
                horizon: process.horizon,
            })
        };
    }
    let root = bisect(|t| belief(t) - c, 0.0, process.horizon, 0.0, 200);
    Ok(CutoffTime::Binds(root))
}

/// Faction B's switching value under the general process:
/// `[-p0 c S_a(t) + (1-p0)(1-c) S_b(t)] e^{-r t}`.
fn switch_value_general(process: &ArrivalProcess, params: &ModelParams, t: f64) -> f64 {
    let (p0, c) = (params.p0(), params.c());
    (-p0 * c * process.survival_a.value(t) + (1.0 - p0) * (1.0 - c) * process.survival_b.value(t))
        * (-params.r() * t).exp()
}

/// Sign of `dW/dt` up to the positive factor `e^{-rt}`.
fn switch_slope_sign(process: &ArrivalProcess, params: &ModelParams, t: f64) -> f64 {
    let (p0, c) = (params.p0(), params.c());
    let v = -p0 * c * process.survival_a.value(t)
        + (1.0 - p0) * (1.0 - c) * process.survival_b.value(t);
    let dv = -p0 * c * process.survival_a.derivative(t)
        + (1.0 - p0) * (1.0 - c) * process.survival_b.derivative(t);
    dv - params.r() * v
}

/// Maximise faction B's switching value over `[0, t_A]` where `t_A` is the
/// cutoff time (or the horizon if the cutoff never binds).
///
/// A uniform scan of `grid_size` intervals locates candidate brackets (the
/// three best local maxima, since the value need not be unimodal for
/// arbitrary survivals); each is refined by golden section and polished by a
/// bisection on the slope sign when the bracket straddles a stationary
/// point. Ties break toward smaller `t`. Returns `(t_B, value)`.
pub fn best_switch_time(
    process: &ArrivalProcess,
    params: &ModelParams,
    grid_size: usize,
) -> Result<(f64, f64)> {
    let t_a = match cutoff_time_a(process, params)? {
        CutoffTime::Binds(t) => t,
        CutoffTime::NeverBinds => process.horizon,
    };
    let w = |t: f64| switch_value_general(process, params, t);
    if t_a == 0.0 {
        return Ok((0.0, w(0.0)));
    }
    let n = grid_size.max(64);
    let ts: Vec<f64> = (0..=n).map(|i| t_a * i as f64 / n as f64).collect();
    let ws: Vec<f64> = ts.iter().map(|&t| w(t)).collect();

    let mut locals: Vec<usize> = (0..=n)
        .filter(|&i| (i == 0 || ws[i] >= ws[i - 1]) && (i == n || ws[i] >= ws[i + 1]))
        .collect();
    locals.sort_by(|&a, &b| ws[b].partial_cmp(&ws[a]).unwrap().then(a.cmp(&b)));
    locals.truncate(3);

    let slope = |t: f64| switch_slope_sign(process, params, t);
    // The two constraint corners are always candidates.
    let mut candidates: Vec<(f64, f64)> = vec![(0.0, ws[0]), (t_a, ws[n])];
    for &i in &locals {
        let lo = ts[i.saturating_sub(1)];
        let hi = ts[(i + 1).min(n)];
        let s_lo = slope(lo);
        let s_hi = slope(hi);
        if i == 0 && s_lo <= 0.0 {
            continue; // falling from the left corner, already a candidate
        }
        if i == n && s_hi >= 0.0 {
            continue; // still rising at the right corner, already a candidate
        }
        let refined = if s_lo > 0.0 && s_hi < 0.0 {
            let x = bisect(slope, lo, hi, 0.0, 120);
            (x, w(x))
        } else {
            golden_section_max(w, lo, hi, 1e-13 * t_a.max(1.0))
        };
        candidates.push(refined);
    }
    let mut best = candidates[0];
    for &(t, v) in &candidates[1..] {
        if v > best.1 || (v == best.1 && t < best.0) {
            best = (t, v);
        }
    }
    Ok(best)
}

/// Equilibrium outcome under a general arrival process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralEquilibrium {
    pub regime: Regime,
    pub p_star: Option<f64>,
    pub t_star: Option<f64>,
    /// Faction B's value at the switching time (zero when never approved).
    pub switch_value: f64,
}

/// A switching time below this counts as immediate approval.
const IMMEDIATE_TOL: f64 = 1e-12;

/// Solve the game under a general arrival process: validate the monotone
/// likelihood ratio, then locate faction B's switching time numerically.
pub fn equilibrium_general(
    process: &ArrivalProcess,
    params: &ModelParams,
    grid_size: usize,
) -> Result<GeneralEquilibrium> {
    if let MlrCheck::Fail { interval } = check_mlr(process, grid_size.max(64)) {
        return Err(ModelError::MlrViolated(interval.0, interval.1));
    }
    if params.c() > 0.5 || params.p0() < params.c() {
        return Ok(GeneralEquilibrium {
            regime: Regime::NeverApproved,
            p_star: None,
            t_star: None,
            switch_value: 0.0,
        });
    }
    let (t_b, value) = best_switch_time(process, params, grid_size)?;
    if t_b <= IMMEDIATE_TOL {
        Ok(GeneralEquilibrium {
            regime: Regime::ImmediateApproval,
            p_star: Some(params.p0()),
            t_star: Some(0.0),
            switch_value: value,
        })
    } else {
        Ok(GeneralEquilibrium {
            regime: Regime::DelayedApproval,
            p_star: Some(belief_general(process, params.p0(), t_b)?),
            t_star: Some(t_b),
            switch_value: value,
        })
    }
}
