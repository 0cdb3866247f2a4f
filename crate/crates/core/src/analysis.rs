//! Ex-ante outcome statistics and one-dimensional comparative-statics sweeps:
//! approval probability, faction payoffs, and the sweep tables behind the
//! cost/prior figures.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{solve_equilibrium, Regime};
use crate::error::{ModelError, Result};
use crate::model::{myopic_payoffs, ModelParams};

/// Ex-ante approval probability.
///
/// One for immediate approval, zero when never approved, and
/// `p0 e^{-lambda_a t*} + (1-p0) e^{-lambda_b t*}` for delayed approval.
pub fn approval_probability(params: &ModelParams) -> f64 {
    let eq = solve_equilibrium(params);
    match eq.regime {
        Regime::NeverApproved => 0.0,
        Regime::ImmediateApproval => 1.0,
        Regime::DelayedApproval => {
            let t = eq.t_star.expect("delayed approval has a time");
            params.p0() * (-params.lambda_a() * t).exp()
                + (1.0 - params.p0()) * (-params.lambda_b() * t).exp()
        }
    }
}

/// The same probability factored through the stopping belief:
/// `p0^{-lb/(la-lb)} (1-p0)^{la/(la-lb)} [rho^{-la/(la-lb)} + rho^{-lb/(la-lb)}]`
/// with `rho = (1-p*)/p*`. Kept as an independent algebraic route for
/// cross-checking the direct form.
pub fn approval_probability_factored(params: &ModelParams) -> f64 {
    let eq = solve_equilibrium(params);
    match eq.regime {
        Regime::NeverApproved => 0.0,
        Regime::ImmediateApproval => 1.0,
        Regime::DelayedApproval => {
            let ps = eq.p_star.expect("delayed approval has a belief");
            let rho = (1.0 - ps) / ps;
            let gap = params.intensity_gap();
            let ea = params.lambda_a() / gap;
            let eb = params.lambda_b() / gap;
            params.p0().powf(-eb) * (1.0 - params.p0()).powf(ea) * (rho.powf(-ea) + rho.powf(-eb))
        }
    }
}

/// Ex-ante faction payoffs `(payoff_A, payoff_B)`.
///
/// For delayed approval, `payoff_A = p0 e^{-lambda_a t*} (1-c) -
/// (1-p0) e^{-lambda_b t*} c` and symmetrically for B; the `discounted`
/// variant multiplies both by `e^{-r t*}`, which lines the value for B up
/// with `switch_value_b(t*)`. Immediate approval yields the myopic payoffs
/// at the prior; a never-approved project is worth zero to both.
pub fn ex_ante_payoffs(params: &ModelParams, discounted: bool) -> (f64, f64) {
    let eq = solve_equilibrium(params);
    match eq.regime {
        Regime::NeverApproved => (0.0, 0.0),
        Regime::ImmediateApproval => myopic_payoffs(params, params.p0()),
        Regime::DelayedApproval => {
            let t = eq.t_star.expect("delayed approval has a time");
            let (p0, c) = (params.p0(), params.c());
            let mass_a = p0 * (-params.lambda_a() * t).exp();
            let mass_b = (1.0 - p0) * (-params.lambda_b() * t).exp();
            let d = if discounted {
                (-params.r() * t).exp()
            } else {
                1.0
            };
            (
                (mass_a * (1.0 - c) - mass_b * c) * d,
                (-mass_a * c + mass_b * (1.0 - c)) * d,
            )
        }
    }
}

/// Approval probability and payoffs bundled with the equilibrium context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApprovalReport {
    pub prob_approval: f64,
    #[serde(rename = "payoff_A")]
    pub payoff_a: f64,
    #[serde(rename = "payoff_B")]
    pub payoff_b: f64,
    /// Whether `e^{-r t*}` was applied to the payoffs.
    pub discounted: bool,
    pub regime: Regime,
    pub p_star: Option<f64>,
    pub t_star: Option<f64>,
}

pub fn approval_report(params: &ModelParams, discounted: bool) -> ApprovalReport {
    let eq = solve_equilibrium(params);
    let (payoff_a, payoff_b) = ex_ante_payoffs(params, discounted);
    ApprovalReport {
        prob_approval: approval_probability(params),
        payoff_a,
        payoff_b,
        discounted,
        regime: eq.regime,
        p_star: eq.p_star,
        t_star: eq.t_star,
    }
}

/// Which primitive a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxis {
    #[serde(rename = "c")]
    Cost,
    #[serde(rename = "p0")]
    Prior,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Cost => "c",
            SweepAxis::Prior => "p0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Flat,
}

/// A maximal run of grid steps sharing one direction (indices into the grid,
/// inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonotoneSegment {
    pub start: usize,
    pub end: usize,
    pub direction: Direction,
}

/// Summary annotations attached to a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAnnotations {
    /// Axis value attaining the smallest approval probability (first if tied).
    pub minimizer: f64,
    pub minimizer_index: usize,
    pub min_prob: f64,
    /// Last axis value still in the immediate-approval plateau, if any.
    pub plateau_edge: Option<f64>,
    pub segments: Vec<MonotoneSegment>,
}

/// One-axis comparative-statics table; one row per grid point, ordered by
/// grid index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub rows: Vec<ApprovalReport>,
    pub annotations: SweepAnnotations,
}

/// Comparisons of adjacent sweep values absorb rounding below this.
pub const MONOTONE_TOL: f64 = 1e-10;

fn annotate(grid: &[f64], rows: &[ApprovalReport]) -> SweepAnnotations {
    let mut minimizer_index = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.prob_approval < rows[minimizer_index].prob_approval {
            minimizer_index = i;
        }
    }
    let plateau_edge = rows
        .iter()
        .rposition(|r| r.regime == Regime::ImmediateApproval)
        .map(|i| grid[i]);
    let mut segments: Vec<MonotoneSegment> = Vec::new();
    for i in 0..rows.len().saturating_sub(1) {
        let d = rows[i + 1].prob_approval - rows[i].prob_approval;
        let direction = if d > MONOTONE_TOL {
            Direction::Increasing
        } else if d < -MONOTONE_TOL {
            Direction::Decreasing
        } else {
            Direction::Flat
        };
        match segments.last_mut() {
            Some(seg) if seg.direction == direction && seg.end == i => seg.end = i + 1,
            _ => segments.push(MonotoneSegment {
                start: i,
                end: i + 1,
                direction,
            }),
        }
    }
    SweepAnnotations {
        minimizer: grid[minimizer_index],
        minimizer_index,
        min_prob: rows[minimizer_index].prob_approval,
        plateau_edge,
        segments,
    }
}

fn check_grid(grid: &[f64], ok: impl Fn(f64) -> bool, expected: &'static str) -> Result<()> {
    if grid.is_empty() {
        return Err(ModelError::EmptyGrid);
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(ModelError::InvalidGrid("grid must be strictly increasing"));
        }
    }
    for &v in grid {
        if !ok(v) {
            return Err(ModelError::GridOutOfRange { value: v, expected });
        }
    }
    Ok(())
}

/// Sweep the per-faction cost over `c_grid` (within `(0, 1/2]`), holding the
/// other primitives of `template` fixed. Rows are computed in parallel but
/// ordered by grid index.
pub fn sweep_cost(template: &ModelParams, c_grid: &[f64], discounted: bool) -> Result<SweepTable> {
    check_grid(c_grid, |c| c > 0.0 && c <= 0.5, "(0, 1/2]")?;
    let rows: Vec<ApprovalReport> = c_grid
        .par_iter()
        .map(|&c| {
            let params = template.with_c(c).expect("cost grid was validated");
            approval_report(&params, discounted)
        })
        .collect();
    Ok(SweepTable {
        axis: SweepAxis::Cost,
        grid: c_grid.to_vec(),
        annotations: annotate(c_grid, &rows),
        rows,
    })
}

/// Sweep the prior over `p0_grid` (within `(c, 1)`), holding the other
/// primitives of `template` fixed.
pub fn sweep_prior(
    template: &ModelParams,
    p0_grid: &[f64],
    discounted: bool,
) -> Result<SweepTable> {
    let c = template.c();
    check_grid(p0_grid, |p| p > c && p < 1.0, "(c, 1)")?;
    let rows: Vec<ApprovalReport> = p0_grid
        .par_iter()
        .map(|&p0| {
            let params = template.with_p0(p0).expect("prior grid was validated");
            approval_report(&params, discounted)
        })
        .collect();
    Ok(SweepTable {
        axis: SweepAxis::Prior,
        grid: p0_grid.to_vec(),
        annotations: annotate(p0_grid, &rows),
        rows,
    })
}

/// `n` uniform points on `(lo, hi]`, the default cost-figure grid shape.
/// The ratio is formed first so the top point equals `hi` exactly.
pub fn left_open_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (1..=n)
        .map(|i| lo + (hi - lo) * (i as f64 / n as f64))
        .collect()
}

/// `n` uniform points strictly inside `(lo, hi)`.
pub fn open_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (1..=n)
        .map(|i| lo + (hi - lo) * (i as f64 / (n + 1) as f64))
        .collect()
}

/// 13-significant-digit scientific format used for all CSV numeric fields;
/// parses back within 5e-13 relative, inside the 1e-12 reproduction budget.
pub fn csv_float(x: f64) -> String {
    format!("{x:.12e}")
}

/// Write the sweep as CSV: `# key = value` provenance comments, then a
/// header row, then one row per grid point.
pub fn write_sweep_csv<W: Write>(
    table: &SweepTable,
    provenance: &[(String, String)],
    w: &mut W,
) -> io::Result<()> {
    for (key, value) in provenance {
        writeln!(w, "# {key} = {value}")?;
    }
    writeln!(
        w,
        "axis_value,prob_approval,payoff_A,payoff_B,regime,p_star,t_star"
    )?;
    for (x, row) in table.grid.iter().zip(&table.rows) {
        let p_star = row.p_star.map(csv_float).unwrap_or_default();
        let t_star = row.t_star.map(csv_float).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            csv_float(*x),
            csv_float(row.prob_approval),
            csv_float(row.payoff_a),
            csv_float(row.payoff_b),
            row.regime,
            p_star,
            t_star
        )?;
    }
    Ok(())
}
