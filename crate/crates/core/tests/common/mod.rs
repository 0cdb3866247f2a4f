//! Test-only oracles, independent of the library's solver paths: a local
//! golden-section maximizer, a local bisection, dense-grid argmax, and the
//! random parameter sampler shared by the oracle/property/acceptance suites.
#![allow(dead_code)]

use committee_core::ModelParams;
use rand::rngs::StdRng;
use rand::Rng;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximizer used as the independent optimization oracle.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Grid scan followed by golden-section refinement of the best bracket: the
/// stated numerical route for locating faction B's optimal switching time.
pub fn grid_golden_max(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> (f64, f64) {
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=grid {
        let t = lo + (hi - lo) * i as f64 / grid as f64;
        let v = f(t);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + (hi - lo) * best_i.saturating_sub(1) as f64 / grid as f64;
    let b = lo + (hi - lo) * (best_i + 1).min(grid) as f64 / grid as f64;
    golden_max(f, a, b, tol)
}

/// Bisection oracle for a sign change of `f` on `[lo, hi]`.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let positive_at_lo = f(lo) > 0.0;
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Dense-grid argmax used as the welfare oracle.
pub fn grid_argmax(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let mut best_t = lo;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=points {
        let t = lo + (hi - lo) * i as f64 / points as f64;
        let v = f(t);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    (best_t, best_v)
}

/// Random valid parameters in the interesting case (`c <= min(p0, 1/2)`),
/// with a strict intensity gap. Rates are kept moderate so optimizer
/// tolerances stated in the tests are attainable in f64.
pub fn sample_interesting(rng: &mut StdRng) -> ModelParams {
    let lambda_b = rng.gen_range(0.0..5.0);
    let gap = rng.gen_range(0.5..40.0);
    let r = rng.gen_range(0.0..4.0);
    let c: f64 = rng.gen_range(0.01..=0.5);
    let p0 = rng.gen_range((c + 1e-3).min(0.98)..0.99);
    ModelParams::new(p0, c, r, lambda_b + gap, lambda_b).expect("sampled params are valid")
}

/// As `sample_interesting`, but guaranteed to sit in the delayed regime.
pub fn sample_delayed(rng: &mut StdRng) -> ModelParams {
    loop {
        let p = sample_interesting(rng);
        if committee_core::solve_equilibrium(&p).regime == committee_core::Regime::DelayedApproval {
            return p;
        }
    }
}
