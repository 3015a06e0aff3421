//! Operators whose semigroup and resolvent are explicitly computable.

pub mod diffop;
pub mod jordan;

pub use diffop::{
    diffop_astar, diffop_nu, diffop_omega_minus_r, diffop_r, diffop_resolvent_norm,
    diffop_scaled_astar,
    diffop_true_norm, rstar, NuRoot, NuValue,
};
pub use jordan::{
    jordan_exponential, jordan_numrange_slope, jordan_resolvent_norm, jordan_resolvent_profile,
    jordan_true_norm, JordanBlockModel,
};

/// Bisection for an increasing `f` on `]lo, hi[` with `f(lo+) < target < f(hi-)`.
/// Runs to machine resolution (at most 200 halvings) and returns the endpoint
/// with the smaller residual.
pub(crate) fn bisect_increasing(
    f: impl Fn(f64) -> f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the endpoints themselves may be singular (e.g. ν = 0 or π)
    let res = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            (v - target).abs()
        } else {
            f64::INFINITY
        }
    };
    if res(lo) <= res(hi) {
        lo
    } else {
        hi
    }
}
