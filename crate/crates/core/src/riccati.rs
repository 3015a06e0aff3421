//! Riccati flow driven by a piecewise-constant `μ`, its first crossing time
//! `a*`, and the bound updates built on it.
//!
//! On a segment where `μ` is constant the solution of
//! `Φ' = Φ² + 2μΦ + 1` is explicit (tangent, rational, or hyperbolic form
//! depending on `μ² - 1`). For a bound `m` with `log m` piecewise affine and a
//! pair `(ω, r)`, the rescaled flow `φ' = r(φ² + 2μφ + 1)`, `φ(0) = 0`, uses
//! `μ_j = (α_j - ω) / r` on the `j`-th piece, and `a*` is the first time
//! `φ` reaches 1.
//!
//! The hyperbolic branches are evaluated through `expm1`/`ln_1p` and the
//! identity `|μ| - η = 1 / (|μ| + η)` so that very large `|μ|` (which occurs
//! for tiny resolvent bounds) does not cancel catastrophically.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::bound::{Piece, PiecewiseLogAffineBound, CONTINUITY_TOL};
use crate::error::{Error, Result};

/// Below this value of `|μ² - 1|` the rational (`μ² = 1`) formula is used.
pub const RATIONAL_BRANCH_TOL: f64 = 1e-10;

/// Slack when accepting a crossing candidate at the right end of a segment.
pub const CANDIDATE_SLACK: f64 = 1e-12;

/// Below this `|ω - α|` the weighted integrand is treated as constant.
const FLAT_EXPONENT_TOL: f64 = 1e-13;

/// Width of the steep connector used when the Riccati tail starts below `m`.
const CONNECTOR_WIDTH: f64 = 1e-6;

/// A pair `(ω, r)` with `r > 0`; `r` is meant to satisfy `r ≤ r(ω)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaRPair {
    pub omega: f64,
    pub r: f64,
}

impl OmegaRPair {
    pub fn new(omega: f64, r: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::domain(format!("omega must be finite, got {omega}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("r must be positive and finite, got {r}")));
        }
        Ok(Self { omega, r })
    }
}

/// A time interval on which `μ` is constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuSegment {
    pub t_start: f64,
    /// May be `+∞`.
    pub t_end: f64,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolvedSegment {
    pub segment: MuSegment,
    /// `φ(segment.t_start)`.
    pub phi_start: f64,
}

/// The propagated flow up to (and including) the segment containing `a*`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiSolution {
    pub r: f64,
    pub segments: Vec<SolvedSegment>,
    /// First crossing time, `+∞` if `φ` never reaches 1.
    pub a_star: f64,
}

impl RiccatiSolution {
    /// `φ(t)` for `t` inside the propagated range.
    pub fn phi_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("phi evaluated at t = {t} < 0")));
        }
        let seg = self
            .segments
            .iter()
            .rev()
            .find(|s| s.segment.t_start <= t)
            .ok_or_else(|| Error::domain("no propagated segment"))?;
        if t > seg.segment.t_end {
            return Err(Error::domain(format!(
                "t = {t} beyond the propagated range (ends at {})",
                seg.segment.t_end
            )));
        }
        phi_closed_form(
            self.r * (t - seg.segment.t_start),
            seg.segment.mu,
            seg.phi_start,
        )
    }
}

/// `|μ| - η` for `η = sqrt(μ² - 1)`, without cancellation.
#[inline]
fn abs_mu_minus_eta(mu: f64, eta: f64) -> f64 {
    1.0 / (mu.abs() + eta)
}

/// `η - μ`.
#[inline]
fn eta_minus_mu(mu: f64, eta: f64) -> f64 {
    if mu > 0.0 {
        -abs_mu_minus_eta(mu, eta)
    } else {
        eta - mu
    }
}

/// `-η - μ`.
#[inline]
fn neg_eta_minus_mu(mu: f64, eta: f64) -> f64 {
    if mu < 0.0 {
        abs_mu_minus_eta(mu, eta)
    } else {
        -(eta + mu)
    }
}

/// `arccoth(x) = ½ log((x + 1) / (x - 1))` for `|x| > 1`.
pub fn arccoth(x: f64) -> f64 {
    0.5 * ((x + 1.0) / (x - 1.0)).ln()
}

fn is_rational_branch(mu: f64) -> bool {
    ((mu - 1.0) * (mu + 1.0)).abs() < RATIONAL_BRANCH_TOL
}

/// `Φ(b; μ, Φ₀)`: the solution of `Φ' = Φ² + 2μΦ + 1`, `Φ(0) = Φ₀`.
///
/// Fails with [`Error::Pole`] when the solution blows up at or before `b`.
pub fn phi_closed_form(b: f64, mu: f64, phi0: f64) -> Result<f64> {
    if !(b >= 0.0) || !mu.is_finite() || !(phi0 >= 0.0) || !phi0.is_finite() {
        return Err(Error::domain(format!(
            "phi_closed_form needs b >= 0, finite mu, phi0 >= 0 (b = {b}, mu = {mu}, phi0 = {phi0})"
        )));
    }
    if b == 0.0 {
        return Ok(phi0);
    }
    let s = phi0 + mu;

    if is_rational_branch(mu) {
        // Φ = -1/(b + c) - μ with c = -1/s, i.e. s / (1 - b s) - μ.
        if s == 0.0 {
            return Ok(phi0);
        }
        if s > 0.0 && b * s >= 1.0 {
            return Err(Error::Pole {
                pole: 1.0 / s,
                requested: b,
            });
        }
        return Ok(s / (1.0 - b * s) - mu);
    }

    if mu.abs() < 1.0 {
        let eta = ((1.0 - mu) * (1.0 + mu)).sqrt();
        let c = (s / eta).atan();
        let arg = eta * b + c;
        if arg >= FRAC_PI_2 {
            return Err(Error::Pole {
                pole: (FRAC_PI_2 - c) / eta,
                requested: b,
            });
        }
        return Ok(eta * arg.tan() - mu);
    }

    let eta = ((mu - 1.0) * (mu + 1.0)).sqrt();
    // gap = |s| - η
    let gap = if s != 0.0 && s.signum() == mu.signum() {
        mu.signum() * phi0 + abs_mu_minus_eta(mu, eta)
    } else {
        s.abs() - eta
    };

    if gap == 0.0 {
        Ok(phi0)
    } else if gap > 0.0 {
        // Φ = η coth(c - ηb) - μ, c = arccoth(s/η)
        let c = s.signum() * 0.5 * (2.0 * eta / gap).ln_1p();
        let x = c - eta * b;
        if s > 0.0 && x <= 0.0 {
            return Err(Error::Pole {
                pole: c / eta,
                requested: b,
            });
        }
        if x > 0.0 {
            Ok(eta_minus_mu(mu, eta) + 2.0 * eta / (2.0 * x).exp_m1())
        } else {
            Ok(neg_eta_minus_mu(mu, eta) - 2.0 * eta / (-2.0 * x).exp_m1())
        }
    } else {
        // Φ = η tanh(c - ηb) - μ, c = artanh(s/η)
        let (num, den) = if s > 0.0 {
            (eta + s, -gap)
        } else {
            (-gap, eta - s)
        };
        let c = 0.5 * (num.ln() - den.ln());
        let y = c - eta * b;
        if y < 0.0 {
            Ok(neg_eta_minus_mu(mu, eta) + 2.0 * eta / (1.0 + (-2.0 * y).exp()))
        } else {
            Ok(eta_minus_mu(mu, eta) - 2.0 * eta / (1.0 + (2.0 * y).exp()))
        }
    }
}

/// Candidate crossing time on one segment: `t_start` plus the time the flow
/// `φ' = r(φ² + 2μφ + 1)` needs to climb from `phi_start` to 1, or `+∞`
/// when `μ ≤ -1`.
///
/// The three textbook forms (arctan for `|μ| < 1`, rational for `μ = 1`,
/// arccoth for `μ > 1`) are each rewritten as a single `atan`/`ln_1p` of
/// `η(1 - φ) / ((1 + μ)(1 + φ))`, which is algebraically identical and
/// keeps full precision when `η → 0` or `μ → ∞`.
pub fn a_star_candidate(seg: &MuSegment, phi_start: f64, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&phi_start) {
        return Err(Error::domain(format!(
            "phi_start must lie in [0, 1), got {phi_start}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::domain(format!("r must be positive, got {r}")));
    }
    let mu = seg.mu;
    let phi = phi_start;
    if mu <= -1.0 || (is_rational_branch(mu) && mu < 0.0) {
        return Ok(f64::INFINITY);
    }
    let dt = if is_rational_branch(mu) {
        (1.0 / (phi + 1.0) - 0.5) / r
    } else if mu < 1.0 {
        let eta = ((1.0 - mu) * (1.0 + mu)).sqrt();
        ((1.0 - phi) * eta / ((1.0 + mu) * (1.0 + phi))).atan() / (r * eta)
    } else {
        let eta = ((mu - 1.0) * (mu + 1.0)).sqrt();
        // ½ log(N₊ / N₋) with N₊ - N₋ = 2η(1 - φ)
        let n_minus = 1.0 + abs_mu_minus_eta(mu, eta) + phi * (1.0 + mu + eta);
        0.5 * (2.0 * eta * (1.0 - phi) / n_minus).ln_1p() / (r * eta)
    };
    Ok(seg.t_start + dt)
}

/// Walks the segments, propagating `φ` and testing the candidate on each.
/// With `monotone_mu` set (non-increasing `μ`, i.e. concave `log m`), stops
/// as soon as the next segment has `μ ≤ -1`.
fn first_crossing(
    segments: impl IntoIterator<Item = MuSegment>,
    r: f64,
    monotone_mu: bool,
) -> RiccatiSolution {
    let mut phi = 0.0;
    let mut solved = Vec::new();
    let mut iter = segments.into_iter().peekable();
    let mut a_star = f64::INFINITY;

    while let Some(seg) = iter.next() {
        solved.push(SolvedSegment {
            segment: seg,
            phi_start: phi,
        });
        let candidate = a_star_candidate(&seg, phi, r).unwrap_or(seg.t_start);
        if candidate <= seg.t_end + CANDIDATE_SLACK {
            a_star = candidate;
            break;
        }
        if !seg.t_end.is_finite() {
            break;
        }
        match iter.peek() {
            None => break,
            Some(next) if monotone_mu && next.mu <= -1.0 => break,
            Some(_) => {}
        }
        match phi_closed_form(r * (seg.t_end - seg.t_start), seg.mu, phi) {
            Ok(p) if p < 1.0 => phi = p.max(0.0),
            // rounding put the crossing just past the segment end
            _ => {
                a_star = seg.t_end;
                break;
            }
        }
    }
    RiccatiSolution {
        r,
        segments: solved,
        a_star,
    }
}

/// The `μ` segments of `m` for the pair `(ω, r)`.
pub fn mu_segments<'a>(
    m: &'a PiecewiseLogAffineBound,
    pair: OmegaRPair,
) -> impl Iterator<Item = MuSegment> + 'a {
    m.pieces().iter().enumerate().map(move |(j, p)| MuSegment {
        t_start: p.start,
        t_end: m.piece_end(j),
        mu: (p.slope - pair.omega) / pair.r,
    })
}

/// Propagates the flow for `(m, ω, r)` up to the first crossing.
pub fn solve(m: &PiecewiseLogAffineBound, pair: OmegaRPair) -> RiccatiSolution {
    let concave = m.check_log_concave().is_concave;
    first_crossing(mu_segments(m, pair), pair.r, concave)
}

/// `a*(m, ω, r)`.
pub fn a_star(m: &PiecewiseLogAffineBound, pair: OmegaRPair) -> f64 {
    solve(m, pair).a_star
}

/// A piecewise-constant function `μ` on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstantMu {
    starts: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstantMu {
    pub fn new(starts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if starts.is_empty() || starts.len() != values.len() {
            return Err(Error::invalid("mu profile", "need matching, non-empty arrays"));
        }
        if starts[0] != 0.0 {
            return Err(Error::invalid("mu profile", "first start must be 0"));
        }
        if starts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("mu profile", "starts must increase strictly"));
        }
        if values.iter().chain(&starts).any(|v| !v.is_finite()) {
            return Err(Error::invalid("mu profile", "values must be finite"));
        }
        Ok(Self { starts, values })
    }

    pub fn constant(mu: f64) -> Self {
        Self {
            starts: vec![0.0],
            values: vec![mu],
        }
    }

    /// `μ(t) + θ`.
    pub fn shifted(&self, theta: f64) -> Self {
        Self {
            starts: self.starts.clone(),
            values: self.values.iter().map(|v| v + theta).collect(),
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let j = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        self.values[j]
    }

    fn segments(&self) -> impl Iterator<Item = MuSegment> + '_ {
        (0..self.starts.len()).map(move |j| MuSegment {
            t_start: self.starts[j],
            t_end: self.starts.get(j + 1).copied().unwrap_or(f64::INFINITY),
            mu: self.values[j],
        })
    }
}

/// `b*(μ)`: first `b` with `Φ(b) = 1` for `Φ' = Φ² + 2μ(b)Φ + 1`, `Φ(0) = 0`.
pub fn b_star(mu: &PiecewiseConstantMu) -> f64 {
    let monotone = mu.values.windows(2).all(|w| w[1] <= w[0]);
    first_crossing(mu.segments(), 1.0, monotone).a_star
}

/// `b*` for a general `μ`, by classical RK4 with step `step` up to
/// `horizon`; `+∞` when no crossing occurs before `horizon`.
pub fn b_star_fn(mu: impl Fn(f64) -> f64, horizon: f64, step: f64) -> f64 {
    let rhs = |b: f64, phi: f64| phi * phi + 2.0 * mu(b) * phi + 1.0;
    let rk4 = |b: f64, phi: f64, h: f64| {
        let k1 = rhs(b, phi);
        let k2 = rhs(b + 0.5 * h, phi + 0.5 * h * k1);
        let k3 = rhs(b + 0.5 * h, phi + 0.5 * h * k2);
        let k4 = rhs(b + h, phi + h * k3);
        phi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let mut b = 0.0;
    let mut phi = 0.0;
    while b < horizon {
        let h = step.min(horizon - b);
        let next = rk4(b, phi, h);
        if next >= 1.0 || !next.is_finite() {
            // bisect on the sub-step length
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let v = rk4(b, phi, mid);
                if v >= 1.0 || !v.is_finite() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return b + 0.5 * (lo + hi);
        }
        b += h;
        phi = next;
    }
    f64::INFINITY
}

/// The updated bound `U(m, ω, r)`: `m` on `[0, 2a*]`, then
/// `min(m, e^{(ω - r)(t - 2a*)} m(a*)²)`. Returns `m` when `a* = +∞`.
pub fn update_bound(m: &PiecewiseLogAffineBound, pair: OmegaRPair) -> PiecewiseLogAffineBound {
    let a = a_star(m, pair);
    if !a.is_finite() {
        return m.clone();
    }
    update_bound_at(m, pair, a)
}

/// `U` with a precomputed `a*`.
pub(crate) fn update_bound_at(
    m: &PiecewiseLogAffineBound,
    pair: OmegaRPair,
    a: f64,
) -> PiecewiseLogAffineBound {
    let start = 2.0 * a;
    let tail_slope = pair.omega - pair.r;
    let tail_at_start = 2.0 * m.log_at(a);
    let tail = PiecewiseLogAffineBound::scaled_exponential(
        tail_at_start - tail_slope * start,
        tail_slope,
    );
    let m_at_start = m.log_at(start);
    let jump = m_at_start - tail_at_start;
    let scale = 1f64.max(m_at_start.abs()).max(tail_at_start.abs());

    let beyond = if jump > CONTINUITY_TOL * scale {
        // m is not submultiplicative at (a*, a*): the exact update jumps down
        // at 2a*. Replace the jump by a steep continuous connector, which
        // stays above the exact update.
        let steep = tail_slope - jump / CONNECTOR_WIDTH;
        let connector =
            PiecewiseLogAffineBound::scaled_exponential(m_at_start - steep * start, steep);
        m.pointwise_min(&tail.pointwise_max(&connector))
    } else {
        m.pointwise_min(&tail)
    };
    m.splice(&beyond, start)
}

/// `∫₀^c e^{2ωs} m(s)^{-2} ds`, the squared weighted norm of `1/m`.
pub fn weighted_inv_norm_sq(m: &PiecewiseLogAffineBound, omega: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("integration length must be > 0, got {c}")));
    }
    let mut total = 0.0;
    for (j, p) in m.pieces().iter().enumerate() {
        let lo = p.start;
        if lo >= c {
            break;
        }
        let hi = m.piece_end(j).min(c);
        total += piece_integral(p, omega, lo, hi);
    }
    Ok(total)
}

fn piece_integral(p: &Piece, omega: f64, lo: f64, hi: f64) -> f64 {
    let rate = omega - p.slope;
    if rate.abs() < FLAT_EXPONENT_TOL {
        (-2.0 * p.intercept).exp() * (hi - lo)
    } else {
        let k = 2.0 * rate;
        (k * lo - 2.0 * p.intercept).exp() * (k * (hi - lo)).exp_m1() / k
    }
}

fn check_gp_args(a: f64, b: f64, t: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!("a and b must be positive (a = {a}, b = {b})")));
    }
    if !(t >= a + b) {
        return Err(Error::domain(format!("need t >= a + b (t = {t}, a + b = {})", a + b)));
    }
    Ok(())
}

/// Log of the quantitative Gearhart–Prüss bound
/// `‖S(t)‖ ≤ e^{ωt - r(t-a-b)} / (r ‖1/m‖_{a} ‖1/m‖_{b})`, valid for `t ≥ a + b`.
pub fn gp_bound(
    m: &PiecewiseLogAffineBound,
    pair: OmegaRPair,
    a: f64,
    b: f64,
    t: f64,
) -> Result<f64> {
    Ok(gp_bound_without_decay(m, pair, a, b, t)? - pair.r * (t - a - b))
}

/// The weaker form of [`gp_bound`] without the `e^{-r(t-a-b)}` factor.
pub fn gp_bound_without_decay(
    m: &PiecewiseLogAffineBound,
    pair: OmegaRPair,
    a: f64,
    b: f64,
    t: f64,
) -> Result<f64> {
    check_gp_args(a, b, t)?;
    let na = weighted_inv_norm_sq(m, pair.omega, a)?;
    let nb = weighted_inv_norm_sq(m, pair.omega, b)?;
    Ok(pair.omega * t - pair.r.ln() - 0.5 * na.ln() - 0.5 * nb.ln())
}
