//! Resolvent profiles and iterated updates `m ↦ (𝔖 U̲_Ω)^k m` over a finite
//! frequency set `Ω`, where `U̲_Ω m = min_{ω ∈ Ω} U(m, ω, r(ω))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::PiecewiseLogAffineBound;
use crate::error::{Error, Result};
use crate::models::{diffop_r, jordan_resolvent_profile, JordanBlockModel};
use crate::riccati::{a_star, update_bound, update_bound_at, OmegaRPair};
use crate::semigroupize::{semigroupize, GridBound};

/// Two successive snapshots closer than this (grid sup-norm) are equal.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Frequencies whose `a*` is within this of the minimum count as minimizing.
pub const MINIMIZER_TOL: f64 = 1e-9;
/// `𝔖` moving the sampled bound by less than this counts as a no-op.
const NOOP_TOL: f64 = 1e-12;

/// A map `ω ↦ r(ω)` usable in [`update_bound`]: every returned value is a
/// valid (possibly conservative) lower bound for `1 / sup_{Re z > ω} ‖(z - A)^{-1}‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawProfile", into = "RawProfile")]
pub enum ResolventProfile {
    /// Sorted samples `(ω_i, r_i)`.
    Tabulated { omegas: Vec<f64>, rs: Vec<f64> },
    /// `γ A + δ` for the differentiation operator `A`.
    DiffOp { gamma: f64, delta: f64 },
    Jordan(JordanBlockModel),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawProfile {
    Tabulated {
        pairs: Vec<(f64, f64)>,
    },
    #[serde(rename = "diffop")]
    DiffOp {
        #[serde(default = "one")]
        gamma: f64,
        #[serde(default)]
        delta: f64,
    },
    Jordan {
        n: usize,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawProfile> for ResolventProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        match raw {
            RawProfile::Tabulated { pairs } => Self::tabulated(pairs),
            RawProfile::DiffOp { gamma, delta } => Self::scaled_diffop(gamma, delta),
            RawProfile::Jordan { n } => Ok(Self::Jordan(JordanBlockModel::new(n)?)),
        }
    }
}

impl From<ResolventProfile> for RawProfile {
    fn from(p: ResolventProfile) -> Self {
        match p {
            ResolventProfile::Tabulated { omegas, rs } => RawProfile::Tabulated {
                pairs: omegas.into_iter().zip(rs).collect(),
            },
            ResolventProfile::DiffOp { gamma, delta } => RawProfile::DiffOp { gamma, delta },
            ResolventProfile::Jordan(m) => RawProfile::Jordan { n: m.n() },
        }
    }
}

impl ResolventProfile {
    /// Validates samples: `r_i > 0`, `ω_i` strictly increasing, `r`
    /// non-decreasing and `r_i ≥ r_{i+1} - (ω_{i+1} - ω_i)`.
    pub fn tabulated(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (omegas, rs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        if omegas.is_empty() {
            return Err(Error::invalid("resolvent profile", "no samples"));
        }
        for (i, (&w, &r)) in omegas.iter().zip(&rs).enumerate() {
            if !w.is_finite() {
                return Err(Error::invalid("resolvent profile", format!("omega[{i}] = {w}")));
            }
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("resolvent profile", format!("r[{i}] = {r} is not positive")));
            }
        }
        for i in 0..omegas.len() - 1 {
            let (w0, w1, r0, r1) = (omegas[i], omegas[i + 1], rs[i], rs[i + 1]);
            if !(w1 > w0) {
                return Err(Error::invalid(
                    "resolvent profile",
                    format!("omegas must be strictly increasing ({w0} then {w1})"),
                ));
            }
            if r1 < r0 {
                return Err(Error::invalid(
                    "resolvent profile",
                    format!("r must be non-decreasing (r({w0}) = {r0} > r({w1}) = {r1})"),
                ));
            }
            if r0 < r1 - (w1 - w0) {
                return Err(Error::invalid(
                    "resolvent profile",
                    format!("r({w0}) = {r0} is below r({w1}) - ({w1} - {w0})"),
                ));
            }
        }
        Ok(Self::Tabulated { omegas, rs })
    }

    pub fn diffop() -> Self {
        Self::DiffOp {
            gamma: 1.0,
            delta: 0.0,
        }
    }

    /// Profile of `γA + δ`: `γ r((ω - δ)/γ)`.
    pub fn scaled_diffop(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) || !delta.is_finite() {
            return Err(Error::invalid(
                "resolvent profile",
                format!("need gamma > 0 and finite delta (gamma = {gamma}, delta = {delta})"),
            ));
        }
        Ok(Self::DiffOp { gamma, delta })
    }

    pub fn jordan(n: usize) -> Result<Self> {
        Ok(Self::Jordan(JordanBlockModel::new(n)?))
    }

    /// The open interval `]lo, hi[` of `ω` with `r(ω) > 0`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Tabulated { omegas, rs } => {
                let lo = omegas
                    .iter()
                    .zip(rs)
                    .map(|(w, r)| w - r)
                    .fold(f64::INFINITY, f64::min);
                (lo, f64::INFINITY)
            }
            Self::DiffOp { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Jordan(_) => (0.0, f64::INFINITY),
        }
    }

    /// `r(ω)`. Between samples a tabulated profile uses the largest value
    /// compatible with monotonicity and the 1-Lipschitz lower bound.
    pub fn r(&self, omega: f64) -> Result<f64> {
        if !omega.is_finite() {
            return Err(Error::domain(format!("omega must be finite, got {omega}")));
        }
        match self {
            Self::Tabulated { omegas, rs } => {
                let below = omegas.partition_point(|&w| w <= omega);
                let from_below = if below > 0 { rs[below - 1] } else { 0.0 };
                let from_above = omegas[below..]
                    .iter()
                    .zip(&rs[below..])
                    .map(|(w, r)| r - (w - omega))
                    .fold(f64::NEG_INFINITY, f64::max);
                let r = from_below.max(from_above);
                if r > 0.0 {
                    Ok(r)
                } else {
                    Err(Error::domain(format!(
                        "omega = {omega} is outside the tabulated profile's domain"
                    )))
                }
            }
            Self::DiffOp { gamma, delta } => Ok(gamma * diffop_r((omega - delta) / gamma)?),
            Self::Jordan(model) => jordan_resolvent_profile(*model, omega),
        }
    }

    pub fn pair(&self, omega: f64) -> Result<OmegaRPair> {
        OmegaRPair::new(omega, self.r(omega)?)
    }
}

/// A finite, sorted set of distinct frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OmegaSet(Vec<f64>);

impl TryFrom<Vec<f64>> for OmegaSet {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<OmegaSet> for Vec<f64> {
    fn from(s: OmegaSet) -> Self {
        s.0
    }
}

impl OmegaSet {
    pub fn new(mut omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::invalid("omega set", "empty"));
        }
        if let Some(w) = omegas.iter().find(|w| !w.is_finite()) {
            return Err(Error::invalid("omega set", format!("non-finite value {w}")));
        }
        omegas.sort_by(f64::total_cmp);
        omegas.dedup();
        Ok(Self(omegas))
    }

    /// `count` values from `from` to `to` (both positive), equally spaced in
    /// `log ω`.
    pub fn log_spaced(from: f64, to: f64, count: usize) -> Result<Self> {
        if !(from > 0.0 && to > 0.0 && from.is_finite() && to.is_finite()) || count == 0 {
            return Err(Error::invalid(
                "omega set",
                format!("log spacing needs 0 < from, to and count >= 1 (from = {from}, to = {to}, count = {count})"),
            ));
        }
        if count == 1 {
            return Self::new(vec![from]);
        }
        let (l0, l1) = (from.ln(), to.ln());
        let step = (l1 - l0) / (count - 1) as f64;
        Self::new((0..count).map(|k| (l0 + k as f64 * step).exp()).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(ω, r(ω))` for every `ω`, evaluated in parallel.
    pub fn pairs(&self, profile: &ResolventProfile) -> Result<Vec<OmegaRPair>> {
        self.0.par_iter().map(|&w| profile.pair(w)).collect()
    }
}

/// One iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationStep {
    pub index: usize,
    /// Sampled on the iteration grid (absent for exact-only iterations).
    pub grid: Option<GridBound>,
    /// The exact bound, while the iteration can keep it.
    pub exact: Option<PiecewiseLogAffineBound>,
    /// Frequencies of `Ω` minimizing `a*` for the previous iterate, i.e. the
    /// ones whose update started earliest when producing this step.
    pub minimizing_omegas: Vec<f64>,
    /// That minimal `a*`; `None` for step 0 or when it is `+∞`.
    pub min_a_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub steps: Vec<IterationStep>,
    /// First `k` with step `k + 1` equal to step `k`.
    pub stationary_at: Option<usize>,
}

impl IterationTrace {
    pub fn last(&self) -> &IterationStep {
        self.steps.last().expect("a trace always holds step 0")
    }
}

struct Minimizers {
    omegas: Vec<f64>,
    min_a_star: Option<f64>,
}

fn minimizers(pairs: &[OmegaRPair], a_stars: &[f64]) -> Minimizers {
    let min = a_stars.iter().copied().fold(f64::INFINITY, f64::min);
    let omegas = pairs
        .iter()
        .zip(a_stars)
        .filter(|(_, &a)| if min.is_finite() { a - min <= MINIMIZER_TOL } else { true })
        .map(|(p, _)| p.omega)
        .collect();
    Minimizers {
        omegas,
        min_a_star: min.is_finite().then_some(min),
    }
}

fn underline_u_pairs(
    m: &PiecewiseLogAffineBound,
    pairs: &[OmegaRPair],
) -> (PiecewiseLogAffineBound, Minimizers) {
    let updates: Vec<(f64, Option<PiecewiseLogAffineBound>)> = pairs
        .par_iter()
        .map(|&pair| {
            let a = a_star(m, pair);
            (a, a.is_finite().then(|| update_bound_at(m, pair, a)))
        })
        .collect();
    let a_stars: Vec<f64> = updates.iter().map(|(a, _)| *a).collect();
    let out = updates
        .iter()
        .filter_map(|(_, u)| u.as_ref())
        .fold(m.clone(), |acc, u| acc.pointwise_min(u));
    (out, minimizers(pairs, &a_stars))
}

/// `U̲_Ω(m) = min_{ω ∈ Ω} U(m, ω, r(ω))`.
pub fn underline_u(
    m: &PiecewiseLogAffineBound,
    omegas: &OmegaSet,
    profile: &ResolventProfile,
) -> Result<PiecewiseLogAffineBound> {
    require_normalized(m)?;
    Ok(underline_u_pairs(m, &omegas.pairs(profile)?).0)
}

/// `U̲_Ω` on grid values, with `a*` taken from the interpolant.
fn underline_u_grid(g: &GridBound, pairs: &[OmegaRPair]) -> (GridBound, Minimizers) {
    let p = g.interpolant();
    let a_stars: Vec<f64> = pairs.par_iter().map(|&pair| a_star(&p, pair)).collect();
    let mut values = g.values().to_vec();
    for (pair, &a) in pairs.iter().zip(&a_stars) {
        if !a.is_finite() {
            continue;
        }
        let start = 2.0 * a;
        let at_start = 2.0 * p.log_at(a);
        let slope = pair.omega - pair.r;
        for (k, v) in values.iter_mut().enumerate() {
            let t = g.time(k);
            if t >= start {
                *v = v.min(at_start + slope * (t - start));
            }
        }
    }
    (g.with_values(values), minimizers(pairs, &a_stars))
}

fn require_normalized(m: &PiecewiseLogAffineBound) -> Result<()> {
    if m.is_normalized() {
        Ok(())
    } else {
        Err(Error::Precondition("the bound must satisfy m(0) = 1".into()))
    }
}

/// Options for [`iterate_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationOptions {
    pub max_steps: usize,
    /// Grid step.
    pub h: f64,
    /// Number of grid steps.
    pub n: usize,
    /// Apply `𝔖` after each `U̲_Ω`.
    pub semigroupize: bool,
}

/// `(𝔖 U̲_Ω)^k m` for `k = 0, 1, …` on the grid `h·{0, …, n}`.
pub fn iterate(
    m: &PiecewiseLogAffineBound,
    omegas: &OmegaSet,
    profile: &ResolventProfile,
    max_steps: usize,
    h: f64,
    n: usize,
) -> Result<IterationTrace> {
    iterate_with(
        m,
        omegas,
        profile,
        IterationOptions {
            max_steps,
            h,
            n,
            semigroupize: true,
        },
    )
}

enum State {
    Exact(PiecewiseLogAffineBound),
    Grid(GridBound),
}

/// Like [`iterate`], optionally without `𝔖`.
///
/// `U̲_Ω` runs on the exact representation as long as `𝔖` leaves the sampled
/// iterate unchanged (always the case for log-concave iterates). Once `𝔖`
/// changes something, the iteration continues on the grid, with `a*` taken
/// from the piecewise-affine interpolant of the grid values.
pub fn iterate_with(
    m: &PiecewiseLogAffineBound,
    omegas: &OmegaSet,
    profile: &ResolventProfile,
    opts: IterationOptions,
) -> Result<IterationTrace> {
    require_normalized(m)?;
    let pairs = omegas.pairs(profile)?;
    let g0 = GridBound::sample(m, opts.h, opts.n)?;
    let mut steps = vec![IterationStep {
        index: 0,
        grid: Some(g0.clone()),
        exact: Some(m.clone()),
        minimizing_omegas: Vec::new(),
        min_a_star: None,
    }];
    let mut state = State::Exact(m.clone());
    let mut prev = g0;
    let mut stationary_at = None;

    for k in 1..=opts.max_steps {
        let (grid, exact, mins) = match &state {
            State::Exact(cur) => {
                let (u, mins) = underline_u_pairs(cur, &pairs);
                let g = GridBound::sample(&u, opts.h, opts.n)?;
                if !opts.semigroupize {
                    (g, Some(u), mins)
                } else {
                    let s = semigroupize(&g);
                    if s.sup_distance(&g) <= NOOP_TOL {
                        (g, Some(u), mins)
                    } else {
                        (s, None, mins)
                    }
                }
            }
            State::Grid(cur) => {
                let (u, mins) = underline_u_grid(cur, &pairs);
                let g = if opts.semigroupize { semigroupize(&u) } else { u };
                (g, None, mins)
            }
        };
        let done = grid.sup_distance(&prev) <= STATIONARY_TOL;
        state = match &exact {
            Some(e) => State::Exact(e.clone()),
            None => State::Grid(grid.clone()),
        };
        prev = grid.clone();
        steps.push(IterationStep {
            index: k,
            grid: Some(grid),
            exact,
            minimizing_omegas: mins.omegas,
            min_a_star: mins.min_a_star,
        });
        if done {
            stationary_at = Some(k - 1);
            break;
        }
    }
    Ok(IterationTrace {
        steps,
        stationary_at,
    })
}

/// `U̲_Ω^k m` on the exact representation only; `m` must be log-concave, so
/// that `𝔖` would have nothing to do.
pub fn iterate_u_only(
    m: &PiecewiseLogAffineBound,
    omegas: &OmegaSet,
    profile: &ResolventProfile,
    max_steps: usize,
) -> Result<IterationTrace> {
    require_normalized(m)?;
    let report = m.check_log_concave();
    if !report.is_concave {
        return Err(Error::Precondition(format!(
            "log m must be concave (slope increases after piece {})",
            report.first_violation.unwrap_or_default()
        )));
    }
    let pairs = omegas.pairs(profile)?;
    let mut steps = vec![IterationStep {
        index: 0,
        grid: None,
        exact: Some(m.clone()),
        minimizing_omegas: Vec::new(),
        min_a_star: None,
    }];
    let mut cur = m.clone();
    let mut stationary_at = None;
    for k in 1..=max_steps {
        let (next, mins) = underline_u_pairs(&cur, &pairs);
        let done = next.sup_distance(&cur) <= STATIONARY_TOL;
        steps.push(IterationStep {
            index: k,
            grid: None,
            exact: Some(next.clone()),
            minimizing_omegas: mins.omegas,
            min_a_star: mins.min_a_star,
        });
        cur = next;
        if done {
            stationary_at = Some(k - 1);
            break;
        }
    }
    Ok(IterationTrace {
        steps,
        stationary_at,
    })
}

/// `U(…U(U(m, ω₁, r₁), ω₂, r₂)…)`: updates applied one after another.
pub fn apply_in_order(m: &PiecewiseLogAffineBound, pairs: &[OmegaRPair]) -> PiecewiseLogAffineBound {
    pairs.iter().fold(m.clone(), |acc, &p| update_bound(&acc, p))
}
